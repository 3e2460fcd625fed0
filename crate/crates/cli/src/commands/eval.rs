use std::io::Write;
use std::path::PathBuf;

use bkmatch_core::eval::{confusion, write_report_csv, Aggregation, ReportRow};

use super::ZeroDivisionArg;
use crate::error::CliError;
use crate::inputs::{load_alignment, output, parse_mode, Manifest};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// System alignment (.tsv or .rdf); use with --reference.
    #[arg(long, value_name = "FILE", requires = "reference", conflicts_with = "manifest")]
    system: Option<PathBuf>,
    /// Reference alignment for --system.
    #[arg(long, value_name = "FILE", requires = "system")]
    reference: Option<PathBuf>,
    /// CSV with columns config,testcase,alignment,reference; paths are
    /// relative to the manifest.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
    /// Summary rows to append per config: micro, macro; repeatable.
    #[arg(long = "aggregate", value_name = "MODE", default_value = "micro")]
    aggregate: Vec<Aggregation>,
    /// Value of precision or recall when its denominator is zero.
    #[arg(long, value_enum, default_value = "0")]
    zero_division: ZeroDivisionArg,
    /// Report file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Skip malformed alignment cells instead of failing.
    #[arg(long)]
    lenient: bool,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let mode = parse_mode(a.lenient);
    let mut rows = Vec::new();
    match (&a.system, &a.reference, &a.manifest) {
        (Some(s), Some(r), None) => {
            let testcase = s.file_stem().and_then(|x| x.to_str()).unwrap_or("system").to_string();
            rows.push(ReportRow {
                config: "system".into(),
                testcase,
                counts: confusion(&load_alignment(s, mode)?, &load_alignment(r, mode)?),
            });
        }
        (None, None, Some(m)) => {
            let m = Manifest::load(m, &["config", "testcase", "alignment", "reference"])?;
            for row in &m.rows {
                let sys = load_alignment(&m.path(row, "alignment"), mode)?;
                let reference = load_alignment(&m.path(row, "reference"), mode)?;
                rows.push(ReportRow {
                    config: row["config"].clone(),
                    testcase: row["testcase"].clone(),
                    counts: confusion(&sys, &reference),
                });
            }
        }
        _ => return Err(CliError::Config("pass --system and --reference, or --manifest".into())),
    }
    let mut modes: Vec<Aggregation> = Vec::new();
    for m in a.aggregate {
        if !modes.contains(&m) {
            modes.push(m);
        }
    }
    let mut w = output(a.output.as_deref())?;
    write_report_csv(&rows, &modes, a.zero_division.into(), &mut w)?;
    w.flush()?;
    eprintln!("evaluated {} alignment(s)", rows.len());
    Ok(())
}
