use std::io::Write;
use std::path::PathBuf;

use bkmatch_core::eval::{significance_matrix, write_matrix_csv};

use super::{check_alpha, ExactTailArg};
use crate::error::CliError;
use crate::inputs::{output, parse_mode, Manifest, RunTable};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// CSV with columns config,testcase,alignment,reference; every config
    /// must cover the same test cases.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Significance level of the McNemar test.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// p-value of the exact test used for small discordant counts.
    #[arg(long, value_enum, default_value = "one-sided")]
    exact_tail: ExactTailArg,
    /// Matrix file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Skip malformed alignment cells instead of failing.
    #[arg(long)]
    lenient: bool,
}

pub fn run(a: Args) -> Result<(), CliError> {
    check_alpha(a.alpha)?;
    let m = Manifest::load(&a.manifest, &["config", "testcase", "alignment", "reference"])?;
    let table = RunTable::load(&m, |row| row["config"].clone(), parse_mode(a.lenient))?;
    let runs = table
        .run_order
        .iter()
        .map(|k| Ok((k.clone(), table.ordered(k)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let matrix = significance_matrix(&runs, &table.refs, a.alpha, a.exact_tail.into())?;
    let mut w = output(a.output.as_deref())?;
    write_matrix_csv(&matrix, &mut w)?;
    w.flush()?;
    eprintln!("{} run(s) over {} test case(s)", runs.len(), table.testcases.len());
    Ok(())
}
