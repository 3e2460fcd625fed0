use std::collections::BTreeMap;
use std::path::PathBuf;

use bkmatch_core::eval::{impact_from_runs, SourceDenominator};
use clap::ValueEnum;

use super::{check_alpha, ExactTailArg};
use crate::error::CliError;
use crate::inputs::{output, parse_mode, Manifest, RunTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenominatorArg {
    /// Same pattern as the strategy impact: |TC|·|BK|² − |TC|·|BK|.
    Symmetric,
    /// |TC|·|BK|² − |BK|·|S|.
    AsPrinted,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// CSV with columns source,strategy,testcase,alignment,reference; the
    /// grid of sources × strategies must be complete.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Significance level of the McNemar test.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// p-value of the exact test used for small discordant counts.
    #[arg(long, value_enum, default_value = "one-sided")]
    exact_tail: ExactTailArg,
    /// Denominator of the source impact.
    #[arg(long, value_enum, default_value = "symmetric")]
    source_denominator: DenominatorArg,
    /// Output file of `metric,value` rows; standard output when absent.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Skip malformed alignment cells instead of failing.
    #[arg(long)]
    lenient: bool,
}

const SEP: char = '\u{1f}';

pub fn run(a: Args) -> Result<(), CliError> {
    check_alpha(a.alpha)?;
    let m = Manifest::load(&a.manifest, &["source", "strategy", "testcase", "alignment", "reference"])?;
    let table = RunTable::load(&m, |row| format!("{}{SEP}{}", row["source"], row["strategy"]), parse_mode(a.lenient))?;
    let mut sources: Vec<String> = Vec::new();
    let mut strategies: Vec<String> = Vec::new();
    let mut runs = BTreeMap::new();
    for key in &table.run_order {
        let (b, s) = key.split_once(SEP).expect("run key holds a separator");
        if !sources.iter().any(|x| x == b) {
            sources.push(b.to_string());
        }
        if !strategies.iter().any(|x| x == s) {
            strategies.push(s.to_string());
        }
        runs.insert((b.to_string(), s.to_string()), table.ordered(key)?);
    }
    let denom = match a.source_denominator {
        DenominatorArg::Symmetric => SourceDenominator::Symmetric,
        DenominatorArg::AsPrinted => SourceDenominator::AsPrinted,
    };
    let r = impact_from_runs(&sources, &strategies, &runs, &table.refs, a.alpha, a.exact_tail.into(), denom)?;

    let mut w = csv::Writer::from_writer(output(a.output.as_deref())?);
    w.write_record(["metric", "value"])?;
    for (k, v) in [
        ("impact_strategy", r.impact_strategy),
        ("std_strategy", r.std_strategy),
        ("impact_source", r.impact_source),
        ("std_source", r.std_source),
    ] {
        w.write_record([k, &v.to_string()])?;
    }
    w.flush()?;
    eprintln!(
        "{} source(s) × {} strateg(ies) × {} test case(s)",
        sources.len(),
        strategies.len(),
        table.testcases.len()
    );
    Ok(())
}
