//! CSV renderings of evaluation results.

use std::io::Write;

use super::{aggregate, prf, Aggregation, ConfusionCounts, SignificanceMatrix, ZeroDivision};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub config: String,
    pub testcase: String,
    pub counts: ConfusionCounts,
}

/// One row per (config, testcase), then one summary row per config and
/// aggregation mode with `testcase` set to the mode name. Configs keep their
/// first-appearance order.
pub fn write_report_csv<W: Write>(
    rows: &[ReportRow],
    modes: &[Aggregation],
    zd: ZeroDivision,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["config", "testcase", "tp", "fp", "fn", "precision", "recall", "f1"])?;
    let mut write = |config: &str, testcase: &str, c: ConfusionCounts, p: super::Prf| {
        w.write_record([
            config.to_string(),
            testcase.to_string(),
            c.tp.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            p.precision.to_string(),
            p.recall.to_string(),
            p.f1.to_string(),
        ])
    };
    let mut configs: Vec<&str> = Vec::new();
    for r in rows {
        write(&r.config, &r.testcase, r.counts, prf(r.counts, zd))?;
        if !configs.contains(&r.config.as_str()) {
            configs.push(&r.config);
        }
    }
    for config in configs {
        let per: Vec<ConfusionCounts> = rows.iter().filter(|r| r.config == config).map(|r| r.counts).collect();
        let total = per.iter().copied().fold(ConfusionCounts::default(), |a, b| a + b);
        for &mode in modes {
            write(config, &mode.to_string(), total, aggregate(&per, mode, zd))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Header row and first column carry the configuration names.
pub fn write_matrix_csv<W: Write>(m: &SignificanceMatrix, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["config".to_string()];
    header.extend(m.names.iter().cloned());
    w.write_record(&header)?;
    for (name, row) in m.names.iter().zip(&m.counts) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(|c| c.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
