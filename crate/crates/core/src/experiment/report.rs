use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use super::published::published_score;
use super::store::RunRecord;
use crate::error::{Error, Result};
use crate::evaluation::{compare, percent, ScoredRun, METRIC_DEFINITION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportStyle {
    #[default]
    Text,
    Csv,
}

impl FromStr for ReportStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportStyle::Text),
            "csv" => Ok(ReportStyle::Csv),
            other => Err(Error::Experiment(format!("unknown report style `{other}`"))),
        }
    }
}

const CAVEAT: &str = "one training run per cell; differences under one point may be seed noise";

fn footer(records: &[RunRecord]) -> Vec<String> {
    let mut lines = vec![format!("metric: {METRIC_DEFINITION}"), format!("caveat: {CAVEAT}")];
    let configs: BTreeSet<(&str, &str)> = records
        .iter()
        .map(|r| (r.snapshot.experiment.as_str(), r.snapshot.config_fingerprint.as_str()))
        .collect();
    for (name, fp) in configs {
        lines.push(format!("config {name}: {fp}"));
    }
    lines
}

/// Mono-vs-merged table of micro F1 (percent) with regimes as rows and
/// encoders as columns, followed by the metric definition and the
/// fingerprints of the configs the records came from.
pub fn render_report(records: &[RunRecord], style: ReportStyle) -> Result<String> {
    let scored: Vec<ScoredRun> = records.iter().map(RunRecord::scored).collect();
    let matrix = compare(&scored)?;
    let footer = footer(records);
    match style {
        ReportStyle::Text => Ok(matrix.render_text(&footer)),
        ReportStyle::Csv => matrix.render_csv(&footer),
    }
}

/// Measured cells next to the published score for the same cell, where one
/// exists.
pub fn render_published_comparison(records: &[RunRecord]) -> String {
    let mut out = String::from("test_dataset\tregime\tencoder\tmeasured\tpublished\tdelta\n");
    for r in records {
        let Some(published) = published_score(&r.test_dataset, r.regime, &r.encoder) else {
            continue;
        };
        let measured = r.metrics.micro_f1 * 100.0;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{published:.2}\t{:+.2}",
            r.test_dataset,
            r.regime_label,
            r.encoder,
            percent(r.metrics.micro_f1),
            measured - published
        );
    }
    out
}
