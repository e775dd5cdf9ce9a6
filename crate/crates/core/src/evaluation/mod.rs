//! Token-level scoring of predicted tag sequences and mono-vs-merged
//! comparison tables.

mod compare;
mod metrics;

pub use compare::{compare, percent, Cell, ComparisonMatrix, RegimeKind, RowKey, ScoredRun, CSV_HEADER};
pub use metrics::{confusion, score, ConfusionMatrix, MetricReport, TagMetrics, METRIC_DEFINITION};
