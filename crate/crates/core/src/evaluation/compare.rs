use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a training set was assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegimeKind {
    /// Union of one Hindi and one Marathi corpus.
    #[serde(rename = "merged-pair")]
    MergedPair,
    /// Union of every corpus.
    #[serde(rename = "merged-all")]
    MergedAll,
    /// A single corpus.
    #[serde(rename = "mono")]
    Mono,
}

impl RegimeKind {
    pub fn name(self) -> &'static str {
        match self {
            RegimeKind::Mono => "mono",
            RegimeKind::MergedPair => "merged-pair",
            RegimeKind::MergedAll => "merged-all",
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegimeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mono" => Ok(RegimeKind::Mono),
            "merged-pair" => Ok(RegimeKind::MergedPair),
            "merged-all" => Ok(RegimeKind::MergedAll),
            other => Err(Error::Experiment(format!("unknown regime kind `{other}`"))),
        }
    }
}

/// One evaluated (encoder, regime, test set) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRun {
    pub run_id: String,
    pub encoder: String,
    pub regime: RegimeKind,
    /// Distinguishes regimes of the same kind, e.g. `merged-pair(ijcnlp+iitb)`.
    pub regime_label: String,
    pub test_dataset: String,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub token_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RowKey {
    pub test_dataset: String,
    pub regime: RegimeKind,
    pub regime_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub run_id: String,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub token_accuracy: f64,
    /// Highest micro F1 in its row (ties all flagged).
    pub best: bool,
}

/// Rows are (test set, training regime), columns encoders. Absent cells stay
/// absent rather than defaulting to zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComparisonMatrix {
    pub rows: Vec<RowKey>,
    pub columns: Vec<String>,
    cells: BTreeMap<(usize, usize), Cell>,
}

pub fn compare(runs: &[ScoredRun]) -> Result<ComparisonMatrix> {
    let mut by_key: BTreeMap<(RowKey, String), &ScoredRun> = BTreeMap::new();
    for run in runs {
        let row = RowKey {
            test_dataset: run.test_dataset.clone(),
            regime: run.regime,
            regime_label: run.regime_label.clone(),
        };
        if by_key.insert((row, run.encoder.clone()), run).is_some() {
            return Err(Error::DuplicateCell {
                test_dataset: run.test_dataset.clone(),
                regime: run.regime_label.clone(),
                encoder: run.encoder.clone(),
            });
        }
    }
    let mut rows: Vec<RowKey> = by_key.keys().map(|(r, _)| r.clone()).collect();
    rows.dedup();
    let mut columns: Vec<String> = by_key.keys().map(|(_, e)| e.clone()).collect();
    columns.sort();
    columns.dedup();

    let mut cells = BTreeMap::new();
    for ((row, encoder), run) in &by_key {
        let r = rows.binary_search(row).expect("row collected above");
        let c = columns.binary_search(encoder).expect("column collected above");
        cells.insert(
            (r, c),
            Cell {
                run_id: run.run_id.clone(),
                micro_f1: run.micro_f1,
                macro_f1: run.macro_f1,
                token_accuracy: run.token_accuracy,
                best: false,
            },
        );
    }
    for r in 0..rows.len() {
        let best = cells
            .range((r, 0)..(r + 1, 0))
            .map(|(_, cell)| cell.micro_f1)
            .fold(f64::NEG_INFINITY, f64::max);
        for (_, cell) in cells.range_mut((r, 0)..(r + 1, 0)) {
            cell.best = cell.micro_f1 == best;
        }
    }
    Ok(ComparisonMatrix { rows, columns, cells })
}

/// A fraction as a percentage with two decimals.
pub fn percent(value: f64) -> String {
    format!("{:.2}", value * 100.0)
}

pub const CSV_HEADER: [&str; 9] = [
    "test_dataset",
    "regime",
    "encoder",
    "micro_f1",
    "macro_f1",
    "token_accuracy",
    "regime_kind",
    "best",
    "run_id",
];

impl ComparisonMatrix {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, row: usize, column: usize) -> Option<&Cell> {
        self.cells.get(&(row, column))
    }

    pub fn find(&self, test_dataset: &str, regime_label: &str, encoder: &str) -> Option<&Cell> {
        let r = self
            .rows
            .iter()
            .position(|k| k.test_dataset == test_dataset && k.regime_label == regime_label)?;
        let c = self.columns.iter().position(|e| e == encoder)?;
        self.cell(r, c)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&RowKey, &str, &Cell)> {
        self.cells
            .iter()
            .map(|((r, c), cell)| (&self.rows[*r], self.columns[*c].as_str(), cell))
    }

    /// Aligned plain-text table of micro F1 percentages. `*` marks the best
    /// cell of each row, `-` an absent cell. Footer lines follow the table.
    pub fn render_text(&self, footer: &[String]) -> String {
        let mut header = vec!["test_dataset".to_string(), "regime".to_string()];
        header.extend(self.columns.iter().cloned());
        let mut lines = vec![header];
        for (r, row) in self.rows.iter().enumerate() {
            let mut line = vec![row.test_dataset.clone(), row.regime_label.clone()];
            for c in 0..self.columns.len() {
                line.push(match self.cell(r, c) {
                    Some(cell) if cell.best => format!("{}*", percent(cell.micro_f1)),
                    Some(cell) => percent(cell.micro_f1),
                    None => "-".to_string(),
                });
            }
            lines.push(line);
        }
        let widths: Vec<usize> = (0..lines[0].len())
            .map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in &lines {
            let mut text = String::new();
            for (i, field) in line.iter().enumerate() {
                if i > 0 {
                    text.push_str("  ");
                }
                let pad = widths[i] - field.chars().count();
                if i < 2 {
                    text.push_str(field);
                    text.extend(std::iter::repeat_n(' ', pad));
                } else {
                    text.extend(std::iter::repeat_n(' ', pad));
                    text.push_str(field);
                }
            }
            let _ = writeln!(out, "{}", text.trim_end());
        }
        if !self.is_empty() {
            for f in footer {
                let _ = writeln!(out, "{f}");
            }
        }
        out
    }

    /// One CSV line per cell under [`CSV_HEADER`]. Footer lines are written
    /// as `#` comments.
    pub fn render_csv(&self, footer: &[String]) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER)?;
        for (row, encoder, cell) in self.cells() {
            writer.write_record([
                row.test_dataset.as_str(),
                row.regime_label.as_str(),
                encoder,
                &percent(cell.micro_f1),
                &percent(cell.macro_f1),
                &percent(cell.token_accuracy),
                row.regime.name(),
                if cell.best { "true" } else { "false" },
                cell.run_id.as_str(),
            ])?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        let mut out = String::from_utf8(bytes).expect("csv output is UTF-8");
        if !self.is_empty() {
            for f in footer {
                let _ = writeln!(out, "# {f}");
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(id: &str, enc: &str, regime: RegimeKind, label: &str, test: &str, f1: f64) -> ScoredRun {
        ScoredRun {
            run_id: id.into(),
            encoder: enc.into(),
            regime,
            regime_label: label.into(),
            test_dataset: test.into(),
            micro_f1: f1,
            macro_f1: f1,
            token_accuracy: 0.9,
        }
    }

    #[test]
    fn mono_vs_merged_block() {
        let runs = [
            run("a", "mahabert", RegimeKind::Mono, "mono(iitb)", "iitb", 0.6207),
            run("b", "mahabert", RegimeKind::MergedPair, "merged-pair(ijcnlp+iitb)", "iitb", 0.6529),
        ];
        let m = compare(&runs).unwrap();
        assert_eq!(m.rows.len(), 2);
        assert_eq!(m.columns, ["mahabert"]);
        assert_eq!(m.rows[0].regime, RegimeKind::MergedPair);
        assert_eq!(percent(m.cell(0, 0).unwrap().micro_f1), "65.29");
        assert_eq!(percent(m.cell(1, 0).unwrap().micro_f1), "62.07");
        assert!(m.find("iitb", "mono(iitb)", "mahabert").is_some());
    }

    #[test]
    fn best_flag_and_missing_cells() {
        let runs = [
            run("a", "x", RegimeKind::Mono, "mono(d)", "d", 0.5),
            run("b", "y", RegimeKind::Mono, "mono(d)", "d", 0.7),
            run("c", "y", RegimeKind::MergedAll, "merged-all(d+e)", "d", 0.4),
        ];
        let m = compare(&runs).unwrap();
        let mono = m.rows.iter().position(|r| r.regime == RegimeKind::Mono).unwrap();
        assert!(!m.cell(mono, 0).unwrap().best);
        assert!(m.cell(mono, 1).unwrap().best);
        let all = 1 - mono;
        assert!(m.cell(all, 0).is_none());
        let text = m.render_text(&[]);
        assert!(text.contains("70.00*"), "{text}");
        assert!(text.contains(" -"), "{text}");
    }

    #[test]
    fn empty_and_duplicates() {
        let m = compare(&[]).unwrap();
        assert!(m.is_empty());
        assert_eq!(m.render_csv(&["x".into()]).unwrap().lines().count(), 1);
        let r = run("a", "x", RegimeKind::Mono, "mono(d)", "d", 0.5);
        let err = compare(&[r.clone(), r]).unwrap_err();
        assert!(matches!(err, Error::DuplicateCell { .. }));
    }
}
