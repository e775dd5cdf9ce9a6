use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus_io::Corpus;
use crate::error::{Error, Result};
use crate::harmonize::ENTITY_TAGS;

/// Names the headline metric in every report.
pub const METRIC_DEFINITION: &str =
    "token-level micro F1 over entity tags {NEP, NEO, NEL}; O is never a positive class";

/// Precision, recall and F1 for one tag. `zero_division` is set when a
/// denominator was zero and the affected value was reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TagMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub zero_division: bool,
}

impl TagMetrics {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let (precision, p_zero) = ratio(tp, tp + fp);
        let (recall, r_zero) = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        TagMetrics {
            precision,
            recall,
            f1,
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            zero_division: p_zero || r_zero,
        }
    }
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub per_tag: BTreeMap<String, TagMetrics>,
    pub micro: TagMetrics,
    pub micro_f1: f64,
    /// Unweighted mean of the three entity-tag F1 scores.
    pub macro_f1: f64,
    /// Over every token, `O` included.
    pub token_accuracy: f64,
    /// Gold count per entity tag.
    pub support: BTreeMap<String, usize>,
    pub tokens: usize,
    /// No gold entity tokens at all; `micro_f1` is 0 by convention.
    pub zero_support: bool,
}

pub(crate) fn check_shape<S: AsRef<str>>(gold: &Corpus, predicted: &[Vec<S>]) -> Result<()> {
    if gold.sentences.len() != predicted.len() {
        return Err(Error::ShapeMismatch(format!(
            "gold has {} sentences, prediction has {}",
            gold.sentences.len(),
            predicted.len()
        )));
    }
    for (i, (g, p)) in gold.sentences.iter().zip(predicted).enumerate() {
        if g.len() != p.len() {
            return Err(Error::ShapeMismatch(format!(
                "sentence {i}: gold has {} tokens, prediction has {}",
                g.len(),
                p.len()
            )));
        }
    }
    Ok(())
}

/// Scores predicted tags against gold, token by token.
pub fn score<S: AsRef<str>>(gold: &Corpus, predicted: &[Vec<S>]) -> Result<MetricReport> {
    check_shape(gold, predicted)?;
    let mut counts = [[0usize; 3]; ENTITY_TAGS.len()];
    let mut correct = 0usize;
    let mut tokens = 0usize;
    let index = |tag: &str| ENTITY_TAGS.iter().position(|t| *t == tag);
    let pairs = gold
        .sentences
        .iter()
        .zip(predicted)
        .flat_map(|(g, p)| g.tags().zip(p.iter().map(AsRef::as_ref)));
    for (g, p) in pairs {
        tokens += 1;
        if g == p {
            correct += 1;
        }
        match (index(g), index(p)) {
            (Some(gi), Some(pi)) if gi == pi => counts[gi][0] += 1,
            (gi, pi) => {
                if let Some(pi) = pi {
                    counts[pi][1] += 1;
                }
                if let Some(gi) = gi {
                    counts[gi][2] += 1;
                }
            }
        }
    }

    let mut per_tag = BTreeMap::new();
    let mut support = BTreeMap::new();
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (tag, [t, f, n]) in ENTITY_TAGS.iter().zip(counts) {
        per_tag.insert(tag.to_string(), TagMetrics::from_counts(t, f, n));
        support.insert(tag.to_string(), t + n);
        tp += t;
        fp += f;
        fn_ += n;
    }
    let micro = TagMetrics::from_counts(tp, fp, fn_);
    let macro_f1 = per_tag.values().map(|m| m.f1).sum::<f64>() / ENTITY_TAGS.len() as f64;
    Ok(MetricReport {
        per_tag,
        micro,
        micro_f1: micro.f1,
        macro_f1,
        token_accuracy: ratio(correct, tokens).0,
        support,
        tokens,
        zero_support: tp + fn_ == 0,
    })
}

/// Counts of (gold tag, predicted tag) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: BTreeMap<(String, String), usize>,
}

impl ConfusionMatrix {
    pub fn get(&self, gold: &str, predicted: &str) -> usize {
        self.counts
            .get(&(gold.to_string(), predicted.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Per gold tag; equals the gold tag histogram.
    pub fn row_sums(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for ((g, _), n) in &self.counts {
            *out.entry(g.clone()).or_default() += n;
        }
        out
    }

    /// Per predicted tag.
    pub fn column_sums(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for ((_, p), n) in &self.counts {
            *out.entry(p.clone()).or_default() += n;
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.counts.iter().all(|((g, p), n)| g == p || *n == 0)
    }
}

pub fn confusion<S: AsRef<str>>(gold: &Corpus, predicted: &[Vec<S>]) -> Result<ConfusionMatrix> {
    check_shape(gold, predicted)?;
    let mut counts = BTreeMap::new();
    for (g, p) in gold.sentences.iter().zip(predicted) {
        for (gt, pt) in g.tags().zip(p) {
            *counts
                .entry((gt.to_string(), pt.as_ref().to_string()))
                .or_default() += 1;
        }
    }
    Ok(ConfusionMatrix { counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::{Language, Sentence};

    fn gold(tags: &[&[&str]]) -> Corpus {
        let s = tags
            .iter()
            .map(|t| {
                let w: Vec<String> = (0..t.len()).map(|i| format!("w{i}")).collect();
                Sentence::from_pairs(&w, t)
            })
            .collect();
        Corpus::from_sentences("g", Language::Hindi, s)
    }

    #[test]
    fn perfect() {
        let g = gold(&[&["NEP", "O", "NEL"]]);
        let r = score(&g, &[vec!["NEP", "O", "NEL"]]).unwrap();
        assert_eq!(r.micro_f1, 1.0);
        assert_eq!(r.token_accuracy, 1.0);
        assert!(!r.zero_support);
    }

    #[test]
    fn hand_worked_two_thirds() {
        let g = gold(&[&["NEP", "O", "NEL"]]);
        let r = score(&g, &[vec!["NEP", "O", "O"]]).unwrap();
        let nep = r.per_tag["NEP"];
        assert_eq!((nep.precision, nep.recall, nep.f1), (1.0, 1.0, 1.0));
        let nel = r.per_tag["NEL"];
        assert_eq!((nel.precision, nel.recall, nel.f1), (0.0, 0.0, 0.0));
        assert!(nel.zero_division);
        assert_eq!(
            (r.micro.true_positives, r.micro.false_positives, r.micro.false_negatives),
            (1, 0, 1)
        );
        assert_eq!(r.micro_f1, 2.0 / 3.0);
        assert_eq!(r.support["NEL"], 1);
    }

    #[test]
    fn all_outside() {
        let g = gold(&[&["O", "O"]]);
        let r = score(&g, &[vec!["O", "O"]]).unwrap();
        assert_eq!(r.micro_f1, 0.0);
        assert!(r.zero_support);
        assert_eq!(r.token_accuracy, 1.0);
    }

    #[test]
    fn shape_mismatch() {
        let g = gold(&[&["O", "O"]]);
        assert!(matches!(score(&g, &[vec!["O"]]), Err(Error::ShapeMismatch(_))));
        assert!(matches!(score::<&str>(&g, &[]), Err(Error::ShapeMismatch(_))));
        assert!(matches!(confusion(&g, &[vec!["O"]]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn confusion_basics() {
        let g = gold(&[&["NEP"]]);
        let m = confusion(&g, &[vec!["NEP"]]).unwrap();
        assert_eq!(m.total(), 1);
        assert_eq!(m.get("NEP", "NEP"), 1);
        assert!(m.is_diagonal());
        let g = gold(&[&["NEP", "O", "NEL"]]);
        let m = confusion(&g, &[vec!["NEP", "NEL", "O"]]).unwrap();
        assert!(!m.is_diagonal());
        assert_eq!(m.column_sums()["NEL"], 1);
        assert_eq!(m.row_sums()["O"], 1);
    }
}
