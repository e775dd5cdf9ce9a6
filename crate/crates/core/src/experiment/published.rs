//! Published micro-F1 scores (percent) for the seven pretrained encoders,
//! keyed by the dataset names used in `configs/paper-scale.toml`.

use crate::evaluation::RegimeKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedScore {
    pub test_dataset: &'static str,
    pub regime: RegimeKind,
    pub encoder: &'static str,
    pub micro_f1_percent: f64,
}

const ENCODERS: [&str; 7] = [
    "mbert",
    "indic-bert",
    "xlm-roberta",
    "maha-albert",
    "roberta-hindi",
    "mahabert",
    "maha-roberta",
];

/// (test dataset, regime, one score per entry of `ENCODERS`).
const PAIR_AND_MONO: [(&str, RegimeKind, [f64; 7]); 8] = [
    ("iitb", RegimeKind::MergedPair, [60.9, 63.12, 64.36, 63.05, 45.05, 65.29, 64.54]),
    ("iitb", RegimeKind::Mono, [61.45, 63.26, 60.97, 63.43, 43.27, 62.07, 64.18]),
    ("ijcnlp", RegimeKind::MergedPair, [72.7, 76.85, 80.34, 75.61, 70.02, 76.9, 81.3]),
    ("ijcnlp", RegimeKind::Mono, [75.52, 76.32, 79.71, 63.11, 70.01, 76.53, 78.67]),
    ("wikiann-mr", RegimeKind::MergedPair, [87.3, 86.86, 87.47, 86.33, 83.52, 88.58, 87.94]),
    ("wikiann-mr", RegimeKind::Mono, [86.49, 87.03, 87.38, 87.15, 82.5, 88.18, 88.9]),
    ("wikiann-hi", RegimeKind::MergedPair, [83.85, 84.26, 85.94, 83.33, 82.88, 82.83, 85.9]),
    ("wikiann-hi", RegimeKind::Mono, [81.21, 82.65, 83.04, 81.68, 80.52, 81.95, 80.66]),
];

/// Merged-all scores exist for five encoders only.
const MERGED_ALL: [(&str, [f64; 4]); 5] = [
    ("mbert", [57.59, 74.83, 85.48, 83.85]),
    ("indic-bert", [59.62, 74.64, 86.33, 83.59]),
    ("xlm-roberta", [60.73, 78.58, 86.78, 84.21]),
    ("mahabert", [62.76, 74.98, 86.98, 83.19]),
    ("maha-roberta", [64.11, 79.22, 87.17, 84.36]),
];
const MERGED_ALL_TESTS: [&str; 4] = ["iitb", "ijcnlp", "wikiann-mr", "wikiann-hi"];

pub fn published_scores() -> Vec<PublishedScore> {
    let mut out = Vec::new();
    for (test, regime, scores) in PAIR_AND_MONO {
        for (encoder, f1) in ENCODERS.iter().zip(scores) {
            out.push(PublishedScore {
                test_dataset: test,
                regime,
                encoder,
                micro_f1_percent: f1,
            });
        }
    }
    for (encoder, scores) in MERGED_ALL {
        for (test, f1) in MERGED_ALL_TESTS.iter().zip(scores) {
            out.push(PublishedScore {
                test_dataset: test,
                regime: RegimeKind::MergedAll,
                encoder,
                micro_f1_percent: f1,
            });
        }
    }
    out
}

pub fn published_score(test_dataset: &str, regime: RegimeKind, encoder: &str) -> Option<f64> {
    published_scores()
        .into_iter()
        .find(|s| s.test_dataset == test_dataset && s.regime == regime && s.encoder == encoder)
        .map(|s| s.micro_f1_percent)
}
