use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::shuffle::shuffle;
use crate::corpus_io::Corpus;
use crate::error::{Error, Result};

/// Train/test/tune proportions as integer weights plus the shuffle seed.
/// Fractions are `weight / sum(weights)`, so they always sum to exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub weights: [u64; 3],
    pub seed: u64,
}

pub const MIN_SPLIT_SENTENCES: usize = 3;

impl SplitSpec {
    pub fn new(train: u64, test: u64, tune: u64, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            weights: [train, test, tune],
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// 70% train, 15% test, 15% tune.
    pub fn seventy_fifteen_fifteen(seed: u64) -> Self {
        SplitSpec {
            weights: [70, 15, 15],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().all(|w| *w == 0) {
            return Err(Error::InvalidSplit("all fractions are zero".into()));
        }
        if self.weights.iter().try_fold(0u64, |acc, w| acc.checked_add(*w)).is_none() {
            return Err(Error::InvalidSplit("weights overflow".into()));
        }
        Ok(())
    }

    fn total(&self) -> u128 {
        self.weights.iter().map(|w| u128::from(*w)).sum()
    }

    /// Sizes of the three parts for `n` sentences: cut points at
    /// `floor(n * train)` and `floor(n * (train + test))`, remainder to tune.
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let total = self.total();
        let n128 = n as u128;
        let first = (n128 * u128::from(self.weights[0]) / total) as usize;
        let second = (n128 * u128::from(self.weights[0] + self.weights[1]) / total) as usize;
        [first, second - first, n - second]
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.weights;
        write!(f, "{a}-{b}-{c}")
    }
}

/// Parses `70-15-15`, `70/15/15` or `0.7,0.15,0.15`. The seed is set to 0;
/// callers fill it in.
impl FromStr for SplitSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['-', '/', ',']).map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidSplit(format!("`{s}`: expected three parts")));
        }
        let decimals: Vec<(u64, u32)> = parts
            .iter()
            .map(|p| parse_decimal(p).ok_or_else(|| Error::InvalidSplit(format!("`{p}` is not a non-negative number"))))
            .collect::<Result<_>>()?;
        let scale = decimals.iter().map(|(_, d)| *d).max().unwrap_or(0);
        let mut weights = [0u64; 3];
        for (w, (digits, places)) in weights.iter_mut().zip(&decimals) {
            *w = digits
                .checked_mul(10u64.pow(scale - places))
                .ok_or_else(|| Error::InvalidSplit("too many digits".into()))?;
        }
        let spec = SplitSpec { weights, seed: 0 };
        spec.validate()?;
        Ok(spec)
    }
}

/// `"0.15"` → `(15, 2)`: the digits as an integer and the number of decimals.
fn parse_decimal(s: &str) -> Option<(u64, u32)> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 9 {
        return None;
    }
    let digits: u64 = format!("{int}{frac}").parse().ok()?;
    Some((digits, frac.len() as u32))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResult {
    pub train: Corpus,
    pub test: Corpus,
    pub tune: Corpus,
}

/// Shuffles sentences with `spec.seed` and cuts them into train/test/tune.
///
/// The three parts partition the input: every sentence lands in exactly one
/// part, so their histograms sum to the input histogram.
pub fn make_split(corpus: &Corpus, spec: &SplitSpec) -> Result<SplitResult> {
    spec.validate()?;
    let n = corpus.sentences.len();
    if n < MIN_SPLIT_SENTENCES {
        return Err(Error::TooFewSentences {
            needed: MIN_SPLIT_SENTENCES,
            found: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut order, spec.seed);
    let [train_n, test_n, _] = spec.sizes(n);
    let pick = |idx: &[usize]| idx.iter().map(|&i| corpus.sentences[i].clone()).collect::<Vec<_>>();
    let (train_idx, rest) = order.split_at(train_n);
    let (test_idx, tune_idx) = rest.split_at(test_n);
    Ok(SplitResult {
        train: corpus.with_sentences(format!("{}.train", corpus.name), pick(train_idx)),
        test: corpus.with_sentences(format!("{}.test", corpus.name), pick(test_idx)),
        tune: corpus.with_sentences(format!("{}.tune", corpus.name), pick(tune_idx)),
    })
}

/// Percentage of a train set held out as tune data when a source ships no tune split.
pub const HOLDOUT_TUNE_PERCENT: u64 = 10;

/// Splits off a seed-deterministic 10% tune set, returning `(train, tune)`.
pub fn hold_out_tune(train: &Corpus, seed: u64) -> Result<(Corpus, Corpus)> {
    let spec = SplitSpec::new(100 - HOLDOUT_TUNE_PERCENT, 0, HOLDOUT_TUNE_PERCENT, seed)?;
    let parts = make_split(train, &spec)?;
    let train_part = train.with_sentences(train.name.clone(), parts.train.sentences);
    Ok((train_part, parts.tune))
}
