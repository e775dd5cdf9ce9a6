//! Shared helpers for the integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use ner_transfer::corpus_io::{parse_conll, parse_wikiann, Corpus, ExpectedCounts, Language, Sentence, Token};
use ner_transfer::harmonize::{builtin_map, harmonize, HARMONIZED_TAGS};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn expected_for(name: &str) -> ExpectedCounts {
    let stem = name.trim_end_matches(".txt");
    let f = File::open(fixture(&format!("{stem}.expected"))).unwrap();
    ExpectedCounts::parse(BufReader::new(f)).unwrap()
}

/// Reads a fixture in its native format and harmonizes it with the matching
/// built-in map.
pub fn harmonized_fixture(name: &str) -> Corpus {
    let f = BufReader::new(File::open(fixture(name)).unwrap());
    let (corpus, map) = if name.starts_with("wikiann_hi") {
        (parse_wikiann(f, name, Language::Hindi).unwrap(), "wikiann_iob")
    } else if name.starts_with("wikiann_mr") {
        (parse_wikiann(f, name, Language::Marathi).unwrap(), "wikiann_iob")
    } else if name.starts_with("ijcnlp") {
        (parse_conll(f, name, Language::Hindi).unwrap(), "ijcnlp_flat")
    } else {
        (parse_conll(f, name, Language::Marathi).unwrap(), "iitb_iob")
    };
    harmonize(&corpus, &builtin_map(map).unwrap()).unwrap()
}

/// Tokens drawn from Devanagari, Latin, digits and a few awkward code points;
/// never empty and never containing whitespace.
pub fn token_text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            (0x0900u32..0x097F).prop_map(|c| char::from_u32(c).unwrap()),
            prop::char::range('a', 'z'),
            prop::char::range('0', '9'),
            Just('é'),
            Just('।'),
            Just('😀'),
            Just(':'),
            Just('-'),
        ],
        1..8,
    )
    .prop_map(|cs| cs.into_iter().collect())
}

pub fn harmonized_tag() -> impl Strategy<Value = String> {
    prop::sample::select(HARMONIZED_TAGS.to_vec()).prop_map(str::to_string)
}

pub fn sentence(tag: impl Strategy<Value = String>) -> impl Strategy<Value = Sentence> {
    prop::collection::vec((token_text(), tag), 1..20)
        .prop_map(|pairs| Sentence::new(pairs.into_iter().map(|(w, t)| Token::new(w, t)).collect()))
}

pub fn harmonized_corpus(sentences: std::ops::Range<usize>) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(sentence(harmonized_tag()), sentences)
        .prop_map(|s| Corpus::from_sentences("random", Language::Marathi, s))
}

/// Per-tag counts by direct iteration, independent of `tag_histogram`.
pub fn count_tags(corpus: &Corpus) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for s in &corpus.sentences {
        for t in &s.tokens {
            *out.entry(t.tag.clone()).or_insert(0) += 1;
        }
    }
    out
}

/// Brute-force token-level scoring: for each entity tag, walk every token
/// and classify it as TP, FP or FN from its (gold, predicted) pair.
pub struct OracleScores {
    pub per_tag: BTreeMap<&'static str, (f64, f64, f64)>,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
}

pub fn oracle_score(gold: &[Vec<String>], predicted: &[Vec<String>]) -> OracleScores {
    let prf = |tp: f64, fp: f64, fn_: f64| {
        let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let r = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        (p, r, f)
    };
    let mut per_tag = BTreeMap::new();
    let (mut all_tp, mut all_fp, mut all_fn) = (0.0, 0.0, 0.0);
    for tag in ["NEP", "NEO", "NEL"] {
        let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
        for (gs, ps) in gold.iter().zip(predicted) {
            for (g, p) in gs.iter().zip(ps) {
                if g == tag && p == tag {
                    tp += 1.0;
                }
                if g != tag && p == tag {
                    fp += 1.0;
                }
                if g == tag && p != tag {
                    fn_ += 1.0;
                }
            }
        }
        all_tp += tp;
        all_fp += fp;
        all_fn += fn_;
        per_tag.insert(tag, prf(tp, fp, fn_));
    }
    let macro_f1 = per_tag.values().map(|v| v.2).sum::<f64>() / 3.0;
    let (mut same, mut total) = (0.0, 0.0);
    for (gs, ps) in gold.iter().zip(predicted) {
        for (g, p) in gs.iter().zip(ps) {
            total += 1.0;
            if g == p {
                same += 1.0;
            }
        }
    }
    OracleScores {
        per_tag,
        micro_f1: prf(all_tp, all_fp, all_fn).2,
        macro_f1,
        accuracy: if total > 0.0 { same / total } else { 0.0 },
    }
}
