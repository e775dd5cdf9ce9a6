mod common;

use std::collections::BTreeMap;

use common::{count_tags, harmonized_corpus, harmonized_fixture};
use ner_transfer::corpus_io::{Corpus, Language, Sentence};
use ner_transfer::harmonize::{
    builtin_map, builtin_maps, hold_out_tune, is_harmonized_tag, make_split, merge_corpora, strip_iob, SplitSpec,
    TagMap, IJCNLP_FLAT,
};
use ner_transfer::synthetic::synthetic_corpus;
use ner_transfer::Error;
use proptest::prelude::*;

fn multiset(corpora: &[&Corpus]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for c in corpora {
        for s in &c.sentences {
            *out.entry(format!("{:?}", s.tokens)).or_insert(0) += 1;
        }
    }
    out
}

#[test]
fn builtin_targets_are_harmonized() {
    for (name, map) in builtin_maps() {
        for (_, target) in map.entries() {
            assert!(is_harmonized_tag(target), "{name}");
        }
    }
    let ijcnlp = builtin_map(IJCNLP_FLAT).unwrap();
    for t in ["NETI", "NETE", "NEA", "NED", "NEM", "NEN", "NETO"] {
        assert_eq!(ijcnlp.get(t), Some("O"));
    }
}

#[test]
fn iob_spans_collapse() {
    let c = Corpus::from_sentences(
        "x",
        Language::Hindi,
        vec![Sentence::from_pairs(&["नई", "दिल्ली", "में"], &["B-LOC", "I-LOC", "O"])],
    );
    let out = strip_iob(&c, &builtin_map("wikiann_iob").unwrap()).unwrap();
    assert_eq!(out.sentences[0].tags().collect::<Vec<_>>(), ["NEL", "NEL", "O"]);
}

#[test]
fn unmapped_flat_tag_without_default() {
    let map = TagMap::new([("NEP", "NEP"), ("O", "O")], None).unwrap();
    let c = Corpus::from_sentences("x", Language::Hindi, vec![Sentence::from_pairs(&["a"], &["NEX"])]);
    let err = ner_transfer::harmonize::apply_tag_map(&c, &map).unwrap_err();
    assert!(matches!(err, Error::UnmappedTag(t) if t == "NEX"));
}

#[test]
fn split_sizes_use_floor() {
    let spec = SplitSpec::seventy_fifteen_fifteen(0);
    assert_eq!(spec.sizes(11400), [7980, 1710, 1710]);
}

#[test]
fn ijcnlp_plus_iitb_sized_merge() {
    let hi = synthetic_corpus("hi", Language::Hindi, 7979, 1);
    let mr = synthetic_corpus("mr", Language::Marathi, 3588, 2);
    let merged = merge_corpora(&[hi, mr], 5).unwrap();
    assert_eq!(merged.len(), 11567);
    assert_eq!(merged.language, Language::Mixed);
}

#[test]
fn fixture_merge_is_additive() {
    let a = harmonized_fixture("iitb_mr.train.txt");
    let b = harmonized_fixture("ijcnlp_hi.train.txt");
    let m = merge_corpora(&[a.clone(), b.clone()], 3).unwrap();
    let mut want = count_tags(&a);
    for (k, v) in count_tags(&b) {
        *want.entry(k).or_default() += v;
    }
    assert_eq!(count_tags(&m), want);
    assert_eq!(multiset(&[&m]), multiset(&[&a, &b]));
}

#[test]
fn holdout_is_ten_percent() {
    let c = harmonized_fixture("iitb_mr.train.txt");
    let (train, tune) = hold_out_tune(&c, 4).unwrap();
    assert_eq!((train.len(), tune.len()), (180, 20));
    assert_eq!(multiset(&[&train, &tune]), multiset(&[&c]));
}

#[test]
fn tiny_corpus_cannot_split() {
    let c = Corpus::from_sentences("x", Language::Hindi, vec![Sentence::from_pairs(&["a"], &["O"])]);
    assert!(matches!(
        make_split(&c, &SplitSpec::seventy_fifteen_fifteen(0)),
        Err(Error::TooFewSentences { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn split_partitions_exactly(c in harmonized_corpus(3..60), seed in any::<u64>()) {
        let spec = SplitSpec::seventy_fifteen_fifteen(seed);
        let r = make_split(&c, &spec).unwrap();
        let sizes = spec.sizes(c.len());
        prop_assert_eq!([r.train.len(), r.test.len(), r.tune.len()], sizes);
        prop_assert_eq!(multiset(&[&r.train, &r.test, &r.tune]), multiset(&[&c]));
        let again = make_split(&c, &spec).unwrap();
        prop_assert!(again.train.same_sentences(&r.train) && again.tune.same_sentences(&r.tune));
    }

    #[test]
    fn merge_is_additive(a in harmonized_corpus(1..30), b in harmonized_corpus(1..30), seed in any::<u64>()) {
        let m = merge_corpora(&[a.clone(), b.clone()], seed).unwrap();
        prop_assert_eq!(m.len(), a.len() + b.len());
        let mut want = count_tags(&a);
        for (k, v) in count_tags(&b) {
            *want.entry(k).or_default() += v;
        }
        prop_assert_eq!(count_tags(&m), want);
        prop_assert_eq!(multiset(&[&m]), multiset(&[&a, &b]));
        let again = merge_corpora(&[a, b], seed).unwrap();
        prop_assert!(again.same_sentences(&m));
    }

    #[test]
    fn singleton_merge_permutes(a in harmonized_corpus(1..30), seed in any::<u64>()) {
        let m = merge_corpora(std::slice::from_ref(&a), seed).unwrap();
        prop_assert_eq!(multiset(&[&m]), multiset(&[&a]));
    }
}
