mod common;

use common::{harmonized_tag, oracle_score};
use ner_transfer::corpus_io::{Corpus, Language, Sentence, Token};
use ner_transfer::evaluation::{compare, confusion, percent, score, RegimeKind, ScoredRun, CSV_HEADER};
use ner_transfer::Error;
use proptest::prelude::*;

fn corpus(tags: &[Vec<String>]) -> Corpus {
    let sentences = tags
        .iter()
        .map(|s| Sentence::new(s.iter().enumerate().map(|(i, t)| Token::new(format!("w{i}"), t)).collect()))
        .collect();
    Corpus::from_sentences("gold", Language::Hindi, sentences)
}

/// Gold and predicted tag sequences of the same shape, at most 200 tokens.
fn pair() -> impl Strategy<Value = (Vec<Vec<String>>, Vec<Vec<String>>)> {
    prop::collection::vec(1usize..20, 1..10)
        .prop_flat_map(|lens| {
            let gold: Vec<_> = lens.iter().map(|n| prop::collection::vec(harmonized_tag(), *n)).collect();
            let pred: Vec<_> = lens.iter().map(|n| prop::collection::vec(harmonized_tag(), *n)).collect();
            (gold, pred)
        })
}

#[test]
fn hand_worked_two_thirds() {
    let gold = corpus(&[vec!["NEP".into(), "O".into(), "NEL".into()]]);
    let r = score(&gold, &[vec!["NEP", "O", "O"]]).unwrap();
    assert_eq!(r.micro_f1, 2.0 / 3.0);
    let nep = &r.per_tag["NEP"];
    assert_eq!((nep.precision, nep.recall), (1.0, 1.0));
    let nel = &r.per_tag["NEL"];
    assert_eq!((nel.precision, nel.recall), (0.0, 0.0));
    assert!(nel.zero_division);
    assert_eq!((r.micro.true_positives, r.micro.false_positives, r.micro.false_negatives), (1, 0, 1));
}

#[test]
fn all_outside_is_zero_support() {
    let gold = corpus(&[vec!["O".into(), "O".into()]]);
    let r = score(&gold, &[vec!["O", "O"]]).unwrap();
    assert_eq!(r.micro_f1, 0.0);
    assert!(r.zero_support);
    assert_eq!(r.token_accuracy, 1.0);
}

#[test]
fn shape_mismatch_is_an_error() {
    let gold = corpus(&[vec!["O".into(), "NEP".into()]]);
    assert!(matches!(score(&gold, &[vec!["O"]]), Err(Error::ShapeMismatch(_))));
    assert!(matches!(score::<&str>(&gold, &[]), Err(Error::ShapeMismatch(_))));
}

#[test]
fn single_token_confusion() {
    let gold = corpus(&[vec!["NEL".into()]]);
    let m = confusion(&gold, &[vec!["NEO"]]).unwrap();
    assert_eq!(m.total(), 1);
    assert_eq!(m.get("NEL", "NEO"), 1);
}

fn scored(id: &str, enc: &str, regime: RegimeKind, label: &str, f1: f64) -> ScoredRun {
    ScoredRun {
        run_id: id.into(),
        encoder: enc.into(),
        regime,
        regime_label: label.into(),
        test_dataset: "iitb".into(),
        micro_f1: f1,
        macro_f1: f1 - 0.01,
        token_accuracy: 0.95,
    }
}

#[test]
fn csv_round_trip() {
    let runs = [
        scored("r1", "mahabert", RegimeKind::Mono, "mono(iitb)", 0.6207),
        scored("r2", "mahabert", RegimeKind::MergedPair, "merged-pair(ijcnlp+iitb)", 0.6529),
        scored("r3", "mbert", RegimeKind::Mono, "mono(iitb)", 0.5912),
    ];
    let text = compare(&runs).unwrap().render_csv(&["note".into()]).unwrap();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), runs.len());
    for run in &runs {
        let row = rows.iter().find(|r| &r[8] == run.run_id.as_str()).unwrap();
        assert_eq!(&row[1], run.regime_label.as_str());
        assert_eq!(&row[2], run.encoder.as_str());
        assert_eq!(&row[3], percent(run.micro_f1).as_str());
        assert_eq!(&row[6], run.regime.name());
    }
    let best: Vec<&str> = rows.iter().filter(|r| &r[7] == "true").map(|r| &r[8]).collect();
    assert_eq!(best, ["r2", "r1"]);
}

#[test]
fn duplicate_cell_rejected() {
    let runs = [
        scored("a", "mbert", RegimeKind::Mono, "mono(iitb)", 0.5),
        scored("b", "mbert", RegimeKind::Mono, "mono(iitb)", 0.6),
    ];
    assert!(matches!(compare(&runs), Err(Error::DuplicateCell { .. })));
}

#[test]
fn empty_grid_renders_header_only() {
    let m = compare(&[]).unwrap();
    assert!(m.is_empty());
    assert_eq!(m.render_csv(&["x".into()]).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    assert_eq!(m.render_text(&["x".into()]).lines().count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matches_oracle((gold, pred) in pair()) {
        let r = score(&corpus(&gold), &pred).unwrap();
        let o = oracle_score(&gold, &pred);
        prop_assert!((r.micro_f1 - o.micro_f1).abs() <= 1e-12);
        prop_assert!((r.macro_f1 - o.macro_f1).abs() <= 1e-12);
        prop_assert!((r.token_accuracy - o.accuracy).abs() <= 1e-12);
        for (tag, (p, rc, f)) in &o.per_tag {
            let m = &r.per_tag[*tag];
            prop_assert!((m.precision - p).abs() <= 1e-12);
            prop_assert!((m.recall - rc).abs() <= 1e-12);
            prop_assert!((m.f1 - f).abs() <= 1e-12);
        }
    }

    #[test]
    fn perfect_prediction((gold, _) in pair()) {
        let r = score(&corpus(&gold), &gold).unwrap();
        prop_assert_eq!(r.token_accuracy, 1.0);
        prop_assert_eq!(r.micro_f1, if r.zero_support { 0.0 } else { 1.0 });
        prop_assert!(confusion(&corpus(&gold), &gold).unwrap().is_diagonal());
    }

    #[test]
    fn sentence_order_does_not_matter((gold, pred) in pair(), rot in 0usize..10) {
        let n = gold.len();
        let mut g2 = gold.clone();
        let mut p2 = pred.clone();
        g2.rotate_left(rot % n);
        p2.rotate_left(rot % n);
        g2.reverse();
        p2.reverse();
        let a = score(&corpus(&gold), &pred).unwrap();
        let b = score(&corpus(&g2), &p2).unwrap();
        prop_assert_eq!(a.micro_f1, b.micro_f1);
        prop_assert_eq!(a.macro_f1, b.macro_f1);
        prop_assert_eq!(a.token_accuracy, b.token_accuracy);
    }

    #[test]
    fn confusion_margins((gold, pred) in pair()) {
        let m = confusion(&corpus(&gold), &pred).unwrap();
        let tokens: usize = gold.iter().map(Vec::len).sum();
        prop_assert_eq!(m.total(), tokens);
        prop_assert_eq!(m.row_sums().values().sum::<usize>(), tokens);
        prop_assert_eq!(m.column_sums().values().sum::<usize>(), tokens);
    }
}
