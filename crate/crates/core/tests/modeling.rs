mod common;

use std::sync::OnceLock;

use candle_core::{Device, Tensor};
use common::{harmonized_fixture, sentence};
use ner_transfer::corpus_io::{Corpus, Language, Sentence};
use ner_transfer::evaluation::score;
use ner_transfer::harmonize::HARMONIZED_TAGS;
use ner_transfer::modeling::{
    align_labels, load_tagger, masked_cross_entropy, train, EncoderRegistry, FnSplitter, LabelVocabulary,
    ModelContext, SpecialIds, TrainConfig, TrainedTagger, IGNORE_ID, TINY_TEST,
};
use ner_transfer::Error;
use proptest::prelude::*;

const SPECIALS: SpecialIds = SpecialIds { cls: 1, sep: 2, pad: 0 };

fn small_config(epochs: usize) -> TrainConfig {
    let ctx = ModelContext::offline();
    let mut c = TrainConfig::defaults_for(ctx.registry.get(TINY_TEST).unwrap());
    c.epochs = epochs;
    c.seed = 11;
    c
}

fn first(c: &Corpus, n: usize) -> Corpus {
    c.with_sentences(format!("{}[..{n}]", c.name), c.sentences[..n].to_vec())
}

/// One small tagger shared by the tests that only read it.
fn shared() -> &'static (TrainedTagger, Corpus) {
    static CELL: OnceLock<(TrainedTagger, Corpus)> = OnceLock::new();
    CELL.get_or_init(|| {
        let train_set = first(&harmonized_fixture("iitb_mr.train.txt"), 80);
        let tune = harmonized_fixture("iitb_mr.tune.txt");
        let t = train(&train_set, &tune, &small_config(3), &ModelContext::offline()).unwrap();
        (t, tune)
    })
}

#[test]
fn training_is_deterministic() {
    let train_set = first(&harmonized_fixture("iitb_mr.train.txt"), 40);
    let tune = first(&harmonized_fixture("iitb_mr.tune.txt"), 20);
    let ctx = ModelContext::offline();
    let a = train(&train_set, &tune, &small_config(2), &ctx).unwrap();
    let b = train(&train_set, &tune, &small_config(2), &ctx).unwrap();
    assert_eq!(a.history(), b.history());
    assert_eq!(a.predict(&tune.sentences).unwrap(), b.predict(&tune.sentences).unwrap());
    assert_eq!(a.history().len(), 2);
    assert!(a.history().iter().all(|e| e.tune_micro_f1.is_some()));
}

#[test]
fn zero_epochs_gives_valid_untrained_tagger() {
    let train_set = first(&harmonized_fixture("iitb_mr.train.txt"), 20);
    let t = train(&train_set, &Corpus::from_sentences("none", Language::Marathi, vec![]), &small_config(0), &ModelContext::offline())
        .unwrap();
    assert!(t.history().is_empty());
    let out = t.predict(&train_set.sentences).unwrap();
    assert_eq!(out.len(), 20);
}

#[test]
fn prediction_shape_and_vocabulary() {
    let (tagger, tune) = shared();
    assert!(tagger.predict(&[]).unwrap().is_empty());
    let out = tagger.predict(&tune.sentences).unwrap();
    assert_eq!(out.len(), tune.len());
    for (s, p) in tune.sentences.iter().zip(&out) {
        assert_eq!(s.len(), p.len());
        assert!(p.iter().all(|t| HARMONIZED_TAGS.contains(&t.as_str())));
    }
    let long = Sentence::new(tune.sentences.iter().flat_map(|s| s.tokens.clone()).take(400).collect());
    assert_eq!(tagger.predict(std::slice::from_ref(&long)).unwrap()[0].len(), long.len());
}

#[test]
fn save_load_predicts_identically() {
    let (tagger, tune) = shared();
    let dir = tempfile::tempdir().unwrap();
    tagger.save(dir.path()).unwrap();
    let loaded = load_tagger(dir.path(), &EncoderRegistry::builtin()).unwrap();
    let sample = &tune.sentences[..10];
    assert_eq!(loaded.predict(sample).unwrap(), tagger.predict(sample).unwrap());
    assert_eq!(loaded.history(), tagger.history());
    assert_eq!(loaded.vocab(), tagger.vocab());
}

#[test]
fn tampered_files_are_corrupt() {
    let (tagger, _) = shared();
    for file in ["vocab.txt", "labels.txt", "weights.safetensors", "manifest.json"] {
        let dir = tempfile::tempdir().unwrap();
        tagger.save(dir.path()).unwrap();
        let path = dir.path().join(file);
        let mut bytes = std::fs::read(&path).unwrap();
        let i = bytes.len() / 2;
        bytes[i] ^= 0x01;
        std::fs::write(&path, bytes).unwrap();
        let err = load_tagger(dir.path(), &EncoderRegistry::builtin()).err().expect(file);
        assert!(matches!(err, Error::CorruptArtifact { .. }), "{file}: {err}");
    }
}

#[test]
fn registry_hash_decides_loading() {
    let (tagger, _) = shared();
    let dir = tempfile::tempdir().unwrap();
    tagger.save(dir.path()).unwrap();
    let builtin = EncoderRegistry::builtin();
    let same = EncoderRegistry::new("2", builtin.encoders().to_vec()).unwrap();
    assert!(load_tagger(dir.path(), &same).is_ok());

    let mut changed = builtin.get(TINY_TEST).unwrap().clone();
    changed.revision = Some("other".into());
    let differs = EncoderRegistry::new("3", vec![changed]).unwrap();
    assert!(matches!(load_tagger(dir.path(), &differs), Err(Error::CorruptArtifact { .. })));

    let without = EncoderRegistry::new("4", vec![]).unwrap();
    assert!(matches!(load_tagger(dir.path(), &without), Err(Error::UnknownEncoder(_))));
}

#[test]
fn pretrained_encoders_unavailable_offline() {
    let ctx = ModelContext::offline();
    assert!(ctx.check_available(TINY_TEST).is_ok());
    assert!(matches!(ctx.check_available("maha-roberta"), Err(Error::EncoderUnavailable { .. })));
    assert!(matches!(ctx.check_available("no-such"), Err(Error::UnknownEncoder(_))));
}

#[test]
fn unharmonized_input_is_rejected() {
    let raw = Corpus::from_sentences(
        "raw",
        Language::Marathi,
        vec![Sentence::from_pairs(&["पुणे"], &["B-LOCATION"])],
    );
    let err = train(&raw, &raw, &small_config(1), &ModelContext::offline()).unwrap_err();
    assert!(matches!(err, Error::SchemeMismatch(_)));
}

#[test]
fn all_ignored_batch_has_zero_loss() {
    let logits = Tensor::new(&[[[0.3f32, -1.0, 2.0], [5.0, 0.0, -4.0]]], &Device::Cpu).unwrap();
    let loss = masked_cross_entropy(&logits, &[IGNORE_ID, IGNORE_ID]).unwrap();
    assert_eq!(loss.to_scalar::<f32>().unwrap(), 0.0);
}

#[test]
fn trained_tagger_scores_above_chance() {
    let (tagger, tune) = shared();
    let r = score(tune, &tagger.predict(&tune.sentences).unwrap()).unwrap();
    assert!(r.token_accuracy > 0.5, "{}", r.token_accuracy);
}

fn splitter_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5, 64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn labels_sit_on_first_subwords(
        s in sentence(prop::sample::select(HARMONIZED_TAGS.to_vec()).prop_map(str::to_string)),
        pieces in splitter_strategy(),
        max_len in 3usize..40,
    ) {
        let vocab = LabelVocabulary::harmonized();
        // subword count of a word depends on its character count only
        let splitter = FnSplitter {
            f: move |w: &str| (0..pieces[w.chars().count() % 64]).map(|i| 10 + i as u32).collect(),
            specials: SPECIALS,
        };
        let a = align_labels(&s, &vocab, &splitter, max_len).unwrap();
        prop_assert_eq!(a.labeled_positions(), a.retained_words());
        prop_assert!(a.subword_ids.len() <= max_len);
        prop_assert_eq!(a.subword_ids.len(), a.label_ids.len());
        prop_assert_eq!(a.subword_ids[0], SPECIALS.cls);
        prop_assert_eq!(*a.subword_ids.last().unwrap(), SPECIALS.sep);
        prop_assert_eq!(a.truncated, a.retained_words() < s.len());
        prop_assert!(a.retained_words() >= 1);
        for (w, pos) in a.word_to_first_subword.iter().enumerate() {
            prop_assert_eq!(a.label_ids[*pos], vocab.id(&s.tokens[w].tag).unwrap() as i64);
        }
    }
}
