use std::sync::Arc;

use candle_core::Device;
use candle_nn::{AdamW, Optimizer, ParamsAdamW};
use serde::{Deserialize, Serialize};

use super::align::{align_labels, AlignmentResult};
use super::arch::EncoderArch;
use super::encoder::{masked_cross_entropy, pad_batch, Dropout, TokenClassifier};
use super::params::{ParamStore, Source};
use super::provider::{CheckpointProvider, LocalCacheProvider, OfflineProvider};
use super::registry::{EncoderRegistry, EncoderSpec};
use super::subword::{HfSubwords, SubwordSplitter, Subwords, WordPiece};
use super::tagger::{predict_with, TaggerParts, TokenizerFile, TrainedTagger};
use super::vocab::{LabelVocabulary, IGNORE_ID};
use crate::corpus_io::{fingerprint, Corpus};
use crate::error::{Error, Result};
use crate::evaluation::score;
use crate::harmonize::shuffle::{rng_from_seed, shuffle_with};

/// Words seen at least this often become single pieces in the `tiny-test`
/// vocabulary.
const TINY_MIN_WORD_COUNT: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    #[default]
    Constant,
    /// Linear decay from `learning_rate` to zero over all steps.
    Linear,
}

/// Fine-tuning hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub encoder: String,
    pub max_sequence_length: usize,
    /// Zero yields the untrained model.
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Dropout on the encoder output before the classification head.
    pub dropout: f64,
    pub weight_decay: f64,
    pub schedule: Schedule,
}

impl TrainConfig {
    /// Defaults for one encoder: 30 epochs at 1e-3 for `tiny-test`; 3 epochs
    /// at 2e-5, batch 16, length 128 with linear decay for pretrained ones.
    pub fn defaults_for(spec: &EncoderSpec) -> Self {
        if spec.is_tiny() {
            TrainConfig {
                encoder: spec.key.clone(),
                max_sequence_length: 128,
                epochs: 30,
                learning_rate: 1e-3,
                batch_size: 8,
                seed: 0,
                dropout: 0.1,
                weight_decay: 0.0,
                schedule: Schedule::Constant,
            }
        } else {
            TrainConfig {
                encoder: spec.key.clone(),
                max_sequence_length: 128,
                epochs: 3,
                learning_rate: 2e-5,
                batch_size: 16,
                seed: 0,
                dropout: 0.1,
                weight_decay: 0.01,
                schedule: Schedule::Linear,
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidConfig(what));
        if self.max_sequence_length < 3 {
            return bad(format!("max_sequence_length {} is below 3", self.max_sequence_length));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate {} is not positive", self.learning_rate));
        }
        if self.batch_size == 0 {
            return bad("batch_size is 0".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} is outside [0, 1)", self.dropout));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad(format!("weight_decay {} is negative", self.weight_decay));
        }
        Ok(())
    }

    fn rate_at(&self, step: usize, total: usize) -> f64 {
        match self.schedule {
            Schedule::Constant => self.learning_rate,
            Schedule::Linear => self.learning_rate * (1.0 - step as f64 / total.max(1) as f64),
        }
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    /// `None` when the tune set is empty.
    pub tune_micro_f1: Option<f64>,
}

/// The encoder roster and where to get checkpoints from.
#[derive(Clone)]
pub struct ModelContext {
    pub registry: EncoderRegistry,
    pub provider: Arc<dyn CheckpointProvider>,
}

impl ModelContext {
    pub fn new(registry: EncoderRegistry, provider: Arc<dyn CheckpointProvider>) -> Self {
        ModelContext { registry, provider }
    }

    /// Built-in registry; only `tiny-test` can be materialized.
    pub fn offline() -> Self {
        Self::new(EncoderRegistry::builtin(), Arc::new(OfflineProvider))
    }

    /// Built-in registry over the local Hugging Face cache.
    pub fn local_cache() -> Self {
        match LocalCacheProvider::default_hub_cache() {
            Some(p) => Self::new(EncoderRegistry::builtin(), Arc::new(p)),
            None => Self::offline(),
        }
    }

    /// Fails with `EncoderUnavailable` unless `key` can be trained here.
    pub fn check_available(&self, key: &str) -> Result<()> {
        let spec = self.registry.get(key)?;
        if !spec.is_tiny() {
            self.provider.resolve(spec)?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for ModelContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelContext")
            .field("registry", &self.registry.version)
            .finish_non_exhaustive()
    }
}

fn require_harmonized(c: &Corpus) -> Result<()> {
    if c.scheme.is_harmonized() {
        Ok(())
    } else {
        Err(Error::SchemeMismatch(format!(
            "`{}` is not in the harmonized flat scheme; harmonize it first",
            c.name
        )))
    }
}

/// Fine-tunes `config.encoder` on `train`, scoring `tune` after every epoch
/// and keeping the weights of the best-scoring epoch.
///
/// Deterministic for a fixed seed on one machine: initialization, batch
/// order and dropout each draw from their own seeded stream.
pub fn train(train: &Corpus, tune: &Corpus, config: &TrainConfig, ctx: &ModelContext) -> Result<TrainedTagger> {
    config.validate()?;
    require_harmonized(train)?;
    require_harmonized(tune)?;
    if train.is_empty() {
        return Err(Error::EmptyCorpus(train.name.clone()));
    }
    let spec = ctx.registry.get(&config.encoder)?.clone();

    let (arch, tokenizer, source) = if spec.is_tiny() {
        let wp = WordPiece::build(&[train], TINY_MIN_WORD_COUNT);
        let arch = EncoderArch::tiny_test(wp.len());
        (arch, TokenizerFile::WordPiece(wp.to_vocab_file()), Source::Random)
    } else {
        let files = ctx.provider.resolve(&spec)?;
        let arch = EncoderArch::from_hf_file(&files.config)?;
        let bytes = std::fs::read(&files.tokenizer)?;
        HfSubwords::from_bytes(&bytes).map_err(|e| e.in_file(&files.tokenizer))?;
        (arch, TokenizerFile::HuggingFace(bytes), Source::Pretrained(files.load_tensors()?))
    };
    let subwords: Subwords = tokenizer.splitter()?;
    let vocab = LabelVocabulary::from_corpora(&[train]);
    let max_len = config.max_sequence_length.min(arch.max_positions());

    let examples: Vec<AlignmentResult> = train
        .sentences
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| align_labels(s, &vocab, &subwords, max_len))
        .collect::<Result<_>>()?;
    let truncated = examples.iter().filter(|e| e.truncated).count();
    if truncated > 0 {
        log::warn!(
            "{truncated} of {} training sentences truncated to {max_len} subwords",
            examples.len()
        );
    }

    let mut store = ParamStore::new(source, arch.layout.prefix(), config.seed);
    let model = TokenClassifier::build(&mut store, &arch, vocab.len())?;
    let mut opt = AdamW::new(
        store.vars(),
        ParamsAdamW {
            lr: config.learning_rate,
            weight_decay: config.weight_decay,
            ..Default::default()
        },
    )?;
    let mut order_rng = rng_from_seed(config.seed);
    order_rng.set_stream(2);
    let mut dropout_rng = rng_from_seed(config.seed);
    dropout_rng.set_stream(3);
    let mut dropout = Dropout {
        rate: config.dropout,
        rng: dropout_rng,
    };

    let steps_per_epoch = examples.len().div_ceil(config.batch_size);
    let total_steps = steps_per_epoch * config.epochs;
    let pad = subwords.specials().pad;
    let mut step = 0;
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, _)> = None;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    for epoch in 1..=config.epochs {
        shuffle_with(&mut order, &mut order_rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let rows: Vec<&[u32]> = chunk.iter().map(|i| examples[*i].subword_ids.as_slice()).collect();
            let batch = pad_batch(&rows, pad, &Device::Cpu)?;
            let mut labels = Vec::with_capacity(chunk.len() * batch.len);
            for i in chunk {
                let l = &examples[*i].label_ids;
                labels.extend_from_slice(l);
                labels.extend(std::iter::repeat_n(IGNORE_ID, batch.len - l.len()));
            }
            let logits = model.forward(&batch.ids, &batch.mask, Some(&mut dropout))?;
            let loss = masked_cross_entropy(&logits, &labels)?;
            opt.set_learning_rate(config.rate_at(step, total_steps));
            opt.backward_step(&loss)?;
            loss_sum += loss.to_scalar::<f32>()? as f64;
            step += 1;
        }
        let train_loss = loss_sum / steps_per_epoch.max(1) as f64;
        let tune_micro_f1 = if tune.is_empty() {
            None
        } else {
            let predicted = predict_with(&model, &subwords, &vocab, max_len, &tune.sentences)?;
            Some(score(tune, &predicted)?.micro_f1)
        };
        log::info!(
            "{} epoch {epoch}/{}: loss {train_loss:.4}, tune micro F1 {}",
            spec.key,
            config.epochs,
            tune_micro_f1.map_or("n/a".to_string(), |f| format!("{f:.4}"))
        );
        history.push(EpochLog {
            epoch,
            train_loss,
            tune_micro_f1,
        });
        // Without a tune set the last epoch wins.
        let key = tune_micro_f1.unwrap_or(f64::INFINITY);
        if best.as_ref().is_none_or(|(f, _, _)| key > *f || key == f64::INFINITY) {
            best = Some((key, epoch, store.snapshot()?));
        }
    }
    let best_epoch = match best {
        Some((_, epoch, snapshot)) => {
            store.restore(&snapshot)?;
            Some(epoch)
        }
        None => None,
    };
    drop(model);

    TrainedTagger::from_parts(TaggerParts {
        encoder: spec,
        arch,
        vocab,
        config: config.clone(),
        train_corpus_fingerprint: fingerprint(train),
        history,
        best_epoch,
        tokenizer,
        weights: store.snapshot()?,
    })
}
