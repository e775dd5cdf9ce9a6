use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use candle_core::{Device, Tensor, D};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::align::{encode_window, word_windows};
use super::arch::EncoderArch;
use super::encoder::{pad_batch, TokenClassifier};
use super::params::{ParamStore, Source};
use super::registry::{EncoderRegistry, EncoderSpec};
use super::subword::{HfSubwords, SubwordSplitter, Subwords, WordPiece};
use super::train::{EpochLog, TrainConfig};
use super::vocab::{LabelVocabulary, IGNORE_ID};
use crate::corpus_io::{fingerprint, Corpus, Sentence};
use crate::error::{Error, Result};

pub const TAGGER_FORMAT_VERSION: u32 = 1;
const MANIFEST: &str = "manifest.json";
const WEIGHTS: &str = "weights.safetensors";
const LABELS: &str = "labels.txt";
const PREDICT_BATCH: usize = 32;

/// Subword vocabulary a tagger was trained with, kept as the exact file bytes.
#[derive(Debug, Clone)]
pub(crate) enum TokenizerFile {
    /// `vocab.txt` of a corpus-built WordPiece.
    WordPiece(String),
    /// A Hugging Face `tokenizer.json`.
    HuggingFace(Vec<u8>),
}

impl TokenizerFile {
    fn file_name(&self) -> &'static str {
        match self {
            TokenizerFile::WordPiece(_) => "vocab.txt",
            TokenizerFile::HuggingFace(_) => "tokenizer.json",
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            TokenizerFile::WordPiece(_) => "wordpiece",
            TokenizerFile::HuggingFace(_) => "huggingface",
        }
    }

    fn bytes(&self) -> &[u8] {
        match self {
            TokenizerFile::WordPiece(s) => s.as_bytes(),
            TokenizerFile::HuggingFace(b) => b,
        }
    }

    fn from_bytes(kind: &str, bytes: Vec<u8>) -> Result<Self> {
        match kind {
            "wordpiece" => String::from_utf8(bytes)
                .map(TokenizerFile::WordPiece)
                .map_err(|e| Error::Tokenizer(e.to_string())),
            "huggingface" => Ok(TokenizerFile::HuggingFace(bytes)),
            other => Err(Error::Tokenizer(format!("unknown tokenizer kind `{other}`"))),
        }
    }

    pub(crate) fn splitter(&self) -> Result<Subwords> {
        Ok(match self {
            TokenizerFile::WordPiece(text) => Subwords::WordPiece(WordPiece::from_vocab_file(text)?),
            TokenizerFile::HuggingFace(bytes) => Subwords::HuggingFace(HfSubwords::from_bytes(bytes)?),
        })
    }
}

/// A fine-tuned encoder with its token-classification head.
///
/// Immutable once built; [`TrainedTagger::predict`] takes `&self` and may be
/// called from several threads at once.
pub struct TrainedTagger {
    encoder: EncoderSpec,
    arch: EncoderArch,
    vocab: LabelVocabulary,
    config: TrainConfig,
    train_corpus_fingerprint: String,
    history: Vec<EpochLog>,
    best_epoch: Option<usize>,
    tokenizer: TokenizerFile,
    subwords: Subwords,
    weights: BTreeMap<String, Tensor>,
    model: TokenClassifier,
}

impl std::fmt::Debug for TrainedTagger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrainedTagger")
            .field("encoder", &self.encoder.key)
            .field("labels", &self.vocab.labels())
            .field("config", &self.config)
            .field("best_epoch", &self.best_epoch)
            .finish_non_exhaustive()
    }
}

pub(crate) struct TaggerParts {
    pub encoder: EncoderSpec,
    pub arch: EncoderArch,
    pub vocab: LabelVocabulary,
    pub config: TrainConfig,
    pub train_corpus_fingerprint: String,
    pub history: Vec<EpochLog>,
    pub best_epoch: Option<usize>,
    pub tokenizer: TokenizerFile,
    pub weights: BTreeMap<String, Tensor>,
}

impl TrainedTagger {
    /// Rebuilds the network from an exact parameter set.
    pub(crate) fn from_parts(parts: TaggerParts) -> Result<Self> {
        let exact: HashMap<String, Tensor> = parts.weights.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut store = ParamStore::new(Source::Exact(exact), parts.arch.layout.prefix(), 0);
        let model = TokenClassifier::build(&mut store, &parts.arch, parts.vocab.len())?;
        let built = store.vars().len();
        if built != parts.weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} stored tensors for a model with {built} parameters",
                parts.weights.len()
            )));
        }
        let subwords = parts.tokenizer.splitter()?;
        Ok(TrainedTagger {
            encoder: parts.encoder,
            arch: parts.arch,
            vocab: parts.vocab,
            config: parts.config,
            train_corpus_fingerprint: parts.train_corpus_fingerprint,
            history: parts.history,
            best_epoch: parts.best_epoch,
            tokenizer: parts.tokenizer,
            subwords,
            weights: parts.weights,
            model,
        })
    }

    pub fn encoder(&self) -> &EncoderSpec {
        &self.encoder
    }

    pub fn arch(&self) -> &EncoderArch {
        &self.arch
    }

    pub fn vocab(&self) -> &LabelVocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn train_corpus_fingerprint(&self) -> &str {
        &self.train_corpus_fingerprint
    }

    /// Per-epoch training loss and tune-set micro F1.
    pub fn history(&self) -> &[EpochLog] {
        &self.history
    }

    /// Epoch whose weights were kept (1-based); `None` when untrained.
    pub fn best_epoch(&self) -> Option<usize> {
        self.best_epoch
    }

    pub fn subwords(&self) -> &dyn SubwordSplitter {
        &self.subwords
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.values().map(|t| t.elem_count()).sum()
    }

    /// Whether `corpus` is the one this tagger was trained on.
    pub fn trained_on(&self, corpus: &Corpus) -> bool {
        fingerprint(corpus) == self.train_corpus_fingerprint
    }

    /// One tag per input word. Input tags are ignored. Long sentences are
    /// encoded as several word-aligned windows so that no word goes untagged.
    pub fn predict(&self, sentences: &[Sentence]) -> Result<Vec<Vec<String>>> {
        predict_with(&self.model, &self.subwords, &self.vocab, self.max_len(), sentences)
    }

    pub(crate) fn max_len(&self) -> usize {
        self.config.max_sequence_length.min(self.arch.max_positions())
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        save_tagger(self, dir)
    }
}

/// A window queued for prediction: owning sentence, its first word index and
/// encoded ids with first-subword positions.
struct Pending {
    sentence: usize,
    first_word: usize,
    ids: Vec<u32>,
    firsts: Vec<usize>,
}

pub(crate) fn predict_with(
    model: &TokenClassifier,
    subwords: &dyn SubwordSplitter,
    vocab: &LabelVocabulary,
    max_len: usize,
    sentences: &[Sentence],
) -> Result<Vec<Vec<String>>> {
    let mut out: Vec<Vec<Option<usize>>> = sentences.iter().map(|s| vec![None; s.len()]).collect();
    let mut pending = Vec::new();
    for (i, s) in sentences.iter().enumerate() {
        let pieces: Vec<Vec<u32>> = s.words().map(|w| subwords.split(w)).collect();
        for window in word_windows(&pieces, max_len) {
            let first_word = window.start;
            let (ids, firsts) = encode_window(&pieces, window, subwords.specials(), max_len);
            pending.push(Pending {
                sentence: i,
                first_word,
                ids,
                firsts,
            });
        }
    }
    // Similar lengths together keep padding small.
    pending.sort_by_key(|p| p.ids.len());
    let pad = subwords.specials().pad;
    for chunk in pending.chunks(PREDICT_BATCH) {
        let rows: Vec<&[u32]> = chunk.iter().map(|p| p.ids.as_slice()).collect();
        let batch = pad_batch(&rows, pad, &Device::Cpu)?;
        let best: Vec<Vec<u32>> = model
            .forward(&batch.ids, &batch.mask, None)?
            .argmax(D::Minus1)?
            .to_vec2()?;
        for (p, row) in chunk.iter().zip(best) {
            for (k, pos) in p.firsts.iter().enumerate() {
                out[p.sentence][p.first_word + k] = Some(row[*pos] as usize);
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|ids| {
            ids.into_iter()
                .map(|id| vocab.label(id.unwrap_or(0)).unwrap_or(vocab.labels()[0].as_str()).to_string())
                .collect()
        })
        .collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct TokenizerEntry {
    kind: String,
    file: String,
    sha256: String,
}

/// Contents of `manifest.json` in a saved tagger directory.
#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    encoder: EncoderSpec,
    encoder_hash: String,
    arch: EncoderArch,
    config: TrainConfig,
    labels: LabelVocabulary,
    ignore_id: i64,
    train_corpus_fingerprint: String,
    tokenizer: TokenizerEntry,
    weights_sha256: String,
    labels_sha256: String,
    history: Vec<EpochLog>,
    best_epoch: Option<usize>,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn labels_file(vocab: &LabelVocabulary) -> String {
    let mut s = vocab.labels().join("\n");
    s.push('\n');
    s
}

/// Writes `manifest.json`, `weights.safetensors`, `labels.txt` and the
/// subword vocabulary into `dir`, creating it if needed.
pub fn save_tagger(tagger: &TrainedTagger, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let weights_path = dir.join(WEIGHTS);
    let tensors: HashMap<String, Tensor> = tagger.weights.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    candle_core::safetensors::save(&tensors, &weights_path)?;
    let labels = labels_file(&tagger.vocab);
    fs::write(dir.join(LABELS), &labels)?;
    let tok = &tagger.tokenizer;
    fs::write(dir.join(tok.file_name()), tok.bytes())?;
    let manifest = Manifest {
        format_version: TAGGER_FORMAT_VERSION,
        encoder: tagger.encoder.clone(),
        encoder_hash: tagger.encoder.content_hash(),
        arch: tagger.arch,
        config: tagger.config.clone(),
        labels: tagger.vocab.clone(),
        ignore_id: IGNORE_ID,
        train_corpus_fingerprint: tagger.train_corpus_fingerprint.clone(),
        tokenizer: TokenizerEntry {
            kind: tok.kind().into(),
            file: tok.file_name().into(),
            sha256: sha256(tok.bytes()),
        },
        weights_sha256: sha256(&fs::read(&weights_path)?),
        labels_sha256: sha256(labels.as_bytes()),
        history: tagger.history.clone(),
        best_epoch: tagger.best_epoch,
    };
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

/// Loads a tagger saved by [`save_tagger`], checking every file against the
/// manifest. The encoder must be in `registry` with the same content hash it
/// had at training time; any other registry version is fine.
pub fn load_tagger(dir: &Path, registry: &EncoderRegistry) -> Result<TrainedTagger> {
    let corrupt = |path: PathBuf, reason: String| Error::CorruptArtifact { path, reason };
    let manifest_path = dir.join(MANIFEST);
    let manifest: Manifest = serde_json::from_slice(&fs::read(&manifest_path)?)
        .map_err(|e| corrupt(manifest_path.clone(), e.to_string()))?;
    if manifest.format_version != TAGGER_FORMAT_VERSION {
        return Err(corrupt(
            manifest_path,
            format!("format version {} is not {TAGGER_FORMAT_VERSION}", manifest.format_version),
        ));
    }
    if manifest.ignore_id != IGNORE_ID {
        return Err(corrupt(manifest_path, format!("ignore id {}", manifest.ignore_id)));
    }
    if manifest.encoder.content_hash() != manifest.encoder_hash {
        return Err(corrupt(manifest_path, "encoder entry does not match its hash".into()));
    }
    let known = registry.get(&manifest.encoder.key)?;
    if known.content_hash() != manifest.encoder_hash {
        return Err(corrupt(
            manifest_path,
            format!(
                "encoder `{}` differs in registry version {}",
                manifest.encoder.key, registry.version
            ),
        ));
    }

    let labels_path = dir.join(LABELS);
    let labels = fs::read_to_string(&labels_path)?;
    if sha256(labels.as_bytes()) != manifest.labels_sha256 || labels != labels_file(&manifest.labels) {
        return Err(corrupt(labels_path, "label vocabulary does not match the manifest".into()));
    }

    let weights_path = dir.join(WEIGHTS);
    if sha256(&fs::read(&weights_path)?) != manifest.weights_sha256 {
        return Err(corrupt(weights_path, "weights checksum mismatch".into()));
    }
    let weights: BTreeMap<String, Tensor> = candle_core::safetensors::load(&weights_path, &Device::Cpu)
        .map_err(|e| corrupt(weights_path.clone(), e.to_string()))?
        .into_iter()
        .collect();

    let tok_path = dir.join(&manifest.tokenizer.file);
    let tok_bytes = fs::read(&tok_path)?;
    if sha256(&tok_bytes) != manifest.tokenizer.sha256 {
        return Err(corrupt(tok_path, "tokenizer checksum mismatch".into()));
    }
    let tokenizer = TokenizerFile::from_bytes(&manifest.tokenizer.kind, tok_bytes)?;

    TrainedTagger::from_parts(TaggerParts {
        encoder: manifest.encoder,
        arch: manifest.arch,
        vocab: manifest.labels,
        config: manifest.config,
        train_corpus_fingerprint: manifest.train_corpus_fingerprint,
        history: manifest.history,
        best_epoch: manifest.best_epoch,
        tokenizer,
        weights,
    })
    .map_err(|e| match e {
        Error::ShapeMismatch(reason) => corrupt(weights_path, reason),
        other => other,
    })
}
