use std::ops::Range;

use serde::Serialize;

use super::subword::{SpecialIds, SubwordSplitter};
use super::vocab::{LabelVocabulary, IGNORE_ID};
use crate::corpus_io::Sentence;
use crate::error::{Error, Result};

/// Encoder input for one sentence (or one window of it), with labels on the
/// first subword of each word and [`IGNORE_ID`] everywhere else.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlignmentResult {
    /// `[CLS] subwords… [SEP]`.
    pub subword_ids: Vec<u32>,
    pub label_ids: Vec<i64>,
    /// Position in `subword_ids` of each retained word's first subword.
    pub word_to_first_subword: Vec<usize>,
    /// Words dropped from the end to fit `max_sequence_length`.
    pub truncated: bool,
}

impl AlignmentResult {
    pub fn retained_words(&self) -> usize {
        self.word_to_first_subword.len()
    }

    pub fn labeled_positions(&self) -> usize {
        self.label_ids.iter().filter(|l| **l != IGNORE_ID).count()
    }
}

/// Greedy word-boundary windows so each fits `max_len` with both specials.
///
/// A single word longer than the window gets a window of its own; its
/// trailing subwords are dropped when it is encoded.
pub(crate) fn word_windows(pieces: &[Vec<u32>], max_len: usize) -> Vec<Range<usize>> {
    let budget = max_len.saturating_sub(2).max(1);
    let mut out = Vec::new();
    let mut start = 0;
    let mut used = 0;
    for (i, p) in pieces.iter().enumerate() {
        if i > start && used + p.len() > budget {
            out.push(start..i);
            start = i;
            used = 0;
        }
        used += p.len();
    }
    if start < pieces.len() {
        out.push(start..pieces.len());
    }
    out
}

/// Encodes `pieces[window]` as `[CLS] … [SEP]`, capping the subword count at
/// `max_len - 2`. Returns the ids and each word's first-subword position.
pub(crate) fn encode_window(
    pieces: &[Vec<u32>],
    window: Range<usize>,
    specials: SpecialIds,
    max_len: usize,
) -> (Vec<u32>, Vec<usize>) {
    let budget = max_len.saturating_sub(2).max(1);
    let mut ids = vec![specials.cls];
    let mut firsts = Vec::with_capacity(window.len());
    for p in &pieces[window] {
        let room = budget - (ids.len() - 1);
        if room == 0 {
            break;
        }
        firsts.push(ids.len());
        ids.extend(p.iter().take(room));
    }
    ids.push(specials.sep);
    (ids, firsts)
}

/// Aligns word-level tags with subwords: the first subword of each word gets
/// the word's label id, every other position (continuations, `[CLS]`,
/// `[SEP]`) gets [`IGNORE_ID`]. Sentences longer than `max_sequence_length`
/// are cut at a word boundary and flagged `truncated`.
pub fn align_labels(
    sentence: &Sentence,
    vocab: &LabelVocabulary,
    splitter: &dyn SubwordSplitter,
    max_sequence_length: usize,
) -> Result<AlignmentResult> {
    if max_sequence_length < 3 {
        return Err(Error::InvalidConfig(format!(
            "max_sequence_length {max_sequence_length} leaves no room for a word"
        )));
    }
    let labels = sentence
        .tags()
        .map(|t| vocab.id(t))
        .collect::<Result<Vec<_>>>()?;
    let pieces: Vec<Vec<u32>> = sentence.words().map(|w| splitter.split(w)).collect();
    let window = word_windows(&pieces, max_sequence_length)
        .into_iter()
        .next()
        .unwrap_or(0..0);
    let truncated = window.end < pieces.len();
    let (subword_ids, firsts) = encode_window(&pieces, window, splitter.specials(), max_sequence_length);
    let mut label_ids = vec![IGNORE_ID; subword_ids.len()];
    for (word, pos) in firsts.iter().enumerate() {
        label_ids[*pos] = labels[word] as i64;
    }
    Ok(AlignmentResult {
        subword_ids,
        label_ids,
        word_to_first_subword: firsts,
        truncated,
    })
}
