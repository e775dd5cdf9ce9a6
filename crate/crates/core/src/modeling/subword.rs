use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use crate::corpus_io::Corpus;
use crate::error::{Error, Result};

/// Ids of the special positions wrapped around every encoded window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialIds {
    pub cls: u32,
    pub sep: u32,
    pub pad: u32,
}

/// Turns one word into encoder subword ids.
pub trait SubwordSplitter: Send + Sync {
    /// Never empty: unknown input maps to the unknown-token id.
    fn split(&self, word: &str) -> Vec<u32>;
    fn specials(&self) -> SpecialIds;
}

/// Adapts a closure into a [`SubwordSplitter`].
pub struct FnSplitter<F> {
    pub f: F,
    pub specials: SpecialIds,
}

impl<F> SubwordSplitter for FnSplitter<F>
where
    F: Fn(&str) -> Vec<u32> + Send + Sync,
{
    fn split(&self, word: &str) -> Vec<u32> {
        (self.f)(word)
    }

    fn specials(&self) -> SpecialIds {
        self.specials
    }
}

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
const CONTINUATION: &str = "##";

/// Greedy longest-match-first WordPiece over a vocabulary built from a corpus.
///
/// The vocabulary holds the four specials, every character seen (both as a
/// word-initial piece and as a `##` continuation) and every word seen at
/// least `min_word_count` times. Rarer words therefore split into several
/// pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPiece {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl WordPiece {
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        for (i, s) in [PAD, UNK, CLS, SEP].iter().enumerate() {
            if tokens.get(i).map(String::as_str) != Some(*s) {
                return Err(Error::Tokenizer(format!("vocabulary must start with {PAD} {UNK} {CLS} {SEP}")));
            }
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(Error::Tokenizer(format!("repeated vocabulary entry `{t}`")));
            }
        }
        Ok(WordPiece { tokens, index })
    }

    pub fn build(corpora: &[&Corpus], min_word_count: usize) -> Self {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for c in corpora {
            for w in c.sentences.iter().flat_map(|s| s.words()) {
                *counts.entry(w).or_default() += 1;
            }
        }
        let chars: BTreeSet<char> = counts.keys().flat_map(|w| w.chars()).collect();
        let mut tokens: Vec<String> = [PAD, UNK, CLS, SEP].map(String::from).to_vec();
        let mut seen: BTreeSet<String> = tokens.iter().cloned().collect();
        let mut push = |t: String| {
            if seen.insert(t.clone()) {
                tokens.push(t);
            }
        };
        for c in &chars {
            push(c.to_string());
            push(format!("{CONTINUATION}{c}"));
        }
        for (w, n) in &counts {
            if *n >= min_word_count.max(1) {
                push(w.to_string());
            }
        }
        WordPiece::from_tokens(tokens).expect("built vocabulary is well formed")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn to_vocab_file(&self) -> String {
        let mut out = self.tokens.join("\n");
        out.push('\n');
        out
    }

    pub fn from_vocab_file(text: &str) -> Result<Self> {
        WordPiece::from_tokens(text.lines().map(str::to_string).collect())
    }

    fn unk(&self) -> u32 {
        1
    }
}

impl SubwordSplitter for WordPiece {
    fn split(&self, word: &str) -> Vec<u32> {
        let chars: Vec<(usize, char)> = word.char_indices().collect();
        if chars.is_empty() {
            return vec![self.unk()];
        }
        let mut out = Vec::new();
        let mut start = 0;
        let mut piece = String::new();
        while start < chars.len() {
            let mut found = None;
            for end in (start + 1..=chars.len()).rev() {
                let from = chars[start].0;
                let to = chars.get(end).map_or(word.len(), |(b, _)| *b);
                piece.clear();
                if start > 0 {
                    piece.push_str(CONTINUATION);
                }
                piece.push_str(&word[from..to]);
                if let Some(id) = self.index.get(&piece) {
                    found = Some((*id, end));
                    break;
                }
            }
            match found {
                Some((id, end)) => {
                    out.push(id);
                    start = end;
                }
                None => return vec![self.unk()],
            }
        }
        out
    }

    fn specials(&self) -> SpecialIds {
        SpecialIds { cls: 2, sep: 3, pad: 0 }
    }
}

/// A Hugging Face `tokenizer.json` tokenizer applied word by word.
pub struct HfSubwords {
    tokenizer: tokenizers::Tokenizer,
    specials: SpecialIds,
    unk: u32,
}

impl std::fmt::Debug for HfSubwords {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HfSubwords").field("specials", &self.specials).finish()
    }
}

impl HfSubwords {
    pub fn from_file(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes).map_err(|e| e.in_file(path))
    }

    /// Parses the contents of a `tokenizer.json`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let tokenizer = tokenizers::Tokenizer::from_bytes(bytes).map_err(|e| Error::Tokenizer(e.to_string()))?;
        let find = |names: &[&str]| names.iter().find_map(|n| tokenizer.token_to_id(n));
        let missing = |what: &str| Error::Tokenizer(format!("no {what} token"));
        let specials = SpecialIds {
            cls: find(&["[CLS]", "<s>"]).ok_or_else(|| missing("classification"))?,
            sep: find(&["[SEP]", "</s>"]).ok_or_else(|| missing("separator"))?,
            pad: find(&["[PAD]", "<pad>"]).ok_or_else(|| missing("padding"))?,
        };
        let unk = find(&["[UNK]", "<unk>"]).ok_or_else(|| missing("unknown"))?;
        Ok(HfSubwords { tokenizer, specials, unk })
    }
}

impl SubwordSplitter for HfSubwords {
    fn split(&self, word: &str) -> Vec<u32> {
        match self.tokenizer.encode(word, false) {
            Ok(enc) if !enc.get_ids().is_empty() => enc.get_ids().to_vec(),
            _ => vec![self.unk],
        }
    }

    fn specials(&self) -> SpecialIds {
        self.specials
    }
}

/// The splitter a trained tagger persists alongside its weights.
#[derive(Debug)]
pub enum Subwords {
    WordPiece(WordPiece),
    HuggingFace(HfSubwords),
}

impl SubwordSplitter for Subwords {
    fn split(&self, word: &str) -> Vec<u32> {
        match self {
            Subwords::WordPiece(w) => w.split(word),
            Subwords::HuggingFace(h) => h.split(word),
        }
    }

    fn specials(&self) -> SpecialIds {
        match self {
            Subwords::WordPiece(w) => w.specials(),
            Subwords::HuggingFace(h) => h.specials(),
        }
    }
}
