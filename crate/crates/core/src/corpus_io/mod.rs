//! Corpus model and the two-column / WikiAnn on-disk formats.
//!
//! Every corpus, whatever its source, is held as a [`Corpus`]: a named,
//! ordered list of [`Sentence`]s whose tokens each carry exactly one tag.
//! The tag vocabulary and whether tags are IOB-prefixed are described by a
//! [`TagScheme`].

mod conll;
mod stats;
mod validate;
mod wikiann;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use conll::{parse_conll, parse_conll_with, serialize_conll, to_conll_string, ParseOptions};
pub use stats::{tag_histogram, CorpusStats, ExpectedCounts, StatsMismatch};
pub use validate::{validate_corpus, Rule, Severity, Violation};
pub use wikiann::{parse_wikiann, parse_wikiann_with, WIKIANN_CLASSES};

/// SHA-256 of the corpus in two-column form. Names and provenance are not
/// part of it, so two corpora with identical sentences share a fingerprint.
pub fn fingerprint(corpus: &Corpus) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(to_conll_string(corpus).as_bytes()))
}

/// The tag every scheme uses for tokens outside any entity.
pub const OUTSIDE: &str = "O";

/// A single word with its tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub tag: String,
}

impl Token {
    pub fn new(text: impl Into<String>, tag: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            tag: tag.into(),
        }
    }
}

/// An ordered, non-empty run of tokens.
///
/// `source` records which corpus the sentence came from once corpora have been
/// merged. It is not written by [`serialize_conll`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence {
            tokens,
            source: None,
        }
    }

    /// Builds a sentence from parallel word and tag slices.
    ///
    /// Panics if the slices differ in length.
    pub fn from_pairs<W: AsRef<str>, T: AsRef<str>>(words: &[W], tags: &[T]) -> Self {
        assert_eq!(words.len(), tags.len(), "words and tags differ in length");
        Sentence::new(
            words
                .iter()
                .zip(tags)
                .map(|(w, t)| Token::new(w.as_ref(), t.as_ref()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.tag.as_str())
    }

    /// Same tokens, same order, ignoring provenance.
    pub fn same_tokens(&self, other: &Sentence) -> bool {
        self.tokens == other.tokens
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[serde(rename = "hi")]
    Hindi,
    #[serde(rename = "mr")]
    Marathi,
    Mixed,
}

impl Language {
    pub fn code(self) -> &'static str {
        match self {
            Language::Hindi => "hi",
            Language::Marathi => "mr",
            Language::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hi" => Ok(Language::Hindi),
            "mr" => Ok(Language::Marathi),
            "mixed" => Ok(Language::Mixed),
            other => Err(Error::UnknownLanguage(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SchemeKind {
    /// `B-<class>` / `I-<class>` / `O`.
    Iob,
    /// One bare class tag per token.
    Flat,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Iob => "IOB",
            SchemeKind::Flat => "FLAT",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iob" => Ok(SchemeKind::Iob),
            "flat" => Ok(SchemeKind::Flat),
            other => Err(Error::SchemeMismatch(format!("unknown scheme kind `{other}`"))),
        }
    }
}

/// Tag vocabulary of a corpus. The outside tag is always `O` and always a
/// member of the vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagScheme {
    pub kind: SchemeKind,
    pub vocabulary: BTreeSet<String>,
}

impl TagScheme {
    pub fn new<I, S>(kind: SchemeKind, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocabulary: BTreeSet<String> = tags.into_iter().map(Into::into).collect();
        vocabulary.insert(OUTSIDE.to_string());
        TagScheme { kind, vocabulary }
    }

    /// The shared flat scheme every corpus is harmonized into.
    pub fn harmonized() -> Self {
        TagScheme::new(SchemeKind::Flat, crate::harmonize::HARMONIZED_TAGS)
    }

    pub fn outside_tag(&self) -> &'static str {
        OUTSIDE
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.vocabulary.contains(tag)
    }

    /// True for a FLAT scheme whose vocabulary is within {NEP, NEO, NEL, O}.
    pub fn is_harmonized(&self) -> bool {
        self.kind == SchemeKind::Flat
            && self
                .vocabulary
                .iter()
                .all(|t| crate::harmonize::is_harmonized_tag(t))
    }
}

/// Splits an IOB tag into its prefix and class: `B-PER` → `('B', "PER")`.
/// Returns `None` for `O` and for anything that is not `B-`/`I-` prefixed.
pub fn split_iob(tag: &str) -> Option<(char, &str)> {
    let rest_b = tag.strip_prefix("B-").map(|c| ('B', c));
    let rest = rest_b.or_else(|| tag.strip_prefix("I-").map(|c| ('I', c)))?;
    if rest.1.is_empty() {
        None
    } else {
        Some(rest)
    }
}

/// A named, ordered collection of tagged sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub language: Language,
    pub scheme: TagScheme,
    pub sentences: Vec<Sentence>,
}

impl Corpus {
    /// Builds a corpus, inferring the scheme from the tags present.
    pub fn from_sentences(name: impl Into<String>, language: Language, sentences: Vec<Sentence>) -> Self {
        let scheme = infer_scheme(&sentences, None);
        Corpus {
            name: name.into(),
            language,
            scheme,
            sentences,
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    /// Same sentences in the same order, ignoring name, language and provenance.
    pub fn same_sentences(&self, other: &Corpus) -> bool {
        self.sentences.len() == other.sentences.len()
            && self
                .sentences
                .iter()
                .zip(&other.sentences)
                .all(|(a, b)| a.same_tokens(b))
    }

    /// Returns a copy holding only the given sentences, with the scheme
    /// vocabulary kept as-is.
    pub fn with_sentences(&self, name: impl Into<String>, sentences: Vec<Sentence>) -> Corpus {
        Corpus {
            name: name.into(),
            language: self.language,
            scheme: self.scheme.clone(),
            sentences,
        }
    }
}

/// IOB if any tag carries a `B-`/`I-` prefix, FLAT otherwise, unless `kind`
/// forces one. The vocabulary is the set of observed tags plus `O`.
pub(crate) fn infer_scheme(sentences: &[Sentence], kind: Option<SchemeKind>) -> TagScheme {
    let vocabulary: BTreeSet<&str> = sentences.iter().flat_map(Sentence::tags).collect();
    let kind = kind.unwrap_or_else(|| {
        if vocabulary.iter().any(|t| split_iob(t).is_some()) {
            SchemeKind::Iob
        } else {
            SchemeKind::Flat
        }
    });
    TagScheme::new(kind, vocabulary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iob_split() {
        assert_eq!(split_iob("B-PER"), Some(('B', "PER")));
        assert_eq!(split_iob("I-ORGANISATION"), Some(('I', "ORGANISATION")));
        assert_eq!(split_iob("O"), None);
        assert_eq!(split_iob("B-"), None);
        assert_eq!(split_iob("NEP"), None);
    }

    #[test]
    fn scheme_always_has_outside() {
        let s = TagScheme::new(SchemeKind::Flat, ["NEP"]);
        assert!(s.contains("O"));
        assert!(s.is_harmonized());
        assert!(!TagScheme::new(SchemeKind::Flat, ["NETI"]).is_harmonized());
    }

    #[test]
    fn language_codes() {
        assert_eq!("mr".parse::<Language>().unwrap(), Language::Marathi);
        assert!(matches!("en".parse::<Language>(), Err(Error::UnknownLanguage(_))));
    }
}
