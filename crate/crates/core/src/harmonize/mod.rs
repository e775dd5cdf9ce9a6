//! Conversion of source corpora to the shared flat scheme {NEP, NEO, NEL, O},
//! deterministic splitting and merge-with-reshuffle.
//!
//! Flat conversion drops entity boundaries: two adjacent persons tagged
//! `B-PER I-PER B-PER` become `NEP NEP NEP`, indistinguishable from a single
//! three-token name. Evaluation is token-level for that reason.

mod merge;
pub mod shuffle;
mod split;
mod tagmap;

use crate::corpus_io::{split_iob, Corpus, SchemeKind, Sentence, TagScheme, Token, OUTSIDE};
use crate::error::{Error, Result};

pub use merge::merge_corpora;
pub use split::{hold_out_tune, make_split, SplitResult, SplitSpec, HOLDOUT_TUNE_PERCENT, MIN_SPLIT_SENTENCES};
pub use tagmap::{builtin_map, builtin_maps, TagMap, IITB_IOB, IJCNLP_FLAT, WIKIANN_IOB};

/// Person, organization, location, outside.
pub const HARMONIZED_TAGS: [&str; 4] = ["NEP", "NEO", "NEL", OUTSIDE];
/// The harmonized tags scored as entities.
pub const ENTITY_TAGS: [&str; 3] = ["NEP", "NEO", "NEL"];

pub fn is_harmonized_tag(tag: &str) -> bool {
    HARMONIZED_TAGS.contains(&tag)
}

fn retag<F>(corpus: &Corpus, mut f: F) -> Result<Corpus>
where
    F: FnMut(&str) -> Result<String>,
{
    let sentences = corpus
        .sentences
        .iter()
        .map(|s| {
            let tokens = s
                .tokens
                .iter()
                .map(|t| Ok(Token::new(t.text.clone(), f(&t.tag)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Sentence {
                tokens,
                source: s.source.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus {
        name: corpus.name.clone(),
        language: corpus.language,
        scheme: TagScheme::harmonized(),
        sentences,
    })
}

/// `B-X` and `I-X` both become `class_map(X)`; `O` stays `O`.
///
/// A corpus that is already harmonized is returned unchanged.
pub fn strip_iob(corpus: &Corpus, class_map: &TagMap) -> Result<Corpus> {
    if corpus.scheme.is_harmonized() {
        return Ok(corpus.clone());
    }
    if corpus.scheme.kind != SchemeKind::Iob {
        return Err(Error::SchemeMismatch(format!(
            "strip_iob needs an IOB corpus, `{}` is {}",
            corpus.name, corpus.scheme.kind
        )));
    }
    retag(corpus, |tag| {
        if tag == OUTSIDE {
            return Ok(OUTSIDE.to_string());
        }
        let (_, class) = split_iob(tag).ok_or_else(|| Error::InvalidIobTag(tag.to_string()))?;
        class_map
            .get(class)
            .map(str::to_string)
            .ok_or_else(|| Error::UnmappedClass(class.to_string()))
    })
}

/// Replaces each flat tag per `map`.
pub fn apply_tag_map(corpus: &Corpus, map: &TagMap) -> Result<Corpus> {
    if corpus.scheme.kind != SchemeKind::Flat {
        return Err(Error::SchemeMismatch(format!(
            "apply_tag_map needs a FLAT corpus, `{}` is {}",
            corpus.name, corpus.scheme.kind
        )));
    }
    retag(corpus, |tag| {
        map.get(tag)
            .map(str::to_string)
            .ok_or_else(|| Error::UnmappedTag(tag.to_string()))
    })
}

/// [`strip_iob`] for IOB corpora, [`apply_tag_map`] for flat ones.
pub fn harmonize(corpus: &Corpus, map: &TagMap) -> Result<Corpus> {
    match corpus.scheme.kind {
        SchemeKind::Iob => strip_iob(corpus, map),
        SchemeKind::Flat => apply_tag_map(corpus, map),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::Language;

    fn iob(tags: &[&str]) -> Corpus {
        let words: Vec<String> = (0..tags.len()).map(|i| format!("w{i}")).collect();
        Corpus::from_sentences("t", Language::Marathi, vec![Sentence::from_pairs(&words, tags)])
    }

    fn tags(c: &Corpus) -> Vec<&str> {
        c.sentences[0].tags().collect()
    }

    #[test]
    fn person_span_becomes_nep() {
        let out = strip_iob(&iob(&["B-PERSON", "I-PERSON"]), &builtin_map(IITB_IOB).unwrap()).unwrap();
        assert_eq!(tags(&out), ["NEP", "NEP"]);
        assert_eq!(out.scheme, TagScheme::harmonized());
    }

    #[test]
    fn wikiann_location() {
        let out = strip_iob(&iob(&["B-LOC", "I-LOC", "O"]), &builtin_map(WIKIANN_IOB).unwrap()).unwrap();
        assert_eq!(tags(&out), ["NEL", "NEL", "O"]);
    }

    #[test]
    fn dangling_inside_maps_like_begin() {
        let out = strip_iob(&iob(&["O", "I-ORG"]), &builtin_map(WIKIANN_IOB).unwrap()).unwrap();
        assert_eq!(tags(&out), ["O", "NEO"]);
    }

    #[test]
    fn unmapped_class() {
        let err = strip_iob(&iob(&["B-MISC"]), &builtin_map(WIKIANN_IOB).unwrap()).unwrap_err();
        assert!(matches!(err, Error::UnmappedClass(c) if c == "MISC"));
    }

    #[test]
    fn ijcnlp_tags() {
        let c = iob(&["NETI", "NEP", "O", "NEN"]);
        let out = apply_tag_map(&c, &builtin_map(IJCNLP_FLAT).unwrap()).unwrap();
        assert_eq!(tags(&out), ["O", "NEP", "O", "O"]);
    }

    #[test]
    fn unmapped_tag_without_default() {
        let map = TagMap::new([("NEP", "NEP")], None).unwrap();
        let err = apply_tag_map(&iob(&["NEX"]), &map).unwrap_err();
        assert!(matches!(err, Error::UnmappedTag(t) if t == "NEX"));
    }

    #[test]
    fn all_outside_unchanged_and_idempotent() {
        let c = iob(&["O", "O"]);
        let map = builtin_map(IJCNLP_FLAT).unwrap();
        let once = apply_tag_map(&c, &map).unwrap();
        assert!(once.same_sentences(&c));
        assert_eq!(apply_tag_map(&once, &map).unwrap(), once);
        assert_eq!(strip_iob(&once, &builtin_map(IITB_IOB).unwrap()).unwrap(), once);
    }

    #[test]
    fn scheme_preconditions() {
        let flat = iob(&["NETI"]);
        assert!(matches!(
            strip_iob(&flat, &builtin_map(IITB_IOB).unwrap()),
            Err(Error::SchemeMismatch(_))
        ));
        assert!(matches!(
            apply_tag_map(&iob(&["B-PER"]), &builtin_map(IJCNLP_FLAT).unwrap()),
            Err(Error::SchemeMismatch(_))
        ));
    }
}
