use std::io::BufRead;

use super::conll::{finish, read_sentences, split_fields, ParseOptions};
use super::{split_iob, Corpus, Language, SchemeKind, Token, OUTSIDE};
use crate::error::{Error, Result};

/// Entity classes used by WikiAnn tags.
pub const WIKIANN_CLASSES: [&str; 3] = ["PER", "LOC", "ORG"];

/// Parses WikiAnn dumps: `<lang>:<token> <tag>` (the prefix is optional).
///
/// A leading language prefix must equal `language`'s code and is removed from
/// the token text. Tags must be `O` or `B-`/`I-` over PER, LOC and ORG.
pub fn parse_wikiann<R: BufRead>(source: R, name: &str, language: Language) -> Result<Corpus> {
    parse_wikiann_with(source, name, language, &ParseOptions::default())
}

pub fn parse_wikiann_with<R: BufRead>(
    source: R,
    name: &str,
    language: Language,
    options: &ParseOptions,
) -> Result<Corpus> {
    let options = ParseOptions {
        scheme: options.scheme.or(Some(SchemeKind::Iob)),
    };
    let sentences = read_sentences(source, |line, line_no| {
        let fields = split_fields(line, line_no)?;
        let text = match language_prefix(fields.token) {
            Some((code, rest)) if code == language.code() => rest,
            Some((code, _)) => {
                return Err(Error::LanguageMismatch {
                    line: line_no,
                    expected: language.code().to_string(),
                    found: code.to_string(),
                })
            }
            None => fields.token,
        };
        check_tag(fields.tag, line_no)?;
        Ok(Token::new(text, fields.tag))
    })?;
    finish(name, language, sentences, &options)
}

/// `hi:दिल्ली` → `Some(("hi", "दिल्ली"))`. A prefix is two or three lowercase
/// ASCII letters followed by a colon and at least one more character.
fn language_prefix(token: &str) -> Option<(&str, &str)> {
    let (code, rest) = token.split_once(':')?;
    let is_code = (2..=3).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase());
    (is_code && !rest.is_empty()).then_some((code, rest))
}

fn check_tag(tag: &str, line: usize) -> Result<()> {
    if tag == OUTSIDE {
        return Ok(());
    }
    match split_iob(tag) {
        Some((_, class)) if WIKIANN_CLASSES.contains(&class) => Ok(()),
        _ => Err(Error::UnexpectedTag {
            line,
            tag: tag.to_string(),
            reason: "WikiAnn tags are O or B-/I- over PER, LOC, ORG".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_matching_prefix() {
        let c = parse_wikiann("mr:पुणे\tB-LOC\n".as_bytes(), "w", Language::Marathi).unwrap();
        assert_eq!(c.sentences[0].tokens[0], Token::new("पुणे", "B-LOC"));
        assert_eq!(c.scheme.kind, SchemeKind::Iob);
    }

    #[test]
    fn plain_tokens_are_accepted() {
        let c = parse_wikiann("पुणे B-LOC\nशहर O\n".as_bytes(), "w", Language::Marathi).unwrap();
        assert_eq!(c.token_count(), 2);
    }

    #[test]
    fn prefix_for_other_language() {
        let err = parse_wikiann("hi:दिल्ली\tB-LOC\n".as_bytes(), "w", Language::Marathi).unwrap_err();
        assert!(matches!(err, Error::LanguageMismatch { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn colon_inside_token_is_not_a_prefix() {
        assert_eq!(language_prefix("10:30"), None);
        assert_eq!(language_prefix("mr:"), None);
        assert_eq!(language_prefix("Mr:x"), None);
        assert_eq!(language_prefix("hin:x"), Some(("hin", "x")));
    }

    #[test]
    fn rejects_foreign_classes() {
        let err = parse_wikiann("x\tB-MISC\n".as_bytes(), "w", Language::Hindi).unwrap_err();
        assert!(matches!(err, Error::UnexpectedTag { .. }));
    }
}
