use std::io::{BufRead, Write};

use log::warn;

use super::{infer_scheme, Corpus, Language, SchemeKind, Sentence, Token};
use crate::error::{Error, Result};

/// Knobs for the column parsers.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Force the scheme kind instead of inferring it from the tags.
    pub scheme: Option<SchemeKind>,
}

/// One data line split into token and tag.
pub(super) struct Fields<'a> {
    pub token: &'a str,
    pub tag: &'a str,
}

/// Splits on a tab or runs of spaces. More than two fields keeps the first as
/// the token and the last as the tag.
pub(super) fn split_fields(line: &str, line_no: usize) -> Result<Fields<'_>> {
    let mut fields = line.split_whitespace();
    let token = fields.next();
    let rest: Vec<&str> = fields.collect();
    match (token, rest.last()) {
        (Some(token), Some(tag)) => Ok(Fields { token, tag }),
        _ => Err(Error::MalformedLine {
            line: line_no,
            reason: "expected `<token><separator><tag>`".into(),
        }),
    }
}

/// Drives a line-oriented reader, grouping data lines into sentences at blank
/// lines. `on_line` turns one non-blank line into a token.
pub(super) fn read_sentences<R, F>(source: R, mut on_line: F) -> Result<Vec<Sentence>>
where
    R: BufRead,
    F: FnMut(&str, usize) -> Result<Token>,
{
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    let mut wide_lines = 0usize;
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::MalformedLine {
                line: line_no,
                reason: "not valid UTF-8".into(),
            },
            _ => Error::Io(e),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(Sentence::new(std::mem::take(&mut current)));
            }
            continue;
        }
        if line.split_whitespace().count() > 2 {
            wide_lines += 1;
            if wide_lines == 1 {
                warn!("line {line_no}: more than two columns, using the first as token and the last as tag");
            }
        }
        current.push(on_line(line, line_no)?);
    }
    if !current.is_empty() {
        sentences.push(Sentence::new(current));
    }
    if wide_lines > 1 {
        warn!("{wide_lines} lines had more than two columns");
    }
    Ok(sentences)
}

/// Parses two-column `token<TAB>tag` text with blank-line sentence breaks.
pub fn parse_conll<R: BufRead>(source: R, name: &str, language: Language) -> Result<Corpus> {
    parse_conll_with(source, name, language, &ParseOptions::default())
}

pub fn parse_conll_with<R: BufRead>(
    source: R,
    name: &str,
    language: Language,
    options: &ParseOptions,
) -> Result<Corpus> {
    let sentences = read_sentences(source, |line, line_no| {
        let fields = split_fields(line, line_no)?;
        Ok(Token::new(fields.token, fields.tag))
    })?;
    finish(name, language, sentences, options)
}

pub(super) fn finish(
    name: &str,
    language: Language,
    sentences: Vec<Sentence>,
    options: &ParseOptions,
) -> Result<Corpus> {
    if sentences.is_empty() {
        return Err(Error::EmptyCorpus(name.to_string()));
    }
    let scheme = infer_scheme(&sentences, options.scheme);
    Ok(Corpus {
        name: name.to_string(),
        language,
        scheme,
        sentences,
    })
}

/// Writes `token<TAB>tag` lines, each sentence followed by one blank line.
pub fn serialize_conll<W: Write>(corpus: &Corpus, mut sink: W) -> Result<()> {
    for sentence in &corpus.sentences {
        for token in &sentence.tokens {
            writeln!(sink, "{}\t{}", token.text, token.tag)?;
        }
        writeln!(sink)?;
    }
    sink.flush()?;
    Ok(())
}

pub fn to_conll_string(corpus: &Corpus) -> String {
    let mut buf = Vec::new();
    serialize_conll(corpus, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("corpus text is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::SchemeKind;

    fn parse(text: &str) -> Result<Corpus> {
        parse_conll(text.as_bytes(), "t", Language::Marathi)
    }

    #[test]
    fn minimal_iob_sentence() {
        let c = parse("रमेश\tB-PERSON\n\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.sentences[0].tokens, vec![Token::new("रमेश", "B-PERSON")]);
        assert_eq!(c.scheme.kind, SchemeKind::Iob);
    }

    #[test]
    fn missing_tag_reports_line() {
        let err = parse("a\tO\n\nरमेश\n").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse("\n\n  \n"), Err(Error::EmptyCorpus(_))));
    }

    #[test]
    fn spaces_extra_columns_and_repeated_blanks() {
        let c = parse("a   NEP\nb x y NEL\n\n\n\nc\tO\n\n\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.sentences[0].tokens[1], Token::new("b", "NEL"));
        assert_eq!(c.scheme.kind, SchemeKind::Flat);
        assert!(c.scheme.contains("O"));
    }

    #[test]
    fn crlf_and_no_trailing_blank() {
        let c = parse("a\tO\r\nb\tNEP\r\n").unwrap();
        assert_eq!(c.sentences[0].tokens[1], Token::new("b", "NEP"));
    }

    #[test]
    fn forced_scheme() {
        let opts = ParseOptions {
            scheme: Some(SchemeKind::Flat),
        };
        let c = parse_conll_with("x\tB-LOC\n".as_bytes(), "t", Language::Hindi, &opts).unwrap();
        assert_eq!(c.scheme.kind, SchemeKind::Flat);
    }

    #[test]
    fn invalid_utf8() {
        let bytes: &[u8] = b"a\tO\n\xff\tO\n";
        assert!(matches!(
            parse_conll(bytes, "t", Language::Hindi),
            Err(Error::MalformedLine { line: 2, .. })
        ));
    }

    #[test]
    fn serialize_one_sentence() {
        let c = Corpus::from_sentences(
            "t",
            Language::Marathi,
            vec![Sentence::from_pairs(&["रमेश"], &["NEP"])],
        );
        let text = to_conll_string(&c);
        assert_eq!(text, "रमेश\tNEP\n\n");
        assert!(parse(&text).unwrap().same_sentences(&c));
    }
}
