use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sentence_count: usize,
    /// Total tokens.
    pub tag_count: usize,
    pub per_tag: BTreeMap<String, usize>,
}

impl CorpusStats {
    /// Count for `tag`, zero when absent.
    pub fn count(&self, tag: &str) -> usize {
        self.per_tag.get(tag).copied().unwrap_or(0)
    }

    /// Elementwise sum of two histograms.
    pub fn merged(&self, other: &CorpusStats) -> CorpusStats {
        let mut per_tag = self.per_tag.clone();
        for (tag, n) in &other.per_tag {
            *per_tag.entry(tag.clone()).or_default() += n;
        }
        CorpusStats {
            sentence_count: self.sentence_count + other.sentence_count,
            tag_count: self.tag_count + other.tag_count,
            per_tag,
        }
    }

    /// Compares against expected values; only keys present in `expected` are checked.
    pub fn check(&self, expected: &ExpectedCounts) -> Vec<StatsMismatch> {
        let mut out = Vec::new();
        let mut push = |key: &str, want: Option<usize>, got: usize| {
            if let Some(want) = want {
                if want != got {
                    out.push(StatsMismatch {
                        key: key.to_string(),
                        expected: want,
                        actual: got,
                    });
                }
            }
        };
        push("sentences", expected.sentences, self.sentence_count);
        push("tags", expected.tags, self.tag_count);
        for (tag, want) in &expected.per_tag {
            push(tag, Some(*want), self.count(tag));
        }
        out
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentences\t{}", self.sentence_count)?;
        writeln!(f, "tags\t{}", self.tag_count)?;
        for (tag, n) in &self.per_tag {
            writeln!(f, "{tag}\t{n}")?;
        }
        Ok(())
    }
}

/// Counts every token's tag.
pub fn tag_histogram(corpus: &Corpus) -> CorpusStats {
    let mut per_tag: BTreeMap<String, usize> = BTreeMap::new();
    let mut tag_count = 0;
    for token in corpus.sentences.iter().flat_map(|s| &s.tokens) {
        tag_count += 1;
        match per_tag.get_mut(token.tag.as_str()) {
            Some(n) => *n += 1,
            None => {
                per_tag.insert(token.tag.clone(), 1);
            }
        }
    }
    CorpusStats {
        sentence_count: corpus.sentences.len(),
        tag_count,
        per_tag,
    }
}

/// Expected corpus counts, read from `key<TAB>value` lines. The keys
/// `sentences` and `tags` hold the totals; any other key is a tag.
/// Lines starting with `#` are comments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpectedCounts {
    pub sentences: Option<usize>,
    pub tags: Option<usize>,
    pub per_tag: BTreeMap<String, usize>,
}

impl ExpectedCounts {
    pub fn parse<R: BufRead>(source: R) -> Result<Self> {
        let mut out = ExpectedCounts::default();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: &str| Error::MalformedLine {
                line: idx + 1,
                reason: reason.to_string(),
            };
            let mut fields = line.split_whitespace();
            let (Some(key), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(malformed("expected `<key><TAB><count>`"));
            };
            let value: usize = value.parse().map_err(|_| malformed("count is not a non-negative integer"))?;
            match key {
                "sentences" => out.sentences = Some(value),
                "tags" => out.tags = Some(value),
                tag => {
                    out.per_tag.insert(tag.to_string(), value);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsMismatch {
    pub key: String,
    pub expected: usize,
    pub actual: usize,
}

impl fmt::Display for StatsMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, found {}", self.key, self.expected, self.actual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::{parse_conll, Language};

    #[test]
    fn histogram_conserves_tokens() {
        let c = parse_conll("a\tNEP\nb\tO\n\nc\tO\n".as_bytes(), "t", Language::Hindi).unwrap();
        let s = tag_histogram(&c);
        assert_eq!(s.sentence_count, 2);
        assert_eq!(s.tag_count, 3);
        assert_eq!(s.count("O"), 2);
        assert_eq!(s.count("NEL"), 0);
        assert_eq!(s.per_tag.values().sum::<usize>(), s.tag_count);
    }

    #[test]
    fn expected_counts_roundtrip_through_display() {
        let c = parse_conll("a\tNEP\nb\tO\n".as_bytes(), "t", Language::Hindi).unwrap();
        let s = tag_histogram(&c);
        let e = ExpectedCounts::parse(s.to_string().as_bytes()).unwrap();
        assert!(s.check(&e).is_empty());
        let wrong = ExpectedCounts::parse("# x\nsentences 2\nNEP\t3\n".as_bytes()).unwrap();
        let m = s.check(&wrong);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].key, "sentences");
    }

    #[test]
    fn expected_counts_reject_garbage() {
        assert!(ExpectedCounts::parse("tags x\n".as_bytes()).is_err());
        assert!(ExpectedCounts::parse("tags\n".as_bytes()).is_err());
    }
}
