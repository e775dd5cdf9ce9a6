use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus_io::{Corpus, OUTSIDE};
use crate::error::{Error, Result};
use crate::harmonize::HARMONIZED_TAGS;

/// Label id that marks positions excluded from the loss.
pub const IGNORE_ID: i64 = -100;

/// Ordered tag list with a tag ↔ id bijection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelVocabulary {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl LabelVocabulary {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("label `{l}` is empty or repeated")));
            }
        }
        if labels.is_empty() {
            return Err(Error::InvalidConfig("label vocabulary is empty".into()));
        }
        Ok(LabelVocabulary { labels, index })
    }

    /// O, NEP, NEO, NEL.
    pub fn harmonized() -> Self {
        let mut tags = HARMONIZED_TAGS.to_vec();
        tags.rotate_right(1);
        LabelVocabulary::new(tags).expect("harmonized tags are distinct")
    }

    /// Tags observed in the corpora: `O` first, then harmonized tags in
    /// canonical order, then any others sorted.
    pub fn from_corpora(corpora: &[&Corpus]) -> Self {
        let seen: BTreeSet<&str> = corpora
            .iter()
            .flat_map(|c| c.sentences.iter().flat_map(|s| s.tags()))
            .collect();
        let mut labels = vec![OUTSIDE.to_string()];
        labels.extend(
            HARMONIZED_TAGS
                .iter()
                .filter(|t| **t != OUTSIDE && seen.contains(*t))
                .map(|t| t.to_string()),
        );
        labels.extend(
            seen.iter()
                .filter(|t| !HARMONIZED_TAGS.contains(t))
                .map(|t| t.to_string()),
        );
        LabelVocabulary::new(labels).expect("observed tags are distinct")
    }

    pub fn id(&self, tag: &str) -> Result<usize> {
        self.index
            .get(tag)
            .copied()
            .ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    pub fn label(&self, id: usize) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.index.contains_key(tag)
    }
}

impl TryFrom<Vec<String>> for LabelVocabulary {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        LabelVocabulary::new(labels)
    }
}

impl From<LabelVocabulary> for Vec<String> {
    fn from(v: LabelVocabulary) -> Self {
        v.labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::{Language, Sentence};

    #[test]
    fn bijection() {
        let v = LabelVocabulary::harmonized();
        assert_eq!(v.labels(), ["O", "NEP", "NEO", "NEL"]);
        for (i, l) in v.labels().iter().enumerate() {
            assert_eq!(v.id(l).unwrap(), i);
            assert_eq!(v.label(i), Some(l.as_str()));
        }
        assert!(matches!(v.id("NEX"), Err(Error::UnknownTag(_))));
        assert!(IGNORE_ID < 0);
    }

    #[test]
    fn observed_order() {
        let c = Corpus::from_sentences(
            "c",
            Language::Hindi,
            vec![Sentence::from_pairs(&["a", "b", "c"], &["NEL", "ZZZ", "NEP"])],
        );
        let v = LabelVocabulary::from_corpora(&[&c]);
        assert_eq!(v.labels(), ["O", "NEP", "NEL", "ZZZ"]);
    }

    #[test]
    fn serde_roundtrip_and_rejects_duplicates() {
        let v = LabelVocabulary::harmonized();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<LabelVocabulary>(&json).unwrap(), v);
        assert!(serde_json::from_str::<LabelVocabulary>(r#"["O","O"]"#).is_err());
    }
}
