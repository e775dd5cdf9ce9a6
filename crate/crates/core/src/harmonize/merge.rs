use super::shuffle::shuffle;
use crate::corpus_io::{Corpus, Language, TagScheme};
use crate::error::{Error, Result};

/// Concatenates harmonized corpora and reshuffles the result with `seed`.
///
/// Each sentence keeps (or gains) a `source` naming the corpus it came from.
/// The language is the shared input language, or [`Language::Mixed`] when the
/// inputs differ.
pub fn merge_corpora(corpora: &[Corpus], seed: u64) -> Result<Corpus> {
    let Some(first) = corpora.first() else {
        return Err(Error::EmptyCorpus("<merge of zero corpora>".into()));
    };
    if let Some(bad) = corpora.iter().find(|c| !c.scheme.is_harmonized()) {
        return Err(Error::SchemeMismatch(format!(
            "corpus `{}` is {} over {:?}, expected the harmonized flat scheme",
            bad.name, bad.scheme.kind, bad.scheme.vocabulary
        )));
    }
    let language = if corpora.iter().all(|c| c.language == first.language) {
        first.language
    } else {
        Language::Mixed
    };
    let mut sentences = Vec::with_capacity(corpora.iter().map(Corpus::len).sum());
    for corpus in corpora {
        sentences.extend(corpus.sentences.iter().cloned().map(|mut s| {
            s.source.get_or_insert_with(|| corpus.name.clone());
            s
        }));
    }
    shuffle(&mut sentences, seed);
    let name = corpora.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join("+");
    Ok(Corpus {
        name,
        language,
        scheme: TagScheme::harmonized(),
        sentences,
    })
}
