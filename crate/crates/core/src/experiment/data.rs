use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use super::config::{DataFormat, DatasetSource};
use crate::corpus_io::{parse_conll, parse_wikiann, Corpus, Language};
use crate::error::{Error, Result};
use crate::harmonize::{builtin_map, harmonize, hold_out_tune, make_split, SplitSpec, TagMap};

/// Reads one corpus file in the given on-disk format.
pub fn read_corpus(path: &Path, format: DataFormat, language: Language, name: &str) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    let reader = BufReader::new(file);
    match format {
        DataFormat::Conll => parse_conll(reader, name, language),
        DataFormat::Wikiann => parse_wikiann(reader, name, language),
    }
    .map_err(|e| e.in_file(path))
}

/// A built-in map name or a tag-map file path.
pub fn resolve_tag_map(name_or_path: &str) -> Result<TagMap> {
    match builtin_map(name_or_path) {
        Some(m) => Ok(m),
        None => TagMap::load(Path::new(name_or_path)),
    }
}

/// Harmonized train/test/tune splits of one configured dataset.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub name: String,
    pub train: Corpus,
    pub test: Corpus,
    pub tune: Corpus,
    /// Tune was carved out of train rather than shipped.
    pub tune_held_out: bool,
}

pub fn load_dataset(name: &str, source: &DatasetSource, seed: u64) -> Result<LoadedDataset> {
    let map = resolve_tag_map(&source.tag_map)?;
    let read = |path: &Path, part: &str| -> Result<Corpus> {
        let raw = read_corpus(path, source.format, source.language, &format!("{name}.{part}"))?;
        harmonize(&raw, &map).map_err(|e| e.in_file(path))
    };
    if let (Some(path), Some(split)) = (&source.path, &source.split) {
        let mut spec: SplitSpec = split.parse()?;
        spec.seed = seed;
        let whole = read(path, "all")?;
        let parts = make_split(&whole.with_sentences(name, whole.sentences.clone()), &spec)?;
        return Ok(LoadedDataset {
            name: name.into(),
            train: parts.train,
            test: parts.test,
            tune: parts.tune,
            tune_held_out: false,
        });
    }
    let (Some(train_path), Some(test_path)) = (&source.train, &source.test) else {
        return Err(Error::Experiment(format!("dataset `{name}` has no usable source files")));
    };
    let train = read(train_path, "train")?;
    let test = read(test_path, "test")?;
    let (train, tune, held_out) = match &source.tune {
        Some(p) => (train, read(p, "tune")?, false),
        None => {
            let (train, tune) = hold_out_tune(&train, seed)?;
            (train, tune, true)
        }
    };
    Ok(LoadedDataset {
        name: name.into(),
        train,
        test,
        tune,
        tune_held_out: held_out,
    })
}
