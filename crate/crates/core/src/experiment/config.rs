use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus_io::Language;
use crate::error::{Error, Result};
use crate::evaluation::RegimeKind;
use crate::harmonize::{builtin_map, SplitSpec};
use crate::modeling::{EncoderRegistry, Schedule, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    /// Two-column token/tag lines, blank line between sentences.
    Conll,
    /// WikiAnn dump lines with a `xx:` language prefix on each token.
    Wikiann,
}

impl fmt::Display for DataFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataFormat::Conll => "conll",
            DataFormat::Wikiann => "wikiann",
        })
    }
}

/// Where one dataset's splits come from. Either a single `path` cut by
/// `split`, or separate `train`/`test` files with an optional `tune` file;
/// without one, 10% of train is held out as tune.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSource {
    pub format: DataFormat,
    pub language: Language,
    /// A built-in map name (`iitb_iob`, `ijcnlp_flat`, `wikiann_iob`) or a
    /// tag-map file.
    pub tag_map: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tune: Option<PathBuf>,
}

impl DatasetSource {
    fn files_mut(&mut self) -> impl Iterator<Item = &mut PathBuf> {
        [&mut self.path, &mut self.train, &mut self.test, &mut self.tune]
            .into_iter()
            .flatten()
    }

    pub fn files(&self) -> impl Iterator<Item = &PathBuf> {
        [&self.path, &self.train, &self.test, &self.tune].into_iter().flatten()
    }

    fn validate(&self, name: &str) -> Result<()> {
        let bad = |why: &str| Err(Error::Experiment(format!("dataset `{name}`: {why}")));
        match (&self.path, &self.train, &self.test) {
            (Some(_), None, None) => {
                if self.tune.is_some() {
                    return bad("`tune` needs `train` and `test`, not `path`");
                }
                match &self.split {
                    Some(s) => {
                        s.parse::<SplitSpec>()?;
                    }
                    None => return bad("`path` needs a `split` such as \"70-15-15\""),
                }
            }
            (None, Some(_), Some(_)) => {
                if self.split.is_some() {
                    return bad("`split` applies only to `path`");
                }
            }
            _ => return bad("give either `path` + `split` or `train` + `test` (+ `tune`)"),
        }
        if self.language == Language::Mixed {
            return bad("language must be `hi` or `mr`");
        }
        Ok(())
    }
}

/// Partial [`TrainConfig`]; unset fields keep the per-encoder defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainOverrides {
    pub max_sequence_length: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub dropout: Option<f64>,
    pub weight_decay: Option<f64>,
    pub schedule: Option<Schedule>,
}

impl TrainOverrides {
    pub fn apply(&self, mut c: TrainConfig) -> TrainConfig {
        if let Some(v) = self.max_sequence_length {
            c.max_sequence_length = v;
        }
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.learning_rate {
            c.learning_rate = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = self.dropout {
            c.dropout = v;
        }
        if let Some(v) = self.weight_decay {
            c.weight_decay = v;
        }
        if let Some(v) = self.schedule {
            c.schedule = v;
        }
        c
    }
}

/// One training regime. `test` defaults to the members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSpec {
    pub kind: RegimeKind,
    /// Empty for `merged-all` means every dataset.
    #[serde(default)]
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<Vec<String>>,
    /// Display label; derived from kind and members when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl RegimeSpec {
    pub fn label(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        format!("{}({})", self.kind, self.members.join("+"))
    }

    pub fn tests(&self) -> &[String] {
        self.test.as_deref().unwrap_or(&self.members)
    }
}

fn default_parallelism() -> usize {
    1
}

fn default_store() -> PathBuf {
    PathBuf::from("runs")
}

/// One experiment, fully described by a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Run store root.
    #[serde(default = "default_store")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Cells trained at once.
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    pub encoders: Vec<String>,
    #[serde(default)]
    pub train: TrainOverrides,
    pub datasets: BTreeMap<String, DatasetSource>,
    pub regimes: Vec<RegimeSpec>,
}

impl ExperimentConfig {
    /// Parses TOML text; relative paths are taken against `base_dir`.
    /// `merged-all` regimes without members get every dataset.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Experiment(e.to_string()))?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        resolve(&mut cfg.output_dir);
        for d in cfg.datasets.values_mut() {
            d.files_mut().for_each(resolve);
            if builtin_map(&d.tag_map).is_none() {
                let mut p = PathBuf::from(&d.tag_map);
                resolve(&mut p);
                d.tag_map = p.to_string_lossy().into_owned();
            }
        }
        let all: Vec<String> = cfg.datasets.keys().cloned().collect();
        for r in &mut cfg.regimes {
            if r.kind == RegimeKind::MergedAll && r.members.is_empty() {
                r.name.get_or_insert_with(|| "merged-all".into());
                r.members = all.clone();
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base).map_err(|e| e.in_file(path))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Structural checks that need no file access beyond tag-map existence.
    pub fn validate(&self, registry: &EncoderRegistry) -> Result<()> {
        let bad = |why: String| Err(Error::Experiment(why));
        if self.name.trim().is_empty() {
            return bad("`name` is empty".into());
        }
        if self.parallelism == 0 {
            return bad("`parallelism` must be at least 1".into());
        }
        if self.encoders.is_empty() {
            return bad("no encoders listed".into());
        }
        let mut seen = BTreeSet::new();
        for key in &self.encoders {
            let spec = registry.get(key)?;
            if !seen.insert(key) {
                return bad(format!("encoder `{key}` listed twice"));
            }
            self.train_config(spec)?;
        }
        if self.datasets.is_empty() {
            return bad("no datasets declared".into());
        }
        for (name, d) in &self.datasets {
            d.validate(name)?;
        }
        if self.regimes.is_empty() {
            return bad("no regimes declared".into());
        }
        let mut labels = BTreeSet::new();
        for r in &self.regimes {
            let label = r.label();
            for m in r.members.iter().chain(r.tests()) {
                if !self.datasets.contains_key(m) {
                    return bad(format!("regime `{label}` names undeclared dataset `{m}`"));
                }
            }
            let distinct: BTreeSet<&String> = r.members.iter().collect();
            if distinct.len() != r.members.len() {
                return bad(format!("regime `{label}` repeats a member"));
            }
            let ok = match r.kind {
                RegimeKind::Mono => r.members.len() == 1,
                RegimeKind::MergedPair => r.members.len() == 2,
                RegimeKind::MergedAll => r.members.len() >= 2,
            };
            if !ok {
                return bad(format!(
                    "regime `{label}`: {} takes {} members, got {}",
                    r.kind,
                    match r.kind {
                        RegimeKind::Mono => "1",
                        RegimeKind::MergedPair => "2",
                        RegimeKind::MergedAll => "at least 2",
                    },
                    r.members.len()
                ));
            }
            if r.tests().is_empty() {
                return bad(format!("regime `{label}` has no test set"));
            }
            if !labels.insert(label.clone()) {
                return bad(format!("two regimes are both labelled `{label}`"));
            }
        }
        Ok(())
    }

    /// Defaults for `spec`, this file's overrides, and the experiment seed.
    pub fn train_config(&self, spec: &crate::modeling::EncoderSpec) -> Result<TrainConfig> {
        let mut c = self.train.apply(TrainConfig::defaults_for(spec));
        c.seed = self.seed;
        c.validate()?;
        Ok(c)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}
