use std::collections::BTreeMap;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::{DatasetSource, RegimeSpec};
use crate::error::{Error, Result};
use crate::evaluation::{MetricReport, RegimeKind, ScoredRun};
use crate::modeling::{EncoderSpec, EpochLog, TrainConfig};

pub const RECORD_FILE: &str = "record.json";
pub const TAGGER_DIR: &str = "tagger";
pub const RECORD_FORMAT_VERSION: u32 = 1;

/// Everything needed to re-run one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSnapshot {
    pub experiment: String,
    pub config_fingerprint: String,
    pub regime: RegimeSpec,
    pub regime_label: String,
    /// Sources of every member and test dataset.
    pub datasets: BTreeMap<String, DatasetSource>,
    pub encoder: EncoderSpec,
    pub encoder_hash: String,
    pub train: TrainConfig,
    pub seed: u64,
    pub shuffle_algorithm: String,
    /// How the tune set of a merged regime was formed.
    pub tune_protocol: String,
}

/// Persisted result of one (regime, encoder, test set) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub format_version: u32,
    pub run_id: String,
    pub created_unix_ms: u64,
    pub snapshot: CellSnapshot,
    pub encoder: String,
    pub regime: RegimeKind,
    pub regime_label: String,
    pub test_dataset: String,
    pub train_fingerprint: String,
    pub tune_fingerprint: String,
    pub test_fingerprint: String,
    pub train_sentences: usize,
    pub metrics: MetricReport,
    pub history: Vec<EpochLog>,
    pub best_epoch: Option<usize>,
    pub wall_time_secs: f64,
    pub backend: String,
}

impl RunRecord {
    pub fn scored(&self) -> ScoredRun {
        ScoredRun {
            run_id: self.run_id.clone(),
            encoder: self.encoder.clone(),
            regime: self.regime,
            regime_label: self.regime_label.clone(),
            test_dataset: self.test_dataset.clone(),
            micro_f1: self.metrics.micro_f1,
            macro_f1: self.metrics.macro_f1,
            token_accuracy: self.metrics.token_accuracy,
        }
    }
}

/// Content-addressed identifier: SHA-256 over the cell's training-relevant
/// settings, the data fingerprints and the seed. Paths and timestamps are
/// left out so that moving the data or re-running later gives the same id.
pub fn run_id(snapshot: &CellSnapshot, train_fp: &str, tune_fp: &str, test_dataset: &str, test_fp: &str) -> String {
    use sha2::{Digest, Sha256};
    #[derive(Serialize)]
    struct Identity<'a> {
        format_version: u32,
        regime_kind: RegimeKind,
        regime_label: &'a str,
        members: &'a [String],
        encoder_hash: &'a str,
        train: &'a TrainConfig,
        seed: u64,
        shuffle_algorithm: &'a str,
        tune_protocol: &'a str,
        train_fingerprint: &'a str,
        tune_fingerprint: &'a str,
        test_dataset: &'a str,
        test_fingerprint: &'a str,
    }
    let id = Identity {
        format_version: RECORD_FORMAT_VERSION,
        regime_kind: snapshot.regime.kind,
        regime_label: &snapshot.regime_label,
        members: &snapshot.regime.members,
        encoder_hash: &snapshot.encoder_hash,
        train: &snapshot.train,
        seed: snapshot.seed,
        shuffle_algorithm: &snapshot.shuffle_algorithm,
        tune_protocol: &snapshot.tune_protocol,
        train_fingerprint: train_fp,
        tune_fingerprint: tune_fp,
        test_dataset,
        test_fingerprint: test_fp,
    };
    hex::encode(Sha256::digest(serde_json::to_vec(&id).expect("identity serializes")))
}

pub(crate) fn now_unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// One directory per run id under `root`, each holding `record.json` and
/// the saved tagger. Directories appear atomically: they are assembled under
/// a hidden temporary name and renamed into place.
#[derive(Debug, Clone)]
pub struct RunStore {
    pub root: PathBuf,
}

impl RunStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunStore { root: root.into() }
    }

    pub fn run_dir(&self, run_id: &str) -> PathBuf {
        self.root.join(run_id)
    }

    pub fn contains(&self, run_id: &str) -> bool {
        self.run_dir(run_id).join(RECORD_FILE).is_file()
    }

    pub(crate) fn staging_dir(&self, tag: &str) -> PathBuf {
        static COUNTER: AtomicUsize = AtomicUsize::new(0);
        let n = COUNTER.fetch_add(1, Ordering::Relaxed);
        self.root
            .join(format!(".staging-{tag}-{}-{}-{n}", std::process::id(), now_unix_ms()))
    }

    /// Writes `record` with a copy of the tagger in `tagger_src`. Returns
    /// false when the run already existed and `force` is off.
    pub fn insert(&self, record: &RunRecord, tagger_src: &Path, force: bool) -> Result<bool> {
        fs::create_dir_all(&self.root)?;
        let target = self.run_dir(&record.run_id);
        if target.exists() && !force {
            return Ok(false);
        }
        let tmp = self.staging_dir(&record.run_id[..12.min(record.run_id.len())]);
        fs::create_dir_all(tmp.join(TAGGER_DIR))?;
        let result = (|| -> Result<bool> {
            for entry in fs::read_dir(tagger_src)? {
                let entry = entry?;
                let dest = tmp.join(TAGGER_DIR).join(entry.file_name());
                if fs::hard_link(entry.path(), &dest).is_err() {
                    fs::copy(entry.path(), &dest)?;
                }
            }
            fs::write(tmp.join(RECORD_FILE), serde_json::to_string_pretty(record)?)?;
            if force && target.exists() {
                fs::remove_dir_all(&target)?;
            }
            match fs::rename(&tmp, &target) {
                Ok(()) => Ok(true),
                // Another writer got there first.
                Err(_) if target.join(RECORD_FILE).is_file() => Ok(false),
                Err(e) => Err(e.into()),
            }
        })();
        if tmp.exists() {
            let _ = fs::remove_dir_all(&tmp);
        }
        result
    }

    /// Every record, sorted by creation time then run id.
    pub fn records(&self) -> Result<Vec<RunRecord>> {
        let entries = match fs::read_dir(&self.root) {
            Ok(e) => e,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for entry in entries {
            let entry = entry?;
            let name = entry.file_name();
            if name.to_string_lossy().starts_with('.') || !entry.file_type()?.is_dir() {
                continue;
            }
            let path = entry.path().join(RECORD_FILE);
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) if e.kind() == ErrorKind::NotFound => {
                    return Err(Error::CorruptStore {
                        path: entry.path(),
                        reason: format!("no {RECORD_FILE}"),
                    })
                }
                Err(e) => return Err(e.into()),
            };
            let record: RunRecord = serde_json::from_str(&text).map_err(|e| Error::CorruptStore {
                path: path.clone(),
                reason: e.to_string(),
            })?;
            if record.run_id != name.to_string_lossy() {
                return Err(Error::CorruptStore {
                    path,
                    reason: format!("record id {} does not match its directory", record.run_id),
                });
            }
            out.push(record);
        }
        out.sort_by(|a, b| (a.created_unix_ms, &a.run_id).cmp(&(b.created_unix_ms, &b.run_id)));
        Ok(out)
    }
}

/// Conjunction of `key=value` terms separated by commas. Keys: `encoder`,
/// `regime` (kind or label), `test` (alias `dataset`), `run` (id prefix).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunFilter {
    terms: Vec<(FilterKey, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FilterKey {
    Encoder,
    Regime,
    Test,
    Run,
}

impl std::str::FromStr for RunFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for term in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = term
                .split_once('=')
                .ok_or_else(|| Error::InvalidFilter(format!("`{term}` is not key=value")))?;
            let key = match k.trim() {
                "encoder" => FilterKey::Encoder,
                "regime" => FilterKey::Regime,
                "test" | "dataset" => FilterKey::Test,
                "run" | "run_id" => FilterKey::Run,
                other => return Err(Error::InvalidFilter(format!("unknown key `{other}`"))),
            };
            let v = v.trim().trim_matches('"');
            if v.is_empty() {
                return Err(Error::InvalidFilter(format!("`{term}` has an empty value")));
            }
            terms.push((key, v.to_string()));
        }
        Ok(RunFilter { terms })
    }
}

impl RunFilter {
    pub fn matches(&self, r: &RunRecord) -> bool {
        self.terms.iter().all(|(k, v)| match k {
            FilterKey::Encoder => &r.encoder == v,
            FilterKey::Regime => r.regime.name() == v || &r.regime_label == v,
            FilterKey::Test => &r.test_dataset == v,
            FilterKey::Run => r.run_id.starts_with(v.as_str()),
        })
    }
}

/// Records in `store` matching `filter`, oldest first.
pub fn list_runs(store: &Path, filter: &str) -> Result<Vec<RunRecord>> {
    let filter: RunFilter = filter.parse()?;
    Ok(RunStore::new(store)
        .records()?
        .into_iter()
        .filter(|r| filter.matches(r))
        .collect())
}
