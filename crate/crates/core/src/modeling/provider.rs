use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use candle_core::{Device, Tensor};

use super::registry::EncoderSpec;
use crate::error::{Error, Result};

/// Files making up one pretrained checkpoint on local disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointFiles {
    pub dir: PathBuf,
    pub config: PathBuf,
    pub weights: PathBuf,
    pub tokenizer: PathBuf,
}

impl CheckpointFiles {
    /// Looks for `config.json`, `tokenizer.json` and `model.safetensors`
    /// (or `pytorch_model.bin`) directly inside `dir`.
    pub fn in_dir(dir: &Path) -> Option<Self> {
        let config = dir.join("config.json");
        let tokenizer = dir.join("tokenizer.json");
        let weights = ["model.safetensors", "pytorch_model.bin"]
            .iter()
            .map(|f| dir.join(f))
            .find(|p| p.is_file())?;
        (config.is_file() && tokenizer.is_file()).then(|| CheckpointFiles {
            dir: dir.to_path_buf(),
            config,
            weights,
            tokenizer,
        })
    }

    pub fn load_tensors(&self) -> Result<HashMap<String, Tensor>> {
        let path = &self.weights;
        let loaded = if path.extension().is_some_and(|e| e == "safetensors") {
            candle_core::safetensors::load(path, &Device::Cpu).map(|m| m.into_iter().collect())
        } else {
            candle_core::pickle::read_all(path).map(|v| v.into_iter().collect())
        };
        loaded.map_err(|e| Error::CorruptArtifact {
            path: path.clone(),
            reason: e.to_string(),
        })
    }
}

/// Materializes registry entries as local checkpoint files.
pub trait CheckpointProvider: Send + Sync {
    fn resolve(&self, spec: &EncoderSpec) -> Result<CheckpointFiles>;
}

/// Never has anything; every pretrained encoder is unavailable.
#[derive(Debug, Clone, Copy, Default)]
pub struct OfflineProvider;

impl CheckpointProvider for OfflineProvider {
    fn resolve(&self, spec: &EncoderSpec) -> Result<CheckpointFiles> {
        Err(Error::EncoderUnavailable {
            key: spec.key.clone(),
            reason: "offline mode".into(),
        })
    }
}

/// Checkpoints already on disk under `root`, either as `root/<org>/<name>`
/// or in the Hugging Face hub cache layout
/// (`root/models--<org>--<name>/snapshots/<ref>`).
#[derive(Debug, Clone)]
pub struct LocalCacheProvider {
    pub root: PathBuf,
}

impl LocalCacheProvider {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        LocalCacheProvider { root: root.into() }
    }

    /// `$HF_HOME/hub` or `~/.cache/huggingface/hub`.
    pub fn default_hub_cache() -> Option<Self> {
        if let Some(home) = std::env::var_os("HF_HUB_CACHE") {
            return Some(Self::new(home));
        }
        if let Some(home) = std::env::var_os("HF_HOME") {
            return Some(Self::new(PathBuf::from(home).join("hub")));
        }
        let home = std::env::var_os("HOME")?;
        Some(Self::new(PathBuf::from(home).join(".cache/huggingface/hub")))
    }

    fn candidates(&self, repo: &str, revision: Option<&str>) -> Vec<PathBuf> {
        let mut out = vec![self.root.join(repo)];
        let cached = self.root.join(format!("models--{}", repo.replace('/', "--")));
        let reference = revision.map(str::to_string).or_else(|| {
            fs::read_to_string(cached.join("refs/main"))
                .ok()
                .map(|s| s.trim().to_string())
        });
        if let Some(r) = reference {
            out.push(cached.join("snapshots").join(r));
        }
        out
    }
}

impl CheckpointProvider for LocalCacheProvider {
    fn resolve(&self, spec: &EncoderSpec) -> Result<CheckpointFiles> {
        let unavailable = |reason: String| Error::EncoderUnavailable {
            key: spec.key.clone(),
            reason,
        };
        let repo = spec
            .checkpoint
            .as_deref()
            .ok_or_else(|| unavailable("no checkpoint id".into()))?;
        self.candidates(repo, spec.revision.as_deref())
            .iter()
            .find_map(|d| CheckpointFiles::in_dir(d))
            .ok_or_else(|| unavailable(format!("`{repo}` not found under {}", self.root.display())))
    }
}

/// Downloads missing checkpoints from the hub into a local cache directory.
#[cfg(feature = "hub-download")]
#[derive(Debug, Clone)]
pub struct HubProvider {
    pub cache: LocalCacheProvider,
    pub endpoint: String,
}

#[cfg(feature = "hub-download")]
impl HubProvider {
    pub fn new(cache_root: impl Into<PathBuf>) -> Self {
        HubProvider {
            cache: LocalCacheProvider::new(cache_root),
            endpoint: std::env::var("HF_ENDPOINT").unwrap_or_else(|_| "https://huggingface.co".into()),
        }
    }

    fn fetch(&self, repo: &str, revision: &str, file: &str, dest: &Path) -> std::result::Result<bool, String> {
        let url = format!("{}/{repo}/resolve/{revision}/{file}", self.endpoint);
        let resp = reqwest::blocking::get(&url).map_err(|e| e.to_string())?;
        if resp.status() == reqwest::StatusCode::NOT_FOUND {
            return Ok(false);
        }
        let resp = resp.error_for_status().map_err(|e| e.to_string())?;
        let bytes = resp.bytes().map_err(|e| e.to_string())?;
        let tmp = dest.with_extension("part");
        fs::write(&tmp, &bytes).map_err(|e| e.to_string())?;
        fs::rename(&tmp, dest).map_err(|e| e.to_string())?;
        Ok(true)
    }
}

#[cfg(feature = "hub-download")]
impl CheckpointProvider for HubProvider {
    fn resolve(&self, spec: &EncoderSpec) -> Result<CheckpointFiles> {
        if let Ok(found) = self.cache.resolve(spec) {
            return Ok(found);
        }
        let unavailable = |reason: String| Error::EncoderUnavailable {
            key: spec.key.clone(),
            reason,
        };
        let repo = spec
            .checkpoint
            .as_deref()
            .ok_or_else(|| unavailable("no checkpoint id".into()))?;
        let revision = spec.revision.as_deref().unwrap_or("main");
        let dir = self.cache.root.join(repo);
        fs::create_dir_all(&dir).map_err(|e| unavailable(e.to_string()))?;
        for file in ["config.json", "tokenizer.json"] {
            if !self.fetch(repo, revision, file, &dir.join(file)).map_err(unavailable)? {
                return Err(unavailable(format!("`{repo}` has no {file}")));
            }
        }
        let mut got = false;
        for file in ["model.safetensors", "pytorch_model.bin"] {
            if self.fetch(repo, revision, file, &dir.join(file)).map_err(unavailable)? {
                got = true;
                break;
            }
        }
        if !got {
            return Err(unavailable(format!("`{repo}` has no weights file")));
        }
        CheckpointFiles::in_dir(&dir).ok_or_else(|| unavailable("download incomplete".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modeling::registry::EncoderRegistry;

    #[test]
    fn offline_fails_fast() {
        let reg = EncoderRegistry::builtin();
        let err = OfflineProvider.resolve(reg.get("mahabert").unwrap()).unwrap_err();
        assert!(matches!(err, Error::EncoderUnavailable { .. }));
    }

    #[test]
    fn local_cache_layouts() {
        let tmp = tempfile::tempdir().unwrap();
        let reg = EncoderRegistry::builtin();
        let spec = reg.get("maha-roberta").unwrap();
        let provider = LocalCacheProvider::new(tmp.path());
        assert!(provider.resolve(spec).is_err());

        let snap = tmp.path().join("models--l3cube-pune--marathi-roberta/snapshots/abc");
        fs::create_dir_all(&snap).unwrap();
        fs::create_dir_all(tmp.path().join("models--l3cube-pune--marathi-roberta/refs")).unwrap();
        fs::write(tmp.path().join("models--l3cube-pune--marathi-roberta/refs/main"), "abc\n").unwrap();
        for f in ["config.json", "tokenizer.json", "pytorch_model.bin"] {
            fs::write(snap.join(f), "").unwrap();
        }
        let files = provider.resolve(spec).unwrap();
        assert_eq!(files.dir, snap);
        assert!(files.weights.ends_with("pytorch_model.bin"));
    }
}
