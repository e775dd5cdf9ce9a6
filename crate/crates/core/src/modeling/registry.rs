use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::arch::EncoderArch;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncoderFamily {
    #[serde(rename = "bert")]
    Bert,
    #[serde(rename = "albert")]
    Albert,
    #[serde(rename = "roberta")]
    Roberta,
    /// Small randomly initialized BERT-layout encoder built on the fly.
    #[serde(rename = "tiny-test")]
    TinyTest,
}

impl fmt::Display for EncoderFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncoderFamily::Bert => "bert",
            EncoderFamily::Albert => "albert",
            EncoderFamily::Roberta => "roberta",
            EncoderFamily::TinyTest => "tiny-test",
        })
    }
}

/// A pretrained encoder the harness knows how to fine-tune.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub key: String,
    pub description: String,
    pub multilingual: bool,
    pub family: EncoderFamily,
    /// Hub repository id, e.g. `l3cube-pune/marathi-roberta`. `None` for
    /// encoders built locally.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revision: Option<String>,
}

impl EncoderSpec {
    fn hub(key: &str, description: &str, multilingual: bool, family: EncoderFamily, repo: &str) -> Self {
        EncoderSpec {
            key: key.into(),
            description: description.into(),
            multilingual,
            family,
            checkpoint: Some(repo.into()),
            revision: None,
        }
    }

    pub fn is_tiny(&self) -> bool {
        self.family == EncoderFamily::TinyTest
    }

    /// Content hash of everything that determines the encoder's weights and
    /// architecture. The description is not part of it.
    pub fn content_hash(&self) -> String {
        #[derive(Serialize)]
        struct Identity<'a> {
            key: &'a str,
            family: EncoderFamily,
            checkpoint: Option<&'a str>,
            revision: Option<&'a str>,
            tiny_arch: Option<EncoderArch>,
        }
        let identity = Identity {
            key: &self.key,
            family: self.family,
            checkpoint: self.checkpoint.as_deref(),
            revision: self.revision.as_deref(),
            tiny_arch: self.is_tiny().then(|| EncoderArch::tiny_test(0)),
        };
        let bytes = serde_json::to_vec(&identity).expect("identity serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

pub const TINY_TEST: &str = "tiny-test";

/// Named roster of encoders. `version` changes whenever entries change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderRegistry {
    pub version: String,
    encoders: Vec<EncoderSpec>,
}

impl EncoderRegistry {
    pub fn new(version: impl Into<String>, encoders: Vec<EncoderSpec>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for e in &encoders {
            if !seen.insert(e.key.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate encoder key `{}`", e.key)));
            }
        }
        Ok(EncoderRegistry {
            version: version.into(),
            encoders,
        })
    }

    /// The seven published Hindi/Marathi-capable encoders plus `tiny-test`.
    pub fn builtin() -> Self {
        use EncoderFamily::*;
        let encoders = vec![
            EncoderSpec::hub("mbert", "multilingual BERT, 104 languages", true, Bert, "bert-base-multilingual-cased"),
            EncoderSpec::hub("indic-bert", "multilingual ALBERT over 12 Indian languages", true, Albert, "ai4bharat/indic-bert"),
            EncoderSpec::hub("xlm-roberta", "XLM-RoBERTa base, 100 languages", true, Roberta, "xlm-roberta-base"),
            EncoderSpec::hub("maha-albert", "Marathi ALBERT", false, Albert, "l3cube-pune/marathi-albert-v2"),
            EncoderSpec::hub("roberta-hindi", "Hindi RoBERTa", false, Roberta, "flax-community/roberta-hindi"),
            EncoderSpec::hub("mahabert", "Marathi BERT", false, Bert, "l3cube-pune/marathi-bert-v2"),
            EncoderSpec::hub("maha-roberta", "Marathi RoBERTa", false, Roberta, "l3cube-pune/marathi-roberta"),
            EncoderSpec {
                key: TINY_TEST.into(),
                description: "2-layer randomly initialized encoder for CPU smoke tests".into(),
                multilingual: true,
                family: TinyTest,
                checkpoint: None,
                revision: None,
            },
        ];
        EncoderRegistry::new("1", encoders).expect("built-in keys are unique")
    }

    pub fn get(&self, key: &str) -> Result<&EncoderSpec> {
        self.encoders
            .iter()
            .find(|e| e.key == key)
            .ok_or_else(|| Error::UnknownEncoder(key.to_string()))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.encoders.iter().any(|e| e.key == key)
    }

    pub fn encoders(&self) -> &[EncoderSpec] {
        &self.encoders
    }

    /// Adds `spec`, replacing any entry with the same key.
    pub fn with_encoder(mut self, spec: EncoderSpec) -> Self {
        match self.encoders.iter_mut().find(|e| e.key == spec.key) {
            Some(slot) => *slot = spec,
            None => self.encoders.push(spec),
        }
        self
    }

    /// Position of `key` in the roster, for ordering report columns.
    pub fn position(&self, key: &str) -> Option<usize> {
        self.encoders.iter().position(|e| e.key == key)
    }
}

impl Default for EncoderRegistry {
    fn default() -> Self {
        EncoderRegistry::builtin()
    }
}

pub fn list_encoders() -> Vec<EncoderSpec> {
    EncoderRegistry::builtin().encoders
}
