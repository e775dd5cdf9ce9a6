use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter layout of an encoder checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Bert,
    Roberta,
    Albert,
}

impl Layout {
    /// Prefix of encoder parameter names in token-classification checkpoints.
    pub fn prefix(self) -> &'static str {
        match self {
            Layout::Bert => "bert",
            Layout::Roberta => "roberta",
            Layout::Albert => "albert",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    /// Exact (erf) GELU.
    #[serde(rename = "gelu")]
    Gelu,
    /// Tanh approximation of GELU.
    #[serde(rename = "gelu_new", alias = "gelu_pytorch_tanh", alias = "gelu_fast")]
    GeluTanh,
    #[serde(rename = "relu")]
    Relu,
}

/// Architecture hyperparameters, readable from a Hugging Face `config.json`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderArch {
    pub layout: Layout,
    pub vocab_size: usize,
    pub hidden_size: usize,
    /// Embedding width; differs from `hidden_size` only for ALBERT.
    pub embedding_size: usize,
    pub num_hidden_layers: usize,
    pub num_attention_heads: usize,
    pub intermediate_size: usize,
    pub max_position_embeddings: usize,
    pub type_vocab_size: usize,
    pub layer_norm_eps: f64,
    pub hidden_act: Activation,
    pub pad_token_id: usize,
    /// ALBERT parameter-sharing groups.
    pub num_hidden_groups: usize,
    pub inner_group_num: usize,
}

#[derive(Deserialize)]
struct HfConfig {
    model_type: String,
    vocab_size: usize,
    hidden_size: usize,
    embedding_size: Option<usize>,
    num_hidden_layers: usize,
    num_attention_heads: usize,
    intermediate_size: usize,
    max_position_embeddings: usize,
    #[serde(default = "two")]
    type_vocab_size: usize,
    #[serde(default = "default_eps")]
    layer_norm_eps: f64,
    #[serde(default = "default_act")]
    hidden_act: Activation,
    #[serde(default)]
    pad_token_id: Option<usize>,
    #[serde(default = "one")]
    num_hidden_groups: usize,
    #[serde(default = "one")]
    inner_group_num: usize,
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn default_eps() -> f64 {
    1e-12
}
fn default_act() -> Activation {
    Activation::Gelu
}

impl EncoderArch {
    /// The `tiny-test` encoder: BERT layout, 2 layers, width 64.
    pub fn tiny_test(vocab_size: usize) -> Self {
        EncoderArch {
            layout: Layout::Bert,
            vocab_size,
            hidden_size: 64,
            embedding_size: 64,
            num_hidden_layers: 2,
            num_attention_heads: 4,
            intermediate_size: 128,
            max_position_embeddings: 512,
            type_vocab_size: 1,
            layer_norm_eps: 1e-12,
            hidden_act: Activation::Gelu,
            pad_token_id: 0,
            num_hidden_groups: 1,
            inner_group_num: 1,
        }
    }

    pub fn from_hf_json(text: &str) -> Result<Self> {
        let cfg: HfConfig = serde_json::from_str(text)?;
        let layout = match cfg.model_type.as_str() {
            "bert" => Layout::Bert,
            "roberta" | "xlm-roberta" => Layout::Roberta,
            "albert" => Layout::Albert,
            other => {
                return Err(Error::InvalidConfig(format!("unsupported model_type `{other}`")));
            }
        };
        let arch = EncoderArch {
            layout,
            vocab_size: cfg.vocab_size,
            hidden_size: cfg.hidden_size,
            embedding_size: cfg.embedding_size.unwrap_or(cfg.hidden_size),
            num_hidden_layers: cfg.num_hidden_layers,
            num_attention_heads: cfg.num_attention_heads,
            intermediate_size: cfg.intermediate_size,
            max_position_embeddings: cfg.max_position_embeddings,
            type_vocab_size: cfg.type_vocab_size,
            layer_norm_eps: cfg.layer_norm_eps,
            hidden_act: cfg.hidden_act,
            pad_token_id: cfg.pad_token_id.unwrap_or(if layout == Layout::Roberta { 1 } else { 0 }),
            num_hidden_groups: cfg.num_hidden_groups,
            inner_group_num: cfg.inner_group_num,
        };
        arch.validate()?;
        Ok(arch)
    }

    pub fn from_hf_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e).in_file(path))?;
        EncoderArch::from_hf_json(&text).map_err(|e| e.in_file(path))
    }

    /// Writes a `config.json` that [`EncoderArch::from_hf_json`] reads back.
    pub fn to_hf_json(&self) -> String {
        let model_type = match self.layout {
            Layout::Bert => "bert",
            Layout::Roberta => "roberta",
            Layout::Albert => "albert",
        };
        serde_json::to_string_pretty(&serde_json::json!({
            "model_type": model_type,
            "vocab_size": self.vocab_size,
            "hidden_size": self.hidden_size,
            "embedding_size": self.embedding_size,
            "num_hidden_layers": self.num_hidden_layers,
            "num_attention_heads": self.num_attention_heads,
            "intermediate_size": self.intermediate_size,
            "max_position_embeddings": self.max_position_embeddings,
            "type_vocab_size": self.type_vocab_size,
            "layer_norm_eps": self.layer_norm_eps,
            "hidden_act": self.hidden_act,
            "pad_token_id": self.pad_token_id,
            "num_hidden_groups": self.num_hidden_groups,
            "inner_group_num": self.inner_group_num,
        }))
        .expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.num_attention_heads == 0 || self.hidden_size % self.num_attention_heads != 0 {
            return bad(format!(
                "hidden size {} is not divisible by {} heads",
                self.hidden_size, self.num_attention_heads
            ));
        }
        if self.num_hidden_groups == 0 || self.num_hidden_layers % self.num_hidden_groups != 0 {
            return bad(format!(
                "{} layers cannot be spread over {} groups",
                self.num_hidden_layers, self.num_hidden_groups
            ));
        }
        if self.layout != Layout::Albert && self.embedding_size != self.hidden_size {
            return bad("embedding size differs from hidden size outside ALBERT".into());
        }
        if self.max_positions() < 3 {
            return bad("too few position embeddings".into());
        }
        Ok(())
    }

    /// Position ids start here. RoBERTa reserves the first `pad + 1` slots.
    pub fn position_offset(&self) -> usize {
        match self.layout {
            Layout::Roberta => self.pad_token_id + 1,
            _ => 0,
        }
    }

    /// Longest input, special tokens included, the position table can hold.
    pub fn max_positions(&self) -> usize {
        self.max_position_embeddings.saturating_sub(self.position_offset())
    }
}
