use candle_core::{DType, Device, Tensor, D};
use candle_nn::ops::{log_softmax, softmax};
use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha20Rng;

use super::arch::{Activation, EncoderArch, Layout};
use super::params::{Init, ParamStore, HEAD_PREFIX};
use super::vocab::IGNORE_ID;
use crate::error::Result;

const INIT_STD: f64 = 0.02;

struct Linear {
    weight: Tensor,
    bias: Tensor,
}

impl Linear {
    fn new(store: &mut ParamStore, name: &str, input: usize, output: usize) -> Result<Self> {
        Ok(Linear {
            weight: store.get(&format!("{name}.weight"), &[output, input], Init::Normal(INIT_STD))?,
            bias: store.get(&format!("{name}.bias"), &[output], Init::Zeros)?,
        })
    }

    fn forward(&self, xs: &Tensor) -> Result<Tensor> {
        Ok(xs.broadcast_matmul(&self.weight.t()?)?.broadcast_add(&self.bias)?)
    }
}

struct LayerNorm {
    weight: Tensor,
    bias: Tensor,
    eps: f64,
}

impl LayerNorm {
    fn new(store: &mut ParamStore, name: &str, size: usize, eps: f64) -> Result<Self> {
        Ok(LayerNorm {
            weight: store.get(&format!("{name}.weight"), &[size], Init::Ones)?,
            bias: store.get(&format!("{name}.bias"), &[size], Init::Zeros)?,
            eps,
        })
    }

    fn forward(&self, xs: &Tensor) -> Result<Tensor> {
        let width = xs.dim(D::Minus1)? as f64;
        let centered = xs.broadcast_sub(&(xs.sum_keepdim(D::Minus1)? / width)?)?;
        let var = (centered.sqr()?.sum_keepdim(D::Minus1)? / width)?;
        let normed = centered.broadcast_div(&(var + self.eps)?.sqrt()?)?;
        Ok(normed.broadcast_mul(&self.weight)?.broadcast_add(&self.bias)?)
    }
}

fn activate(act: Activation, xs: &Tensor) -> Result<Tensor> {
    Ok(match act {
        Activation::Gelu => xs.gelu_erf()?,
        Activation::GeluTanh => xs.gelu()?,
        Activation::Relu => xs.relu()?,
    })
}

struct Embeddings {
    word: Tensor,
    position: Tensor,
    token_type: Tensor,
    norm: LayerNorm,
    position_offset: usize,
}

impl Embeddings {
    fn new(store: &mut ParamStore, prefix: &str, arch: &EncoderArch) -> Result<Self> {
        let e = arch.embedding_size;
        let p = format!("{prefix}.embeddings");
        Ok(Embeddings {
            word: store.get(&format!("{p}.word_embeddings.weight"), &[arch.vocab_size, e], Init::Normal(INIT_STD))?,
            position: store.get(
                &format!("{p}.position_embeddings.weight"),
                &[arch.max_position_embeddings, e],
                Init::Normal(INIT_STD),
            )?,
            token_type: store.get(
                &format!("{p}.token_type_embeddings.weight"),
                &[arch.type_vocab_size, e],
                Init::Normal(INIT_STD),
            )?,
            norm: LayerNorm::new(store, &format!("{p}.LayerNorm"), e, arch.layer_norm_eps)?,
            position_offset: arch.position_offset(),
        })
    }

    fn forward(&self, ids: &Tensor) -> Result<Tensor> {
        let (batch, len) = ids.dims2()?;
        let words = self.word.index_select(&ids.flatten_all()?, 0)?.reshape((batch, len, ()))?;
        let positions: Vec<u32> = (0..len).map(|i| (i + self.position_offset) as u32).collect();
        let positions = Tensor::new(positions.as_slice(), ids.device())?;
        let pos = self.position.index_select(&positions, 0)?.unsqueeze(0)?;
        let types = self.token_type.get(0)?;
        let xs = words.broadcast_add(&pos)?.broadcast_add(&types)?;
        self.norm.forward(&xs)
    }
}

/// One post-norm transformer block.
struct Block {
    query: Linear,
    key: Linear,
    value: Linear,
    attn_out: Linear,
    attn_norm: LayerNorm,
    ffn_in: Linear,
    ffn_out: Linear,
    ffn_norm: LayerNorm,
    heads: usize,
    act: Activation,
}

impl Block {
    fn bert(store: &mut ParamStore, p: &str, arch: &EncoderArch) -> Result<Self> {
        let (h, i, eps) = (arch.hidden_size, arch.intermediate_size, arch.layer_norm_eps);
        Ok(Block {
            query: Linear::new(store, &format!("{p}.attention.self.query"), h, h)?,
            key: Linear::new(store, &format!("{p}.attention.self.key"), h, h)?,
            value: Linear::new(store, &format!("{p}.attention.self.value"), h, h)?,
            attn_out: Linear::new(store, &format!("{p}.attention.output.dense"), h, h)?,
            attn_norm: LayerNorm::new(store, &format!("{p}.attention.output.LayerNorm"), h, eps)?,
            ffn_in: Linear::new(store, &format!("{p}.intermediate.dense"), h, i)?,
            ffn_out: Linear::new(store, &format!("{p}.output.dense"), i, h)?,
            ffn_norm: LayerNorm::new(store, &format!("{p}.output.LayerNorm"), h, eps)?,
            heads: arch.num_attention_heads,
            act: arch.hidden_act,
        })
    }

    fn albert(store: &mut ParamStore, p: &str, arch: &EncoderArch) -> Result<Self> {
        let (h, i, eps) = (arch.hidden_size, arch.intermediate_size, arch.layer_norm_eps);
        Ok(Block {
            query: Linear::new(store, &format!("{p}.attention.query"), h, h)?,
            key: Linear::new(store, &format!("{p}.attention.key"), h, h)?,
            value: Linear::new(store, &format!("{p}.attention.value"), h, h)?,
            attn_out: Linear::new(store, &format!("{p}.attention.dense"), h, h)?,
            attn_norm: LayerNorm::new(store, &format!("{p}.attention.LayerNorm"), h, eps)?,
            ffn_in: Linear::new(store, &format!("{p}.ffn"), h, i)?,
            ffn_out: Linear::new(store, &format!("{p}.ffn_output"), i, h)?,
            ffn_norm: LayerNorm::new(store, &format!("{p}.full_layer_layer_norm"), h, eps)?,
            heads: arch.num_attention_heads,
            act: arch.hidden_act,
        })
    }

    /// `mask_bias` is `[batch, 1, 1, len]`: 0 for real tokens, a large
    /// negative value for padding.
    fn forward(&self, xs: &Tensor, mask_bias: &Tensor) -> Result<Tensor> {
        let (b, l, h) = xs.dims3()?;
        let dh = h / self.heads;
        let heads = |t: Tensor| -> Result<Tensor> {
            Ok(t.reshape((b, l, self.heads, dh))?.transpose(1, 2)?.contiguous()?)
        };
        let q = heads(self.query.forward(xs)?)?;
        let k = heads(self.key.forward(xs)?)?;
        let v = heads(self.value.forward(xs)?)?;
        let scores = (q.matmul(&k.t()?.contiguous()?)? * (1.0 / (dh as f64).sqrt()))?;
        let probs = softmax(&scores.broadcast_add(mask_bias)?, D::Minus1)?;
        let ctx = probs.matmul(&v)?.transpose(1, 2)?.contiguous()?.reshape((b, l, h))?;
        let xs = self.attn_norm.forward(&(self.attn_out.forward(&ctx)? + xs)?)?;
        let inner = activate(self.act, &self.ffn_in.forward(&xs)?)?;
        self.ffn_norm.forward(&(self.ffn_out.forward(&inner)? + xs)?)
    }
}

/// Source of seeded dropout masks.
pub(crate) struct Dropout {
    pub rate: f64,
    pub rng: ChaCha20Rng,
}

impl Dropout {
    fn apply(&mut self, xs: &Tensor) -> Result<Tensor> {
        if self.rate <= 0.0 {
            return Ok(xs.clone());
        }
        let keep = 1.0 - self.rate;
        let scale = (1.0 / keep) as f32;
        let threshold = (keep * (u32::MAX as f64)) as u32;
        let mask: Vec<f32> = (0..xs.elem_count())
            .map(|_| if self.rng.next_u32() < threshold { scale } else { 0.0 })
            .collect();
        let mask = Tensor::from_vec(mask, xs.shape(), xs.device())?;
        Ok((xs * mask)?)
    }
}

/// Transformer encoder plus a linear token-classification head.
pub(crate) struct TokenClassifier {
    embeddings: Embeddings,
    mapping_in: Option<Linear>,
    /// One entry per applied layer; ALBERT entries alias shared parameters.
    blocks: Vec<Block>,
    classifier: Linear,
}

impl TokenClassifier {
    pub fn build(store: &mut ParamStore, arch: &EncoderArch, num_labels: usize) -> Result<Self> {
        arch.validate()?;
        let prefix = arch.layout.prefix();
        let embeddings = Embeddings::new(store, prefix, arch)?;
        let mut blocks = Vec::with_capacity(arch.num_hidden_layers);
        let mapping_in = match arch.layout {
            Layout::Bert | Layout::Roberta => {
                for i in 0..arch.num_hidden_layers {
                    blocks.push(Block::bert(store, &format!("{prefix}.encoder.layer.{i}"), arch)?);
                }
                None
            }
            Layout::Albert => {
                let per_group = arch.num_hidden_layers / arch.num_hidden_groups;
                for i in 0..arch.num_hidden_layers {
                    let group = i / per_group;
                    for inner in 0..arch.inner_group_num {
                        let p = format!("{prefix}.encoder.albert_layer_groups.{group}.albert_layers.{inner}");
                        blocks.push(Block::albert(store, &p, arch)?);
                    }
                }
                Some(Linear::new(
                    store,
                    &format!("{prefix}.encoder.embedding_hidden_mapping_in"),
                    arch.embedding_size,
                    arch.hidden_size,
                )?)
            }
        };
        let classifier = Linear::new(
            store,
            HEAD_PREFIX.trim_end_matches('.'),
            arch.hidden_size,
            num_labels,
        )?;
        Ok(TokenClassifier {
            embeddings,
            mapping_in,
            blocks,
            classifier,
        })
    }

    /// `ids` is `[batch, len]` u32 and `mask` `[batch, len]` f32 (1 for real
    /// positions). Returns logits `[batch, len, labels]`.
    pub fn forward(&self, ids: &Tensor, mask: &Tensor, dropout: Option<&mut Dropout>) -> Result<Tensor> {
        let (b, l) = ids.dims2()?;
        let mask_bias = ((1.0 - mask)? * -1e4)?.reshape((b, 1, 1, l))?;
        let mut xs = self.embeddings.forward(ids)?;
        if let Some(m) = &self.mapping_in {
            xs = m.forward(&xs)?;
        }
        for block in &self.blocks {
            xs = block.forward(&xs, &mask_bias)?;
        }
        if let Some(d) = dropout {
            xs = d.apply(&xs)?;
        }
        self.classifier.forward(&xs)
    }
}

/// Mean cross-entropy over positions whose label is not [`IGNORE_ID`].
/// Ignored positions contribute exactly zero to the value and the gradient;
/// an all-ignored batch has loss 0.
pub fn masked_cross_entropy(logits: &Tensor, labels: &[i64]) -> Result<Tensor> {
    let classes = logits.dim(D::Minus1)?;
    let flat = logits.reshape(((), classes))?;
    let device = flat.device();
    let targets: Vec<u32> = labels
        .iter()
        .map(|l| if *l == IGNORE_ID { 0 } else { *l as u32 })
        .collect();
    let weights: Vec<f32> = labels
        .iter()
        .map(|l| if *l == IGNORE_ID { 0.0 } else { 1.0 })
        .collect();
    let counted = weights.iter().filter(|w| **w > 0.0).count().max(1);
    let targets = Tensor::new(targets.as_slice(), device)?.unsqueeze(1)?;
    let weights = Tensor::new(weights.as_slice(), device)?;
    let picked = log_softmax(&flat, D::Minus1)?.gather(&targets, 1)?.squeeze(1)?;
    let total = (picked * weights)?.sum_all()?;
    Ok((total.neg()? / counted as f64)?)
}

/// A padded batch of encoded windows.
pub(crate) struct Batch {
    pub ids: Tensor,
    pub mask: Tensor,
    pub len: usize,
}

pub(crate) fn pad_batch(rows: &[&[u32]], pad: u32, device: &Device) -> Result<Batch> {
    let len = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut ids = Vec::with_capacity(rows.len() * len);
    let mut mask = Vec::with_capacity(rows.len() * len);
    for r in rows {
        ids.extend_from_slice(r);
        ids.extend(std::iter::repeat_n(pad, len - r.len()));
        mask.extend(std::iter::repeat_n(1f32, r.len()));
        mask.extend(std::iter::repeat_n(0f32, len - r.len()));
    }
    Ok(Batch {
        ids: Tensor::from_vec(ids, (rows.len(), len), device)?,
        mask: Tensor::from_vec(mask, (rows.len(), len), device)?.to_dtype(DType::F32)?,
        len,
    })
}
