use std::collections::{BTreeMap, HashMap};

use candle_core::{DType, Device, Tensor, Var};
use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::harmonize::shuffle::rng_from_seed;

/// Where parameter values come from when the model is built.
pub(crate) enum Source {
    /// Everything freshly initialized.
    Random,
    /// Encoder weights from a pretrained checkpoint, head freshly initialized.
    Pretrained(HashMap<String, Tensor>),
    /// Every parameter from a saved tagger, names matching exactly.
    Exact(HashMap<String, Tensor>),
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Init {
    Normal(f64),
    Zeros,
    Ones,
}

pub(crate) const HEAD_PREFIX: &str = "classifier.";

/// Named trainable parameters, created on first request.
pub(crate) struct ParamStore {
    vars: BTreeMap<String, Var>,
    source: Source,
    layout_prefix: &'static str,
    rng: ChaCha20Rng,
    device: Device,
}

impl ParamStore {
    pub fn new(source: Source, layout_prefix: &'static str, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        rng.set_stream(1);
        ParamStore {
            vars: BTreeMap::new(),
            source,
            layout_prefix,
            rng,
            device: Device::Cpu,
        }
    }

    /// Returns the parameter `name`, creating it on first use. Asking twice
    /// for one name yields the same variable, which is how ALBERT shares
    /// layers.
    pub fn get(&mut self, name: &str, shape: &[usize], init: Init) -> Result<Tensor> {
        if let Some(v) = self.vars.get(name) {
            return Ok(v.as_tensor().clone());
        }
        let loaded = match &self.source {
            Source::Random => None,
            Source::Exact(map) => Some(map.get(name).cloned().ok_or_else(|| missing(name))?),
            Source::Pretrained(map) => {
                let found = lookup(map, name, self.layout_prefix);
                if found.is_none() && !name.starts_with(HEAD_PREFIX) {
                    return Err(missing(name));
                }
                found
            }
        };
        let tensor = match loaded {
            Some(t) => {
                let t = t.to_dtype(DType::F32)?;
                if t.dims() != shape {
                    return Err(Error::ShapeMismatch(format!(
                        "parameter `{name}` has shape {:?}, expected {shape:?}",
                        t.dims()
                    )));
                }
                t
            }
            None => self.init(shape, init)?,
        };
        let var = Var::from_tensor(&tensor)?;
        let out = var.as_tensor().clone();
        self.vars.insert(name.to_string(), var);
        Ok(out)
    }

    fn init(&mut self, shape: &[usize], init: Init) -> Result<Tensor> {
        let n: usize = shape.iter().product();
        let t = match init {
            Init::Zeros => Tensor::zeros(shape, DType::F32, &self.device)?,
            Init::Ones => Tensor::ones(shape, DType::F32, &self.device)?,
            Init::Normal(std) => {
                let data: Vec<f32> = (0..n).map(|_| (normal(&mut self.rng) * std) as f32).collect();
                Tensor::from_vec(data, shape, &self.device)?
            }
        };
        Ok(t)
    }

    pub fn vars(&self) -> Vec<Var> {
        self.vars.values().cloned().collect()
    }

    /// Deep copies of every parameter.
    pub fn snapshot(&self) -> Result<BTreeMap<String, Tensor>> {
        self.vars
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.as_tensor().copy()?.detach())))
            .collect()
    }

    pub fn restore(&self, snapshot: &BTreeMap<String, Tensor>) -> Result<()> {
        for (k, v) in &self.vars {
            let t = snapshot.get(k).ok_or_else(|| missing(k))?;
            v.set(t)?;
        }
        Ok(())
    }
}

fn missing(name: &str) -> Error {
    Error::ShapeMismatch(format!("checkpoint has no tensor for parameter `{name}`"))
}

/// Finds `name` in a pretrained checkpoint, tolerating a missing layout
/// prefix and the old `gamma`/`beta` LayerNorm names.
fn lookup(map: &HashMap<String, Tensor>, name: &str, prefix: &str) -> Option<Tensor> {
    let bare = name
        .strip_prefix(prefix)
        .and_then(|n| n.strip_prefix('.'))
        .unwrap_or(name);
    let mut candidates = vec![name.to_string(), bare.to_string()];
    for c in candidates.clone() {
        if c.contains("LayerNorm") || c.contains("layer_norm") {
            if let Some(base) = c.strip_suffix(".weight") {
                candidates.push(format!("{base}.gamma"));
            }
            if let Some(base) = c.strip_suffix(".bias") {
                candidates.push(format!("{base}.beta"));
            }
        }
    }
    candidates.iter().find_map(|c| map.get(c).cloned())
}

/// Standard normal draw by Box–Muller from two uniform 53-bit doubles.
fn normal(rng: &mut ChaCha20Rng) -> f64 {
    let uniform = |rng: &mut ChaCha20Rng| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
