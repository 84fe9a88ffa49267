//! Forward-only principal neighborhood aggregation: four aggregators (mean,
//! min, max, population std) times three degree scalers (identity,
//! amplification, attenuation), with externally supplied layer weights.

use crate::molio::MolecularGraph;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PnaError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("weights contain non-finite values")]
    NonFiniteWeights,
    #[error("weight file malformed: {0}")]
    WeightFile(String),
}

pub const N_AGGREGATORS: usize = 4;
pub const N_SCALERS: usize = 3;

/// Log-degree scaler `S(d) = log(d + 1) / delta`.
pub fn scaler(degree: usize, delta: f64) -> f64 {
    ((degree + 1) as f64).ln() / delta
}

/// Aggregate neighbor features for every node into an `n x (12 f)` matrix.
///
/// Block order: mean, min, max, std, each multiplied by the scalers
/// (1, S(d), 1/S(d)). Isolated nodes yield all-zero blocks. Neighbor values
/// are summed in sorted order so relabeling cannot perturb rounding.
pub fn pna_aggregate(
    h: &[Vec<f64>],
    g: &MolecularGraph,
    delta: f64,
) -> Result<Vec<Vec<f64>>, PnaError> {
    if h.len() != g.n_atoms() {
        return Err(PnaError::ShapeMismatch(format!(
            "{} feature rows for {} atoms",
            h.len(),
            g.n_atoms()
        )));
    }
    if delta <= 0.0 {
        return Err(PnaError::ShapeMismatch("delta must be positive".into()));
    }
    let f = h.first().map_or(0, |row| row.len());
    if h.iter().any(|row| row.len() != f) {
        return Err(PnaError::ShapeMismatch("ragged feature matrix".into()));
    }
    let adj = g.adjacency();
    let mut out = vec![vec![0.0f64; N_AGGREGATORS * N_SCALERS * f]; h.len()];
    for (i, neighbors) in adj.iter().enumerate() {
        let d = neighbors.len();
        if d == 0 {
            continue;
        }
        let s = scaler(d, delta);
        let scalers = [1.0, s, 1.0 / s];
        for col in 0..f {
            let mut values: Vec<f64> = neighbors.iter().map(|&w| h[w][col]).collect();
            values.sort_by(f64::total_cmp);
            let sum: f64 = values.iter().sum();
            let mean = sum / d as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
            let aggregates = [mean, values[0], values[d - 1], var.sqrt()];
            for (ai, &aggregate) in aggregates.iter().enumerate() {
                for (si, &scale) in scalers.iter().enumerate() {
                    out[i][(ai * N_SCALERS + si) * f + col] = aggregate * scale;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PNALayerWeights {
    /// Linear map, `(12 f)` rows by `f_out` columns.
    pub weight: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    /// Average log-degree normalizer.
    pub delta: f64,
}

impl PNALayerWeights {
    pub fn validate(&self) -> Result<(), PnaError> {
        let f_out = self.bias.len();
        if self.weight.iter().any(|row| row.len() != f_out) {
            return Err(PnaError::ShapeMismatch(
                "weight rows must match bias length".into(),
            ));
        }
        if self.weight.len() % (N_AGGREGATORS * N_SCALERS) != 0 {
            return Err(PnaError::ShapeMismatch(format!(
                "weight row count {} is not a multiple of 12",
                self.weight.len()
            )));
        }
        if self.delta <= 0.0 || !self.delta.is_finite() {
            return Err(PnaError::ShapeMismatch("delta must be positive".into()));
        }
        let finite = self
            .weight
            .iter()
            .flatten()
            .chain(self.bias.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(PnaError::NonFiniteWeights);
        }
        Ok(())
    }

    /// Load from the structured-text weight file: JSON with explicit shapes
    /// and row-major values.
    pub fn from_json(text: &str) -> Result<Self, PnaError> {
        #[derive(Deserialize)]
        struct File {
            in_features: usize,
            out_features: usize,
            weight: Vec<f64>,
            bias: Vec<f64>,
            delta: f64,
        }
        let file: File =
            serde_json::from_str(text).map_err(|e| PnaError::WeightFile(e.to_string()))?;
        if file.weight.len() != file.in_features * file.out_features {
            return Err(PnaError::ShapeMismatch(format!(
                "weight has {} values, expected {} x {}",
                file.weight.len(),
                file.in_features,
                file.out_features
            )));
        }
        if file.bias.len() != file.out_features {
            return Err(PnaError::ShapeMismatch(format!(
                "bias has {} values, expected {}",
                file.bias.len(),
                file.out_features
            )));
        }
        let weight = file
            .weight
            .chunks(file.out_features)
            .map(|chunk| chunk.to_vec())
            .collect();
        let loaded = PNALayerWeights {
            weight,
            bias: file.bias,
            delta: file.delta,
        };
        loaded.validate()?;
        Ok(loaded)
    }
}

/// One convolution step: `activation(aggregate(H) W + bias)`.
pub fn pna_forward(
    h: &[Vec<f64>],
    g: &MolecularGraph,
    w: &PNALayerWeights,
    activation: Activation,
) -> Result<Vec<Vec<f64>>, PnaError> {
    w.validate()?;
    let agg = pna_aggregate(h, g, w.delta)?;
    let in_dim = agg.first().map_or(0, |row| row.len());
    if !agg.is_empty() && in_dim != w.weight.len() {
        return Err(PnaError::ShapeMismatch(format!(
            "aggregate width {in_dim} vs weight rows {}",
            w.weight.len()
        )));
    }
    let f_out = w.bias.len();
    Ok(agg
        .iter()
        .map(|row| {
            (0..f_out)
                .map(|o| {
                    let pre: f64 = row
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| v * w.weight[k][o])
                        .sum::<f64>()
                        + w.bias[o];
                    activation.apply(pre)
                })
                .collect()
        })
        .collect())
}

/// Graph readout: mean over node rows.
pub fn mean_pool(h: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = h.first() else {
        return Vec::new();
    };
    let n = h.len() as f64;
    (0..first.len())
        .map(|c| h.iter().map(|row| row[c]).sum::<f64>() / n)
        .collect()
}

/// Inference-mode batch normalization with externally supplied statistics:
/// `((x - mu) / sqrt(sigma2 + eps)) * gamma + beta` per column.
pub fn batch_norm_inference(
    h: &[Vec<f64>],
    mu: &[f64],
    sigma2: &[f64],
    gamma: &[f64],
    beta: &[f64],
    eps: f64,
) -> Result<Vec<Vec<f64>>, PnaError> {
    let f = mu.len();
    if sigma2.len() != f || gamma.len() != f || beta.len() != f {
        return Err(PnaError::ShapeMismatch(
            "batch-norm vectors must share one length".into(),
        ));
    }
    if h.iter().any(|row| row.len() != f) {
        return Err(PnaError::ShapeMismatch(
            "feature rows do not match batch-norm width".into(),
        ));
    }
    Ok(h.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, &x)| ((x - mu[c]) / (sigma2[c] + eps).sqrt()) * gamma[c] + beta[c])
                .collect()
        })
        .collect())
}
