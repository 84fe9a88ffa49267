//! Assembly of the compressed topological feature vector and its stable
//! on-disk format.
//!
//! Segment order is fixed: Betti numbers, top-k Laplacian eigenvalues for
//! dimensions 0..3, chain-matrix Gram spectra for dimensions 1..2, degree
//! centrality summaries for dimensions 0..2, shortest-path summary, degree
//! histogram, then zero padding up to `pad_to`.

use crate::lifting::{lift_with, LiftConfig};
use crate::molio::{canonical_order, ElementTable, MolecularGraph, MolError};
use crate::spectral::{
    apsp, betti_numbers, degree_centrality, hodge_laplacian, sample_chain_matrix, spectral_chains,
    top_k_eigs, SpectralError,
};
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EccError {
    #[error("assembled feature length {needed} exceeds pad_to {pad_to}")]
    PadOverflow { needed: usize, pad_to: usize },
    #[error("unrecognized feature file header")]
    FormatVersionMismatch,
    #[error("feature length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Mol(#[from] MolError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ECCConfig {
    /// Eigenvalue budget per Laplacian and per chain spectrum.
    pub top_k: usize,
    pub chain_samples: usize,
    pub chain_walk_len: usize,
    pub seed: u64,
    /// Total output dimension; the tail beyond the assembled segments is zero.
    pub pad_to: usize,
    pub lift: LiftConfig,
    /// Degree histogram cap; degrees above it fall into the final bin.
    pub max_degree: usize,
    /// Relabel atoms canonically before lifting so the seed-driven chain
    /// segment is invariant under input relabeling.
    pub canonicalize: bool,
}

impl Default for ECCConfig {
    fn default() -> Self {
        ECCConfig {
            top_k: 8,
            chain_samples: 64,
            chain_walk_len: 8,
            seed: 42,
            pad_to: 96,
            lift: LiftConfig::default(),
            max_degree: 6,
            canonicalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ECCVector {
    pub values: Vec<f64>,
    pub layout: Vec<Segment>,
}

impl ECCVector {
    pub fn segment(&self, name: &str) -> Option<&[f64]> {
        self.layout
            .iter()
            .find(|s| s.name == name)
            .map(|s| &self.values[s.offset..s.offset + s.len])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    /// Bin `d` counts atoms of degree `d`; the last bin clamps.
    pub counts: Vec<u64>,
}

pub fn degree_histogram(g: &MolecularGraph, max_degree: usize) -> DegreeHistogram {
    let mut counts = vec![0u64; max_degree + 1];
    for d in g.degrees() {
        counts[d.min(max_degree)] += 1;
    }
    DegreeHistogram { counts }
}

pub fn ecc_features(g: &MolecularGraph, cfg: &ECCConfig) -> Result<ECCVector, EccError> {
    ecc_features_with(g, cfg, &ElementTable::default())
}

pub fn ecc_features_with(
    g: &MolecularGraph,
    cfg: &ECCConfig,
    table: &ElementTable,
) -> Result<ECCVector, EccError> {
    let canon;
    let g = if cfg.canonicalize {
        canon = g.relabel(&canonical_order(g));
        &canon
    } else {
        g
    };
    let x = lift_with(g, &cfg.lift, table)?;

    let mut values: Vec<f64> = Vec::new();
    let mut layout: Vec<Segment> = Vec::new();
    let push = |name: &str, segment: Vec<f64>, values: &mut Vec<f64>, layout: &mut Vec<Segment>| {
        layout.push(Segment {
            name: name.to_string(),
            offset: values.len(),
            len: segment.len(),
        });
        values.extend(segment);
    };

    let betti = betti_numbers(&x)?;
    push(
        "betti",
        betti.iter().map(|&b| b as f64).collect(),
        &mut values,
        &mut layout,
    );

    for k in 0..4 {
        let l = hodge_laplacian(&x, k)?;
        let top = top_k_eigs(&l, cfg.top_k)?;
        push(
            &format!("laplacian_top_{k}"),
            top.eigenvalues,
            &mut values,
            &mut layout,
        );
    }

    for k in 1..=2 {
        let spectrum = match sample_chain_matrix(&x, k, cfg.chain_samples, cfg.chain_walk_len, cfg.seed)
        {
            Ok(chain) => spectral_chains(&chain, cfg.top_k)?.eigenvalues,
            Err(SpectralError::EmptyDimension(_)) => vec![0.0; cfg.top_k],
            Err(e) => return Err(e.into()),
        };
        push(&format!("chain_spectrum_{k}"), spectrum, &mut values, &mut layout);
    }

    for k in 0..3 {
        let (_, summary) = degree_centrality(&x, k)?;
        push(
            &format!("centrality_{k}"),
            vec![summary.mean, summary.std, summary.max],
            &mut values,
            &mut layout,
        );
    }

    let paths = apsp(g);
    let n = g.n_atoms() as f64;
    let pair_count = n * (n - 1.0) / 2.0;
    let wiener_norm = if pair_count > 0.0 {
        paths.wiener as f64 / pair_count
    } else {
        0.0
    };
    push(
        "apsp",
        vec![paths.mean, paths.diameter as f64, wiener_norm],
        &mut values,
        &mut layout,
    );

    let hist = degree_histogram(g, cfg.max_degree);
    push(
        "degree_histogram",
        hist.counts.iter().map(|&c| c as f64).collect(),
        &mut values,
        &mut layout,
    );

    if values.len() > cfg.pad_to {
        return Err(EccError::PadOverflow {
            needed: values.len(),
            pad_to: cfg.pad_to,
        });
    }
    values.resize(cfg.pad_to, 0.0);
    Ok(ECCVector { values, layout })
}

// ---------------------------------------------------------------------------
// Feature file format: magic "ECC1", record count, pad_to, then per record
// id length + id bytes + pad_to little-endian f64.

const MAGIC: &[u8; 4] = b"ECC1";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub values: Vec<f64>,
}

pub fn write_features<W: Write>(
    out: &mut W,
    pad_to: usize,
    batch: &[(String, ECCVector)],
) -> Result<(), EccError> {
    for (_, vector) in batch {
        if vector.values.len() != pad_to {
            return Err(EccError::LengthMismatch {
                expected: pad_to,
                got: vector.values.len(),
            });
        }
    }
    out.write_all(MAGIC)?;
    out.write_all(&(batch.len() as u64).to_le_bytes())?;
    out.write_all(&(pad_to as u64).to_le_bytes())?;
    for (id, vector) in batch {
        out.write_all(&(id.len() as u32).to_le_bytes())?;
        out.write_all(id.as_bytes())?;
        for v in &vector.values {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_features<R: Read>(input: &mut R) -> Result<(usize, Vec<FeatureRecord>), EccError> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(EccError::FormatVersionMismatch);
    }
    let mut u64buf = [0u8; 8];
    input.read_exact(&mut u64buf)?;
    let count = u64::from_le_bytes(u64buf) as usize;
    input.read_exact(&mut u64buf)?;
    let pad_to = u64::from_le_bytes(u64buf) as usize;
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let mut u32buf = [0u8; 4];
        input.read_exact(&mut u32buf)?;
        let id_len = u32::from_le_bytes(u32buf) as usize;
        let mut id_bytes = vec![0u8; id_len];
        input.read_exact(&mut id_bytes)?;
        let id = String::from_utf8(id_bytes).map_err(|_| EccError::FormatVersionMismatch)?;
        let mut values = Vec::with_capacity(pad_to);
        let mut f64buf = [0u8; 8];
        for _ in 0..pad_to {
            input.read_exact(&mut f64buf)?;
            values.push(f64::from_le_bytes(f64buf));
        }
        records.push(FeatureRecord { id, values });
    }
    Ok((pad_to, records))
}

/// Human-readable mirror of the binary format (JSON).
pub fn write_features_text<W: Write>(
    out: &mut W,
    pad_to: usize,
    batch: &[(String, ECCVector)],
) -> Result<(), EccError> {
    #[derive(serde::Serialize)]
    struct TextRecord<'a> {
        id: &'a str,
        values: &'a [f64],
    }
    #[derive(serde::Serialize)]
    struct TextFile<'a> {
        pad_to: usize,
        records: Vec<TextRecord<'a>>,
    }
    let file = TextFile {
        pad_to,
        records: batch
            .iter()
            .map(|(id, v)| TextRecord {
                id,
                values: &v.values,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &file).map_err(std::io::Error::other)?;
    out.write_all(b"\n")?;
    Ok(())
}
