//! Linear algebra over the lifted complex: exact rational ranks and Betti
//! numbers, Hodge Laplacians with a cyclic Jacobi eigensolver, sampled chain
//! matrices and their Gram spectra, skeleton degree centrality, and all-pairs
//! shortest paths on the molecular graph.

use crate::lifting::{boundary_matrix, validate, CellComplex};
use crate::molio::MolecularGraph;
use crate::rng::SplitMix64;
use num_bigint::BigInt;
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("dimension {0} out of range")]
    DimensionOutOfRange(usize),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
    #[error("dimension {0} has no cells")]
    EmptyDimension(usize),
}

/// Sparse signed incidence matrix with integer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, coefficient)` triples, no duplicates.
    pub entries: Vec<(usize, usize, i64)>,
}

impl BoundaryMatrix {
    pub fn dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            m[r][c] = v;
        }
        m
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination with exact
/// big-integer arithmetic.
pub fn rational_rank(b: &BoundaryMatrix) -> usize {
    let zero = BigInt::from(0);
    let mut m: Vec<Vec<BigInt>> = b
        .dense()
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    let (rows, cols) = (b.rows, b.cols);
    let mut prev = BigInt::from(1);
    let mut rank = 0usize;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != zero) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in (rank + 1)..rows {
            for c in (col + 1)..cols {
                let num = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = num / &prev; // exact: Bareiss one-step minors
            }
            m[r][col] = zero.clone();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Betti numbers of the complex over the rationals:
/// `beta_k = |C_k| - rank B_k - rank B_{k+1}`.
pub fn betti_numbers(x: &CellComplex) -> Result<[usize; 4], SpectralError> {
    validate(x).map_err(|v| SpectralError::InvalidComplex(v.message))?;
    let ranks: Vec<usize> = (1..=3)
        .map(|k| rational_rank(&boundary_matrix(x, k).unwrap()))
        .collect();
    let rank_at = |k: usize| if (1..=3).contains(&k) { ranks[k - 1] } else { 0 };
    let mut betti = [0usize; 4];
    for k in 0..4 {
        let b = x.cells[k].len() as i64 - rank_at(k) as i64 - rank_at(k + 1) as i64;
        assert!(b >= 0, "negative Betti number indicates a rank bug");
        betti[k] = b as usize;
    }
    Ok(betti)
}

/// Dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    pub n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let mut m = SymmetricMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                m.data[i * n + j] = v;
            }
        }
        for i in 0..n {
            for j in 0..i {
                assert!(
                    (m.get(i, j) - m.get(j, i)).abs() < 1e-12 * (1.0 + m.get(i, j).abs()),
                    "matrix must be symmetric"
                );
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Hodge Laplacian `L_k = B_k^T B_k + B_{k+1} B_{k+1}^T` (missing boundary
/// terms at the ends are zero).
pub fn hodge_laplacian(x: &CellComplex, k: usize) -> Result<SymmetricMatrix, SpectralError> {
    if k > 3 {
        return Err(SpectralError::DimensionOutOfRange(k));
    }
    let n = x.cells[k].len();
    let mut l = SymmetricMatrix::zeros(n);
    if k >= 1 {
        let b = boundary_matrix(x, k).unwrap();
        // (B^T B)_{ij} = sum_r B_{ri} B_{rj}
        let mut cols_by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); b.rows];
        for &(r, c, v) in &b.entries {
            cols_by_row[r].push((c, v));
        }
        for row in &cols_by_row {
            for &(ci, vi) in row {
                for &(cj, vj) in row {
                    l.data[ci * n + cj] += (vi * vj) as f64;
                }
            }
        }
    }
    if k < 3 {
        let b = boundary_matrix(x, k + 1).unwrap();
        // (B B^T)_{ij} = sum_c B_{ic} B_{jc}
        let mut rows_by_col: Vec<Vec<(usize, i64)>> = vec![Vec::new(); b.cols];
        for &(r, c, v) in &b.entries {
            rows_by_col[c].push((r, v));
        }
        for col in &rows_by_col {
            for &(ri, vi) in col {
                for &(rj, vj) in col {
                    l.data[ri * n + rj] += (vi * vj) as f64;
                }
            }
        }
    }
    Ok(l)
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition. Rotations are applied until every
/// off-diagonal magnitude drops below `tol * ||M||_F`. Returns eigenvalues in
/// ascending order with matching orthonormal eigenvectors (columns).
pub fn sym_eigs(m: &SymmetricMatrix, tol: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>), SpectralError> {
    let n = m.n;
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let mut vecs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let threshold = tol * m.frobenius();
    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut max_off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                max_off = max_off.max(a[p][q].abs());
            }
        }
        if max_off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= threshold * 1e-3 {
                    continue;
                }
                let apq = a[p][q];
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (aip, aiq) = (a[i][p], a[i][q]);
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let (apj, aqj) = (a[p][j], a[q][j]);
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let (vip, viq) = (vecs[i][p], vecs[i][q]);
                    vecs[i][p] = c * vip - s * viq;
                    vecs[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged && n > 1 {
        let mut max_off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                max_off = max_off.max(a[p][q].abs());
            }
        }
        if max_off > threshold {
            return Err(SpectralError::NonConvergence {
                sweeps: MAX_JACOBI_SWEEPS,
            });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let eigenvalues = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors = (0..n)
        .map(|row| order.iter().map(|&col| vecs[row][col]).collect())
        .collect();
    Ok((eigenvalues, eigenvectors))
}

/// Descending top-k eigenvalues, zero-padded to length `top_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
}

pub fn top_k_eigs(m: &SymmetricMatrix, top_k: usize) -> Result<SpectrumSummary, SpectralError> {
    let (eigs, _) = sym_eigs(m, 1e-12)?;
    let mut values: Vec<f64> = eigs.into_iter().rev().take(top_k).collect();
    values.resize(top_k, 0.0);
    Ok(SpectrumSummary { eigenvalues: values })
}

/// Matrix of sampled formal sums over the k-cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMatrix {
    pub rows: Vec<Vec<f64>>,
    pub n_cells: usize,
    pub dim: usize,
    pub walk_len: usize,
    pub seed: u64,
}

/// Adjacency between k-cells: two cells are adjacent iff they share a
/// (k-1)-face or a common (k+1)-coface.
fn cell_adjacency(x: &CellComplex, k: usize) -> Vec<Vec<usize>> {
    let n = x.cells[k].len();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let link = |group: &[usize], adj: &mut Vec<BTreeSet<usize>>| {
        for &a in group {
            for &b in group {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    };
    if k >= 1 {
        let mut by_face: Vec<Vec<usize>> = vec![Vec::new(); x.cells[k - 1].len()];
        for (cell, faces) in x.boundaries[k].iter().enumerate() {
            for &(face, _) in faces {
                by_face[face].push(cell);
            }
        }
        for group in &by_face {
            link(group, &mut adj);
        }
    }
    if k < 3 {
        for faces in &x.boundaries[k + 1] {
            let group: Vec<usize> = faces.iter().map(|&(f, _)| f).collect();
            link(&group, &mut adj);
        }
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Sample `n_samples` parity-signed random walks of `walk_len` positions over
/// the k-cell adjacency graph. Fully determined by the seed.
pub fn sample_chain_matrix(
    x: &CellComplex,
    k: usize,
    n_samples: usize,
    walk_len: usize,
    seed: u64,
) -> Result<ChainMatrix, SpectralError> {
    if k > 3 {
        return Err(SpectralError::DimensionOutOfRange(k));
    }
    let n_cells = x.cells[k].len();
    if n_cells == 0 {
        return Err(SpectralError::EmptyDimension(k));
    }
    let adj = cell_adjacency(x, k);
    let mut rng = SplitMix64::new(seed);
    let mut rows = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let mut row = vec![0.0f64; n_cells];
        let mut current = rng.next_index(n_cells);
        row[current] = 1.0;
        for step in 1..walk_len {
            if adj[current].is_empty() {
                break;
            }
            current = adj[current][rng.next_index(adj[current].len())];
            row[current] = if step % 2 == 0 { 1.0 } else { -1.0 };
        }
        rows.push(row);
    }
    Ok(ChainMatrix {
        rows,
        n_cells,
        dim: k,
        walk_len,
        seed,
    })
}

/// Top-k spectrum of the chain matrix's scaled Gram matrix
/// `C^T C / max(1, n_samples)`.
pub fn spectral_chains(c: &ChainMatrix, top_k: usize) -> Result<SpectrumSummary, SpectralError> {
    let n = c.n_cells;
    let scale = 1.0 / c.rows.len().max(1) as f64;
    let mut gram = SymmetricMatrix::zeros(n);
    for row in &c.rows {
        for i in 0..n {
            if row[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                gram.data[i * n + j] += row[i] * row[j] * scale;
            }
        }
    }
    top_k_eigs(&gram, top_k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralitySummary {
    pub mean: f64,
    pub std: f64,
    pub max: f64,
}

/// Degree centrality of each k-cell: distinct incident (k+1)-cells divided by
/// `max(1, |C_{k+1}|)`. Summary uses the population standard deviation.
pub fn degree_centrality(
    x: &CellComplex,
    k: usize,
) -> Result<(Vec<f64>, CentralitySummary), SpectralError> {
    if k >= 3 {
        return Err(SpectralError::DimensionOutOfRange(k));
    }
    let n = x.cells[k].len();
    let denom = x.cells[k + 1].len().max(1) as f64;
    let mut counts = vec![0usize; n];
    for faces in &x.boundaries[k + 1] {
        let distinct: BTreeSet<usize> = faces.iter().map(|&(f, _)| f).collect();
        for f in distinct {
            counts[f] += 1;
        }
    }
    let centrality: Vec<f64> = counts.iter().map(|&c| c as f64 / denom).collect();
    let summary = if n == 0 {
        CentralitySummary {
            mean: 0.0,
            std: 0.0,
            max: 0.0,
        }
    } else {
        let mean = centrality.iter().sum::<f64>() / n as f64;
        let var = centrality.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        CentralitySummary {
            mean,
            std: var.sqrt(),
            max: centrality.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    };
    Ok((centrality, summary))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApspResult {
    /// `dist[i][j]` is `None` for unreachable pairs.
    pub dist: Vec<Vec<Option<usize>>>,
    /// Mean over finite unordered pairs (0 when no such pair exists).
    pub mean: f64,
    /// Largest finite distance.
    pub diameter: usize,
    /// Sum of finite unordered pairwise distances.
    pub wiener: u64,
}

/// Unweighted all-pairs shortest paths on the molecular graph by repeated BFS.
pub fn apsp(g: &MolecularGraph) -> ApspResult {
    let n = g.n_atoms();
    let adj = g.adjacency();
    let mut dist = vec![vec![None; n]; n];
    for src in 0..n {
        let mut d = vec![usize::MAX; n];
        d[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if d[w] == usize::MAX {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (j, &dj) in d.iter().enumerate() {
            if dj != usize::MAX {
                dist[src][j] = Some(dj);
            }
        }
    }
    let mut wiener = 0u64;
    let mut diameter = 0usize;
    let mut pairs = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(d) = dist[i][j] {
                wiener += d as u64;
                diameter = diameter.max(d);
                pairs += 1;
            }
        }
    }
    let mean = if pairs == 0 {
        0.0
    } else {
        wiener as f64 / pairs as f64
    };
    ApspResult {
        dist,
        mean,
        diameter,
        wiener,
    }
}
