//! Acceptance suite: one test per release criterion, each printing a PASS
//! line once its checks hold. Oracles here are written independently of the
//! production code paths they cross-check.

use ecckit::ecc::{self, ECCConfig};
use ecckit::lifting::{self, LiftConfig};
use ecckit::molio::{self, MolError, MolecularGraph};
use ecckit::pna;
use ecckit::rng::SplitMix64;
use ecckit::spectral::{self, SymmetricMatrix};
use ecckit::statlab;
use ecckit::testutil::{random_connected_graph, random_graph};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

// Published five-fold NB comparison rows: (family, competitor, delta, t_nb,
// ci_low, ci_high, p_holm). Two datasets, MAE and RMSE families of 12 each.
#[derive(Clone, Copy)]
struct NbRow {
    delta: f64,
    t_nb: f64,
    ci_low: f64,
    ci_high: f64,
    p_holm: f64,
}

const fn row(delta: f64, t_nb: f64, ci_low: f64, ci_high: f64, p_holm: f64) -> NbRow {
    NbRow {
        delta,
        t_nb,
        ci_low,
        ci_high,
        p_holm,
    }
}

const QM9_MAE: [NbRow; 12] = [
    row(1.212, 48.842, 1.143, 1.281, 6e-06),
    row(1.267, 25.966, 1.132, 1.403, 7.2e-05),
    row(1.254, 22.974, 1.103, 1.406, 0.000106),
    row(0.829, 22.089, 0.725, 0.934, 0.000112),
    row(1.167, 20.716, 1.011, 1.324, 0.000125),
    row(0.831, 20.866, 0.720, 0.941, 0.000125),
    row(0.834, 19.948, 0.718, 0.950, 0.000125),
    row(1.177, 17.804, 0.993, 1.361, 0.000146),
    row(1.153, 15.862, 0.951, 1.354, 0.000185),
    row(0.835, 13.358, 0.661, 1.008, 0.000272),
    row(0.548, 9.634, 0.390, 0.706, 0.000649),
    row(0.551, 7.743, 0.353, 0.748, 0.000749),
];

const QM9_RMSE: [NbRow; 12] = [
    row(1.424, 30.029, 1.292, 1.556, 4.4e-05),
    row(1.359, 19.070, 1.161, 1.556, 0.000245),
    row(1.584, 16.790, 1.322, 1.846, 0.000369),
    row(1.491, 16.167, 1.235, 1.747, 0.000385),
    row(1.516, 14.189, 1.220, 1.813, 0.000573),
    row(1.484, 12.955, 1.166, 1.802, 0.000717),
    row(0.897, 12.286, 0.694, 1.100, 0.000756),
    row(0.884, 11.020, 0.661, 1.107, 0.000964),
    row(0.877, 10.341, 0.641, 1.112, 0.000987),
    row(0.899, 8.979, 0.621, 1.177, 0.00128),
    row(0.562, 6.329, 0.315, 0.808, 0.00319),
    row(0.553, 6.171, 0.304, 0.802, 0.00319),
];

const LIPO_MAE: [NbRow; 12] = [
    row(0.332, 35.043, 0.305, 0.358, 2.4e-05),
    row(0.338, 32.601, 0.309, 0.366, 2.9e-05),
    row(0.219, 15.687, 0.180, 0.257, 0.000482),
    row(0.331, 15.062, 0.270, 0.392, 0.00051),
    row(0.301, 14.563, 0.244, 0.359, 0.000517),
    row(0.232, 13.138, 0.183, 0.281, 0.000678),
    row(0.293, 11.414, 0.222, 0.365, 0.00101),
    row(0.132, 10.909, 0.098, 0.165, 0.00101),
    row(0.132, 10.861, 0.098, 0.166, 0.00101),
    row(0.134, 9.321, 0.094, 0.174, 0.00111),
    row(0.317, 7.518, 0.200, 0.434, 0.00168),
    row(0.089, 3.640, 0.021, 0.157, 0.011),
];

const LIPO_RMSE: [NbRow; 12] = [
    row(0.353, 20.048, 0.304, 0.402, 0.000219),
    row(0.358, 17.665, 0.302, 0.415, 0.000332),
    row(0.355, 13.628, 0.283, 0.427, 0.000839),
    row(0.320, 11.120, 0.240, 0.400, 0.00167),
    row(0.158, 8.365, 0.106, 0.210, 0.00259),
    row(0.314, 8.565, 0.212, 0.416, 0.00259),
    row(0.149, 8.517, 0.100, 0.197, 0.00259),
    row(0.345, 6.855, 0.205, 0.485, 0.00259),
    row(0.148, 9.091, 0.103, 0.193, 0.00259),
    row(0.230, 9.643, 0.164, 0.296, 0.00259),
    row(0.238, 9.620, 0.170, 0.307, 0.00259),
    row(0.112, 4.077, 0.036, 0.189, 0.00757),
];

#[test]
fn criterion_01_nb_confidence_interval_reconstruction() {
    // Interval half-width follows algebraically from delta and t_nb alone:
    // se = delta / t_nb, half = t_{0.975, 4} * se.
    let crit = statlab::t_quantile(0.975, 4);
    let mut checked = 0;
    for family in [&QM9_MAE, &QM9_RMSE, &LIPO_MAE, &LIPO_RMSE] {
        for r in family.iter() {
            let half = crit * r.delta / r.t_nb;
            assert!(
                (r.delta - half - r.ci_low).abs() <= 0.002,
                "low bound off: delta {} t {}",
                r.delta,
                r.t_nb
            );
            assert!(
                (r.delta + half - r.ci_high).abs() <= 0.002,
                "high bound off: delta {} t {}",
                r.delta,
                r.t_nb
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 48);
    println!("criterion 1 PASS: NB confidence intervals reconstructed for {checked} published rows (abs tol 0.002)");
}

#[test]
fn criterion_02_holm_reconstruction() {
    for (family, label) in [(&QM9_MAE, "MAE"), (&QM9_RMSE, "RMSE")] {
        // The family's extreme published value sits in its first row.
        let expect_top = family[0].p_holm;
        let pvals: Vec<f64> = family
            .iter()
            .map(|r| statlab::t_survival(r.t_nb, 4))
            .collect();
        let (adjusted, _) = statlab::holm_adjust(&pvals, 0.05).unwrap();
        let top = adjusted.iter().cloned().fold(f64::INFINITY, f64::min);
        let rel = (top - expect_top).abs() / expect_top;
        assert!(
            rel <= 0.15,
            "{label}: reconstructed Holm p {top:.3e} vs published {expect_top:.1e}"
        );
    }
    println!("criterion 2 PASS: Holm-adjusted extremes reproduce published values within 15% relative");
}

fn dense_product_is_zero(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    // a is (m x n), b is (n x p); checks a * b == 0 exactly.
    let p = b.first().map_or(0, Vec::len);
    for arow in a {
        for col in 0..p {
            let sum: i64 = arow.iter().zip(b).map(|(&x, brow)| x * brow[col]).sum();
            if sum != 0 {
                return false;
            }
        }
    }
    true
}

#[test]
fn criterion_03_chain_complex_validity() {
    let mut rng = SplitMix64::new(0xC0FFEE);
    for trial in 0..500 {
        let g = random_graph(&mut rng, 12);
        let cfg = LiftConfig {
            include_rings: trial % 3 != 0,
            khop: (trial % 5usize).saturating_sub(1),
            ring_size_max: 8,
        };
        let x = lifting::lift(&g, &cfg).unwrap();
        lifting::validate(&x).unwrap_or_else(|v| panic!("trial {trial}: {}", v.message));
        let (n, m) = (g.n_atoms(), g.n_bonds());
        let counts = x.counts();
        assert_eq!(counts[0], 3 * n, "trial {trial}");
        assert_eq!(counts[1], 3 * n + 2 * m, "trial {trial}");
        assert_eq!(counts[2], n + 2 * m, "trial {trial}");
        let b1 = lifting::boundary_matrix(&x, 1).unwrap().dense();
        let b2 = lifting::boundary_matrix(&x, 2).unwrap().dense();
        let b3 = lifting::boundary_matrix(&x, 3).unwrap().dense();
        assert!(dense_product_is_zero(&b1, &b2), "trial {trial}: d1 d2 != 0");
        assert!(dense_product_is_zero(&b2, &b3), "trial {trial}: d2 d3 != 0");
    }
    println!("criterion 3 PASS: 500 random lifts valid with exact dd = 0 and closed-form cell counts");
}

/// Independent rank oracle: plain fraction Gaussian elimination, no pivots
/// shared with the production fraction-free path.
fn oracle_rank(dense: &[Vec<i64>]) -> usize {
    let rows = dense.len();
    let cols = dense.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> = dense
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect()
        })
        .collect();
    let zero = BigRational::from_integer(BigInt::from(0));
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| m[r][col] != zero);
        let Some(pivot) = pivot else { continue };
        m.swap(rank, pivot);
        let lead = m[rank][col].clone();
        for c in col..cols {
            let v = m[rank][c].clone();
            m[rank][c] = v / lead.clone();
        }
        for r in 0..rows {
            if r != rank && m[r][col] != zero {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let sub = factor.clone() * m[rank][c].clone();
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[test]
fn criterion_04_homology_oracle_agreement() {
    let mut rng = SplitMix64::new(4040);
    let trials: Vec<(MolecularGraph, LiftConfig)> = (0..200)
        .map(|trial| {
            let g = random_graph(&mut rng, 7);
            let cfg = LiftConfig {
                include_rings: true,
                khop: if trial % 4 == 0 { 2 } else { 0 },
                ring_size_max: 8,
            };
            (g, cfg)
        })
        .collect();
    trials.par_iter().for_each(|(g, cfg)| {
        let x = lifting::lift(g, cfg).unwrap();
        let betti = spectral::betti_numbers(&x).unwrap();
        let counts = x.counts();
        // Oracle Betti numbers from dense rational elimination ranks.
        let ranks: Vec<usize> = (1..4)
            .map(|k| oracle_rank(&lifting::boundary_matrix(&x, k).unwrap().dense()))
            .collect();
        let oracle = [
            counts[0] - ranks[0],
            counts[1] - ranks[0] - ranks[1],
            counts[2] - ranks[1] - ranks[2],
            counts[3] - ranks[2],
        ];
        assert_eq!(betti, oracle);
        // Euler-Poincare, exactly.
        let chi_cells =
            counts[0] as i64 - counts[1] as i64 + counts[2] as i64 - counts[3] as i64;
        let chi_betti = betti[0] as i64 - betti[1] as i64 + betti[2] as i64 - betti[3] as i64;
        assert_eq!(chi_cells, chi_betti);
        // Harmonic check: dim ker L_k equals beta_k.
        for k in 0..4 {
            if counts[k] == 0 {
                assert_eq!(betti[k], 0);
                continue;
            }
            let l = spectral::hodge_laplacian(&x, k).unwrap();
            let (eigs, _) = spectral::sym_eigs(&l, 1e-12).unwrap();
            let kernel = eigs.iter().filter(|&&v| v.abs() < 1e-8).count();
            assert_eq!(kernel, betti[k], "dim ker L_{k}");
        }
    });
    println!("criterion 4 PASS: Betti numbers agree with the rational-elimination oracle, Euler-Poincare, and Laplacian kernels on 200 complexes");
}

/// Characteristic polynomial of a small symmetric matrix via Faddeev-LeVerrier,
/// returned monic: p(x) = x^n + c[n-1] x^(n-1) + ... + c[0].
fn char_poly(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut coeffs = vec![0.0; n];
    let mut aux: Vec<Vec<f64>> = m.to_vec();
    let mut c = 1.0;
    for k in 1..=n {
        if k > 1 {
            // aux = m * (aux + c I)
            let mut shifted = aux.clone();
            for (i, rowv) in shifted.iter_mut().enumerate() {
                rowv[i] += c;
            }
            let mut next = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    next[i][j] = (0..n).map(|t| m[i][t] * shifted[t][j]).sum();
                }
            }
            aux = next;
        }
        let trace: f64 = (0..n).map(|i| aux[i][i]).sum();
        c = -trace / k as f64;
        coeffs[n - k] = c;
    }
    coeffs
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    // Monic with trailing coefficients coeffs[0..n].
    let mut acc = 1.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// All real roots of a real-rooted monic polynomial by recursive bisection
/// between the roots of the derivative.
fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![-coeffs[0]];
    }
    // Derivative, re-normalized to monic.
    let lead = n as f64;
    let deriv: Vec<f64> = (1..n).map(|i| coeffs[i] * i as f64 / lead).collect();
    let critical = real_roots(&deriv);
    let bound = 1.0 + coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let mut brackets = vec![-bound];
    brackets.extend(critical);
    brackets.push(bound);
    let mut roots = Vec::new();
    for win in brackets.windows(2) {
        let (mut lo, mut hi) = (win[0], win[1]);
        let (flo, fhi) = (poly_eval(coeffs, lo), poly_eval(coeffs, hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if poly_eval(coeffs, mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    // A repeated eigenvalue sits exactly at a critical point; recover missing
    // multiplicity by counting.
    while roots.len() < n {
        let extra = brackets[1..brackets.len() - 1]
            .iter()
            .copied()
            .find(|&x| poly_eval(coeffs, x).abs() < 1e-9)
            .unwrap_or(roots[0]);
        roots.push(extra);
    }
    roots.sort_by(f64::total_cmp);
    roots.truncate(n);
    roots
}

#[test]
fn criterion_05_eigensolver_accuracy() {
    let mut rng = SplitMix64::new(555);
    for trial in 0..200 {
        let n = 2 + rng.next_index(39);
        let mut m = SymmetricMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = rng.next_index(2001) as f64 / 200.0 - 5.0;
                m.set(i, j, v);
            }
        }
        let (eigs, vecs) = spectral::sym_eigs(&m, 1e-12).unwrap();
        let budget = 1e-8 * m.frobenius();
        for (k, &lambda) in eigs.iter().enumerate() {
            let mut norm2 = 0.0;
            for i in 0..n {
                let mv: f64 = (0..n).map(|j| m.get(i, j) * vecs[j][k]).sum();
                let r = mv - lambda * vecs[i][k];
                norm2 += r * r;
            }
            assert!(
                norm2.sqrt() <= budget,
                "trial {trial}: residual {} over {budget}",
                norm2.sqrt()
            );
        }
    }
    // Characteristic-polynomial oracle for tiny matrices.
    for trial in 0..100 {
        let n = 2 + rng.next_index(3);
        let mut dense = vec![vec![0.0; n]; n];
        let mut m = SymmetricMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = rng.next_index(13) as f64 - 6.0;
                dense[i][j] = v;
                dense[j][i] = v;
                m.set(i, j, v);
            }
        }
        let (eigs, _) = spectral::sym_eigs(&m, 1e-14).unwrap();
        let oracle = real_roots(&char_poly(&dense));
        for (a, b) in eigs.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9, "trial {trial}: {a} vs {b}");
        }
    }
    // Triangle graph Laplacian has spectrum (0, 3, 3).
    let tri = SymmetricMatrix::from_rows(vec![
        vec![2.0, -1.0, -1.0],
        vec![-1.0, 2.0, -1.0],
        vec![-1.0, -1.0, 2.0],
    ]);
    let (eigs, _) = spectral::sym_eigs(&tri, 1e-14).unwrap();
    assert!(eigs[0].abs() < 1e-10);
    assert!((eigs[1] - 3.0).abs() < 1e-10);
    assert!((eigs[2] - 3.0).abs() < 1e-10);
    println!("criterion 5 PASS: Jacobi residuals within 1e-8 |M|_F on 200 matrices; char-poly oracle and triangle spectrum agree");
}

fn floyd_warshall(g: &MolecularGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.n_atoms();
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        d[i][i] = 0;
    }
    for bond in &g.bonds {
        d[bond.a][bond.b] = 1;
        d[bond.b][bond.a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| if v >= INF { None } else { Some(v) })
                .collect()
        })
        .collect()
}

#[test]
fn criterion_06_apsp_oracle() {
    let mut rng = SplitMix64::new(66);
    for trial in 0..300 {
        let g = random_graph(&mut rng, 10);
        let ours = spectral::apsp(&g);
        let oracle = floyd_warshall(&g);
        assert_eq!(ours.dist, oracle, "trial {trial}");
    }
    let benzene = molio::parse_smiles("c1ccccc1").unwrap();
    assert_eq!(spectral::apsp(&benzene).wiener, 27);
    println!("criterion 6 PASS: BFS all-pairs distances equal Floyd-Warshall on 300 graphs; benzene Wiener index 27");
}

#[test]
fn criterion_07_pna_kernel_oracle() {
    let mut rng = SplitMix64::new(77);
    for trial in 0..100 {
        let g = random_connected_graph(&mut rng, 9);
        let n = g.n_atoms();
        let f = 1 + rng.next_index(4);
        let h: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..f)
                    .map(|_| rng.next_index(2001) as f64 / 100.0 - 10.0)
                    .collect()
            })
            .collect();
        let delta = 1.0 + rng.next_index(100) as f64 / 50.0;
        let ours = pna::pna_aggregate(&h, &g, delta).unwrap();
        // Brute-force reference: direct statistics per node and column.
        let adj = g.adjacency();
        for i in 0..n {
            let d = adj[i].len();
            if d == 0 {
                assert!(ours[i].iter().all(|&v| v == 0.0));
                continue;
            }
            let s = ((d + 1) as f64).ln() / delta;
            for col in 0..f {
                let vals: Vec<f64> = adj[i].iter().map(|&w| h[w][col]).collect();
                let mean = vals.iter().sum::<f64>() / d as f64;
                let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
                let expect = [mean, min, max, var.sqrt()];
                for (ai, &agg) in expect.iter().enumerate() {
                    for (si, &scale) in [1.0, s, 1.0 / s].iter().enumerate() {
                        let got = ours[i][(ai * 3 + si) * f + col];
                        assert!(
                            (got - agg * scale).abs() <= 1e-12,
                            "trial {trial} node {i} block {ai}/{si}"
                        );
                    }
                }
            }
        }
    }
    // Exact equivariance across 50 random permutations.
    for _ in 0..50 {
        let g = random_connected_graph(&mut rng, 8);
        let n = g.n_atoms();
        let h: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.next_index(1000) as f64 / 7.0])
            .collect();
        let base = pna::pna_aggregate(&h, &g, 1.9).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut perm);
        let gp = g.relabel(&perm);
        let hp: Vec<Vec<f64>> = perm.iter().map(|&old| h[old].clone()).collect();
        let permuted = pna::pna_aggregate(&hp, &gp, 1.9).unwrap();
        for (new, &old) in perm.iter().enumerate() {
            assert_eq!(permuted[new], base[old], "bit-exact equivariance");
        }
    }
    println!("criterion 7 PASS: PNA aggregation matches brute force to 1e-12 and is exactly permutation-equivariant");
}

#[test]
fn criterion_08_determinism_and_format() {
    let smiles = [
        "C", "CC", "CCO", "c1ccccc1", "CC(=O)O", "C1CCCCC1", "c1ccncc1", "CC(C)(C)C",
        "c1ccc2ccccc2c1", "N#Cc1ccccc1",
    ];
    let cfg = ECCConfig::default();
    let graphs: Vec<MolecularGraph> =
        smiles.iter().map(|s| molio::parse_smiles(s).unwrap()).collect();
    let serial: Vec<(String, ecc::ECCVector)> = graphs
        .iter()
        .zip(&smiles)
        .map(|(g, s)| (s.to_string(), ecc::ecc_features(g, &cfg).unwrap()))
        .collect();
    let parallel: Vec<(String, ecc::ECCVector)> = graphs
        .par_iter()
        .zip(&smiles)
        .map(|(g, s)| (s.to_string(), ecc::ecc_features(g, &cfg).unwrap()))
        .collect();
    let mut serial_bytes = Vec::new();
    ecc::write_features(&mut serial_bytes, cfg.pad_to, &serial).unwrap();
    let mut parallel_bytes = Vec::new();
    ecc::write_features(&mut parallel_bytes, cfg.pad_to, &parallel).unwrap();
    assert_eq!(serial_bytes, parallel_bytes, "serial vs parallel bytes");
    // Round trip is bit-exact.
    let (pad, records) = ecc::read_features(&mut serial_bytes.as_slice()).unwrap();
    assert_eq!(pad, cfg.pad_to);
    assert_eq!(records.len(), serial.len());
    for (record, (id, vector)) in records.iter().zip(&serial) {
        assert_eq!(&record.id, id);
        let a: Vec<u64> = record.values.iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = vector.values.iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }
    // Identical seeds give identical vectors across independent runs.
    let rerun = ecc::ecc_features(&graphs[3], &cfg).unwrap();
    assert_eq!(rerun.values, serial[3].1.values);
    let other_seed = ecc::ecc_features(
        &graphs[3],
        &ECCConfig {
            seed: 43,
            ..ECCConfig::default()
        },
    )
    .unwrap();
    assert_ne!(other_seed.values, serial[3].1.values, "seed must matter");
    println!("criterion 8 PASS: feature files round-trip bit-exactly and serial/parallel/seeded runs agree");
}

#[test]
fn criterion_09_parser_corpus() {
    // (smiles, atoms, bonds); bonds = atoms - 1 + ring closures for these
    // connected inputs.
    let corpus: [(&str, usize, usize); 50] = [
        ("C", 1, 0),
        ("N", 1, 0),
        ("O", 1, 0),
        ("CC", 2, 1),
        ("C=C", 2, 1),
        ("C#C", 2, 1),
        ("C#N", 2, 1),
        ("CCC", 3, 2),
        ("CCO", 3, 2),
        ("CCN", 3, 2),
        ("CSC", 3, 2),
        ("OO", 2, 1),
        ("O=C=O", 3, 2),
        ("S=C=S", 3, 2),
        ("ClCCl", 3, 2),
        ("BrCCBr", 4, 3),
        ("IC#CI", 4, 3),
        ("FC(F)(F)F", 5, 4),
        ("CCCC", 4, 3),
        ("CCCCCCCC", 8, 7),
        ("CC(C)C", 4, 3),
        ("CC(C)(C)C", 5, 4),
        ("N(C)(C)C", 4, 3),
        ("CP(C)C", 4, 3),
        ("CC(=O)O", 4, 3),
        ("CC(=O)OC", 5, 4),
        ("OCC(O)CO", 6, 5),
        ("CC#CC", 4, 3),
        ("C1CC1", 3, 3),
        ("C%10CC%10", 3, 3),
        ("C1CCC1", 4, 4),
        ("C1CCCC1", 5, 5),
        ("C1CCCCC1", 6, 6),
        ("C1CCCCCC1", 7, 7),
        ("c1ccccc1", 6, 6),
        ("C1=CC=CC=C1", 6, 6),
        ("c1ccncc1", 6, 6),
        ("c1ccoc1", 5, 5),
        ("c1ccsc1", 5, 5),
        ("c1cc[nH]c1", 5, 5),
        ("Cc1ccccc1", 7, 7),
        ("c1ccc(cc1)O", 7, 7),
        ("OC(=O)c1ccccc1", 9, 9),
        ("N#Cc1ccccc1", 8, 8),
        ("c1ccc2ccccc2c1", 10, 11),
        ("C1CC1C2CC2", 6, 7),
        ("CN1CCCC1", 6, 6),
        ("[13C]", 1, 0),
        ("[O-]C(=O)C", 4, 3),
        ("[NH4+]", 1, 0),
    ];
    for (smiles, atoms, bonds) in corpus {
        let g = molio::parse_smiles(smiles).unwrap_or_else(|e| panic!("{smiles}: {e}"));
        assert_eq!(g.n_atoms(), atoms, "{smiles}: atom count");
        assert_eq!(g.n_bonds(), bonds, "{smiles}: bond count");
    }
    // Specified error cases.
    assert!(matches!(
        molio::parse_smiles("C1CC"),
        Err(MolError::Syntax { .. })
    ));
    assert!(matches!(
        molio::parse_smiles("C1C1"),
        Err(MolError::DuplicateBond { .. })
    ));
    assert!(molio::parse_smiles("").is_err());
    assert!(molio::parse_smiles("C(").is_err());
    assert!(molio::parse_smiles("[C").is_err());
    assert!(molio::parse_smiles("[H]").is_err());
    assert!(molio::parse_smiles("[Zz]").is_err());
    println!("criterion 9 PASS: 50-molecule corpus parses to verified counts; malformed inputs raise the specified errors");
}

#[test]
fn criterion_10_statistical_identities() {
    // t_survival(0, nu) = 0.5.
    for nu in [1, 2, 4, 7, 20, 100] {
        assert!((statlab::t_survival(0.0, nu) - 0.5).abs() < 1e-12);
    }
    let mut rng = SplitMix64::new(1010);
    for _ in 0..100 {
        // NB scale equivariance on random difference vectors.
        let k = 2 + rng.next_index(9);
        let d: Vec<f64> = (0..k)
            .map(|_| rng.next_index(4001) as f64 / 1000.0 - 2.0)
            .collect();
        let base = statlab::nb_test(&d, 0.05).unwrap();
        let c = 0.5 + rng.next_index(100) as f64 / 20.0;
        let scaled = statlab::nb_test(&d.iter().map(|x| x * c).collect::<Vec<_>>(), 0.05).unwrap();
        if !base.degenerate {
            assert!((scaled.t_nb - base.t_nb).abs() < 1e-9);
            assert!((scaled.p - base.p).abs() < 1e-12);
            assert!((scaled.delta - c * base.delta).abs() < 1e-12);
        }
        // Holm between raw and Bonferroni.
        let m = 1 + rng.next_index(12);
        let ps: Vec<f64> = (0..m).map(|_| rng.next_index(1001) as f64 / 1000.0).collect();
        let (adj, _) = statlab::holm_adjust(&ps, 0.05).unwrap();
        for (a, p) in adj.iter().zip(&ps) {
            assert!(*a >= *p - 1e-15);
            assert!(*a <= (m as f64 * p).min(1.0) + 1e-15);
        }
        // Folds partition the index range.
        let n = 4 + rng.next_index(40);
        let k = 2 + rng.next_index(n - 2).min(n - 2);
        let folds = statlab::kfold_split(n, k, rng.next_u64()).unwrap();
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        assert!(hi - lo <= 1);
    }
    // Degenerate conventions.
    assert_eq!(statlab::nb_test(&[1.0; 5], 0.05).unwrap().p, 0.0);
    assert_eq!(statlab::nb_test(&[-1.0; 5], 0.05).unwrap().p, 1.0);
    assert_eq!(statlab::nb_test(&[0.0; 5], 0.05).unwrap().p, 0.5);
    println!("criterion 10 PASS: statistical identity and convention suite green");
}
