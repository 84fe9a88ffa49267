//! Model-comparison statistics over cross-validated fold losses: deterministic
//! k-fold splitting, Nadeau-Bengio corrected one-sided paired t-tests, Holm
//! step-down familywise-error control, and non-parametric bootstrap intervals.

use crate::rng::SplitMix64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatError {
    #[error("K must satisfy 2 <= K <= n (got K={k}, n={n})")]
    BadK { k: usize, n: usize },
    #[error("difference vector needs at least 2 entries (got {0})")]
    BadLength(usize),
    #[error("p-values must lie in [0, 1]")]
    BadP,
    #[error("unknown control model '{0}'")]
    UnknownControl(String),
    #[error("sequences have mismatched lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("fold-loss table line {line}: {message}")]
    Table { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Mae,
    Rmse,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Mae => "mae",
            LossKind::Rmse => "rmse",
        }
    }
}

/// Per-model, per-fold losses with a shared fold order (pairing assumption).
#[derive(Debug, Clone, PartialEq)]
pub struct FoldLossTable {
    /// Models in first-appearance order.
    pub models: Vec<String>,
    pub k: usize,
    mae: BTreeMap<String, Vec<f64>>,
    rmse: BTreeMap<String, Vec<f64>>,
}

impl FoldLossTable {
    /// Parse delimiter-separated text with header `model,fold,mae,rmse` and
    /// one row per (model, fold). Every model must cover folds 0..K-1.
    pub fn from_csv(text: &str) -> Result<Self, StatError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(StatError::Table {
            line: 1,
            message: "empty file".into(),
        })?;
        let normalized: Vec<&str> = header.split(',').map(str::trim).collect();
        if normalized != ["model", "fold", "mae", "rmse"] {
            return Err(StatError::Table {
                line: 1,
                message: format!("expected header 'model,fold,mae,rmse', got '{header}'"),
            });
        }
        let mut rows: BTreeMap<String, BTreeMap<usize, (f64, f64)>> = BTreeMap::new();
        let mut models = Vec::new();
        for (idx, raw) in lines {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(StatError::Table {
                    line,
                    message: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let model = fields[0].to_string();
            let fold: usize = fields[1].parse().map_err(|_| StatError::Table {
                line,
                message: format!("bad fold index '{}'", fields[1]),
            })?;
            let parse_loss = |s: &str| -> Result<f64, StatError> {
                let v: f64 = s.parse().map_err(|_| StatError::Table {
                    line,
                    message: format!("bad loss value '{s}'"),
                })?;
                if !v.is_finite() {
                    return Err(StatError::Table {
                        line,
                        message: format!("non-finite loss '{s}'"),
                    });
                }
                Ok(v)
            };
            let mae = parse_loss(fields[2])?;
            let rmse = parse_loss(fields[3])?;
            if !rows.contains_key(&model) {
                models.push(model.clone());
            }
            if rows.entry(model).or_default().insert(fold, (mae, rmse)).is_some() {
                return Err(StatError::Table {
                    line,
                    message: format!("duplicate (model, fold) row for fold {fold}"),
                });
            }
        }
        let k = rows
            .values()
            .next()
            .map(|folds| folds.len())
            .ok_or(StatError::Table {
                line: 1,
                message: "no data rows".into(),
            })?;
        let mut mae = BTreeMap::new();
        let mut rmse = BTreeMap::new();
        for (model, folds) in &rows {
            if folds.len() != k || folds.keys().enumerate().any(|(i, &f)| i != f) {
                return Err(StatError::Table {
                    line: 1,
                    message: format!("model '{model}' does not cover folds 0..{k}"),
                });
            }
            mae.insert(model.clone(), folds.values().map(|&(m, _)| m).collect());
            rmse.insert(model.clone(), folds.values().map(|&(_, r)| r).collect());
        }
        Ok(FoldLossTable {
            models,
            k,
            mae,
            rmse,
        })
    }

    pub fn losses(&self, model: &str, kind: LossKind) -> Option<&[f64]> {
        let map = match kind {
            LossKind::Mae => &self.mae,
            LossKind::Rmse => &self.rmse,
        };
        map.get(model).map(Vec::as_slice)
    }
}

/// Deterministic K-fold split: Fisher-Yates shuffle of 0..n driven by the
/// seeded splitmix64 generator, then contiguous chunks balanced to within 1.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, StatError> {
    if k < 2 || k > n {
        return Err(StatError::BadK { k, n });
    }
    let mut indices: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut indices);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < extra);
        folds.push(indices[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation; only ever called with x >= 0.5 here.
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Continued-fraction kernel for the regularized incomplete beta function
/// (modified Lentz iteration).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const TOL: f64 = 1e-14;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..400 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < TOL {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Student-t upper tail P(T_nu >= t).
pub fn t_survival(t: f64, nu: usize) -> f64 {
    assert!(nu >= 1, "degrees of freedom must be at least 1");
    if t < 0.0 {
        return 1.0 - t_survival(-t, nu);
    }
    let nu_f = nu as f64;
    let x = nu_f / (nu_f + t * t);
    0.5 * reg_inc_beta(nu_f / 2.0, 0.5, x)
}

/// Two-sided critical value t_{q, nu} with q in (0.5, 1): the t for which the
/// upper tail equals 1 - q. Solved by bisection to absolute tolerance 1e-12.
pub fn t_quantile(q: f64, nu: usize) -> f64 {
    assert!(q > 0.5 && q < 1.0, "quantile must lie in (0.5, 1)");
    let target = 1.0 - q;
    let mut hi = 1.0;
    while t_survival(hi, nu) > target {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_survival(mid, nu) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// One comparison row of a Nadeau-Bengio corrected paired test.
#[derive(Debug, Clone, PartialEq)]
pub struct NBComparison {
    pub competitor: String,
    /// Mean fold difference, competitor minus control (positive favors control).
    pub delta: f64,
    /// Sample variance of the differences.
    pub s2: f64,
    pub se_nb: f64,
    pub t_nb: f64,
    /// Degrees of freedom, K - 1.
    pub nu: usize,
    /// One-sided upper-tail p-value.
    pub p: f64,
    /// Holm-adjusted p-value; NaN until a family adjustment is applied.
    pub p_holm: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// True when s2 = 0 and the zero-variance convention decided p.
    pub degenerate: bool,
}

/// Nadeau-Bengio corrected one-sided paired test on the fold differences.
pub fn nb_test(d: &[f64], alpha: f64) -> Result<NBComparison, StatError> {
    let k = d.len();
    if k < 2 {
        return Err(StatError::BadLength(k));
    }
    let kf = k as f64;
    let nu = k - 1;
    let mean = d.iter().sum::<f64>() / kf;
    let s2 = d.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (kf - 1.0);
    let se = ((1.0 / kf + 1.0 / (kf - 1.0)) * s2).sqrt();
    if s2 == 0.0 {
        let (t, p) = if mean > 0.0 {
            (f64::INFINITY, 0.0)
        } else if mean < 0.0 {
            (f64::NEG_INFINITY, 1.0)
        } else {
            (0.0, 0.5)
        };
        return Ok(NBComparison {
            competitor: String::new(),
            delta: mean,
            s2,
            se_nb: 0.0,
            t_nb: t,
            nu,
            p,
            p_holm: f64::NAN,
            ci_low: mean,
            ci_high: mean,
            degenerate: true,
        });
    }
    let t_nb = mean / se;
    let crit = t_quantile(1.0 - alpha / 2.0, nu);
    Ok(NBComparison {
        competitor: String::new(),
        delta: mean,
        s2,
        se_nb: se,
        t_nb,
        nu,
        p: t_survival(t_nb, nu),
        p_holm: f64::NAN,
        ci_low: mean - crit * se,
        ci_high: mean + crit * se,
        degenerate: false,
    })
}

/// Holm step-down adjustment. Returns adjusted p-values and reject flags in
/// the input order.
pub fn holm_adjust(pvals: &[f64], alpha: f64) -> Result<(Vec<f64>, Vec<bool>), StatError> {
    if pvals.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(StatError::BadP);
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));
    let mut adjusted = vec![0.0; m];
    let mut reject = vec![false; m];
    let mut running_max = 0.0f64;
    let mut still_rejecting = true;
    for (rank, &idx) in order.iter().enumerate() {
        let scaled = ((m - rank) as f64 * pvals[idx]).min(1.0);
        running_max = running_max.max(scaled);
        adjusted[idx] = running_max;
        still_rejecting = still_rejecting && running_max <= alpha;
        reject[idx] = still_rejecting;
    }
    Ok((adjusted, reject))
}

/// A per-loss-kind comparison family, sorted by Holm p ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonFamily {
    pub kind: LossKind,
    pub comparisons: Vec<NBComparison>,
}

/// NB tests of every competitor against the control, with Holm applied
/// separately per loss family.
pub fn compare_to_control(
    table: &FoldLossTable,
    control: &str,
    alpha: f64,
) -> Result<Vec<ComparisonFamily>, StatError> {
    if table.losses(control, LossKind::Mae).is_none() {
        return Err(StatError::UnknownControl(control.to_string()));
    }
    let competitors: Vec<&String> = table.models.iter().filter(|m| *m != control).collect();
    if competitors.is_empty() {
        return Err(StatError::BadLength(0));
    }
    let mut families = Vec::new();
    for kind in [LossKind::Mae, LossKind::Rmse] {
        let base = table.losses(control, kind).unwrap();
        let mut comparisons = Vec::with_capacity(competitors.len());
        for &name in &competitors {
            let other = table.losses(name, kind).unwrap();
            if other.len() != base.len() {
                return Err(StatError::LengthMismatch(other.len(), base.len()));
            }
            let d: Vec<f64> = other.iter().zip(base).map(|(o, c)| o - c).collect();
            let mut cmp = nb_test(&d, alpha)?;
            cmp.competitor = name.clone();
            comparisons.push(cmp);
        }
        let pvals: Vec<f64> = comparisons.iter().map(|c| c.p).collect();
        let (adjusted, _) = holm_adjust(&pvals, alpha)?;
        for (cmp, p_holm) in comparisons.iter_mut().zip(adjusted) {
            cmp.p_holm = p_holm;
        }
        comparisons.sort_by(|a, b| a.p_holm.total_cmp(&b.p_holm));
        families.push(ComparisonFamily { kind, comparisons });
    }
    Ok(families)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCI {
    /// Metric on the full prediction set.
    pub point: f64,
    /// Half the spread between the 2.5th and 97.5th percentile replicates.
    pub half_width: f64,
    pub b: usize,
    pub seed: u64,
}

/// MAE and RMSE of a prediction set.
pub fn metrics(y_true: &[f64], y_pred: &[f64]) -> Result<(f64, f64), StatError> {
    if y_true.len() != y_pred.len() || y_true.is_empty() {
        return Err(StatError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    let n = y_true.len() as f64;
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    for (t, p) in y_true.iter().zip(y_pred) {
        let e = t - p;
        abs_sum += e.abs();
        sq_sum += e * e;
    }
    Ok((abs_sum / n, (sq_sum / n).sqrt()))
}

fn metric_of(kind: LossKind, y_true: &[f64], y_pred: &[f64]) -> f64 {
    let (mae, rmse) = metrics(y_true, y_pred).expect("lengths checked by caller");
    match kind {
        LossKind::Mae => mae,
        LossKind::Rmse => rmse,
    }
}

/// Linear-interpolation percentile of sorted data at q in [0, 1].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Non-parametric bootstrap confidence interval for a metric, percentile
/// method. Each replicate draws its own deterministic substream so parallel
/// and serial evaluation agree bit-exactly.
pub fn bootstrap_ci(
    y_true: &[f64],
    y_pred: &[f64],
    kind: LossKind,
    b: usize,
    seed: u64,
    level: f64,
) -> Result<BootstrapCI, StatError> {
    if y_true.len() != y_pred.len() || y_true.len() < 2 {
        return Err(StatError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    assert!(b >= 100, "bootstrap needs at least 100 replicates");
    assert!(level > 0.0 && level < 1.0);
    let n = y_true.len();
    let point = metric_of(kind, y_true, y_pred);
    let mut replicates: Vec<f64> = (0..b as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = SplitMix64::substream(seed, rep);
            let mut rt = Vec::with_capacity(n);
            let mut rp = Vec::with_capacity(n);
            for _ in 0..n {
                let idx = rng.next_index(n);
                rt.push(y_true[idx]);
                rp.push(y_pred[idx]);
            }
            metric_of(kind, &rt, &rp)
        })
        .collect();
    replicates.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let half_width = (percentile(&replicates, 1.0 - tail) - percentile(&replicates, tail)) / 2.0;
    Ok(BootstrapCI {
        point,
        half_width,
        b,
        seed,
    })
}
