//! Fingerprint comparison.
//!
//! Windows of two tracks are matched by a minimum-cost assignment on a
//! λ-weighted sum of Betti-curve L1 distances. The matched window times are
//! median-smoothed and their Pearson correlation measures how well the
//! matching preserves temporal order; the error is `1 - ρ`.

mod assignment;
mod evaluate;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubical::betti_l1;
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;

pub use evaluate::{
    auc_trapezoid, classify_batch, classify_scores, learn_kappa, roc_curve, BatchMetrics, Confusion, Label,
    RocPoint, ScoredPair, TARGET_FPR,
};

pub const DEFAULT_KAPPA: f64 = 0.2521;
pub const DEFAULT_SMOOTH_K: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub values: Vec<f64>,
    pub row_times: Vec<f64>,
    pub col_times: Vec<f64>,
}

impl CostMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn total(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(i, j)| self.get(i, j)).sum()
    }
}

fn check_compatible(a: &Fingerprint, b: &Fingerprint) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("fingerprint has no entries"));
    }
    let (ga, gb) = (&a.entries[0].beta0, &b.entries[0].beta0);
    if !ga.same_grid(gb) {
        return Err(Error::Incompatible(format!(
            "Betti grids differ ([{}, {}] x {} vs [{}, {}] x {})",
            ga.lo,
            ga.hi,
            ga.resolution(),
            gb.lo,
            gb.hi,
            gb.resolution()
        )));
    }
    let (ca, cb) = (&a.config, &b.config);
    if ca.window_seconds != cb.window_seconds || ca.overlap != cb.overlap || ca.stft != cb.stft {
        return Err(Error::Incompatible("fingerprints were computed with different window or STFT settings".into()));
    }
    Ok(())
}

/// `C[i][j] = λ·‖β0_i − β0'_j‖₁ + (1 − λ)·‖β1_i − β1'_j‖₁`.
pub fn cost_matrix(a: &Fingerprint, b: &Fingerprint, lambda: f64) -> Result<CostMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda must be in [0, 1], got {lambda}")));
    }
    check_compatible(a, b)?;
    let rows: Vec<Vec<f64>> = a
        .entries
        .par_iter()
        .map(|ea| {
            b.entries
                .iter()
                .map(|eb| {
                    let m0 = betti_l1(&ea.beta0, &eb.beta0)?;
                    let m1 = betti_l1(&ea.beta1, &eb.beta1)?;
                    Ok(lambda * m0 + (1.0 - lambda) * m1)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(CostMatrix {
        rows: a.len(),
        cols: b.len(),
        values: rows.into_iter().flatten().collect(),
        row_times: a.times(),
        col_times: b.times(),
    })
}

/// Minimum-cost matching of `min(rows, cols)` pairs, sorted by row. Among
/// equal-cost optima the lexicographically smallest pair list is returned.
pub fn min_cost_assignment(c: &CostMatrix) -> Result<Vec<(usize, usize)>> {
    if c.values.iter().any(|&v| v < 0.0) {
        return Err(Error::invalid("cost matrix entries must be non-negative"));
    }
    assignment::solve(&assignment::Dense { rows: c.rows, cols: c.cols, values: &c.values })
}

/// Same solver on a bare row-major matrix.
pub fn assign(rows: usize, cols: usize, values: &[f64]) -> Result<Vec<(usize, usize)>> {
    if values.len() != rows * cols {
        return Err(Error::invalid(format!("{rows}x{cols} matrix needs {} values", rows * cols)));
    }
    assignment::solve(&assignment::Dense { rows, cols, values })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// How the median window behaves near the ends of the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MedianEdges {
    /// Shrink the radius to `min(k, i, n - 1 - i)` so the window stays
    /// centred; monotone sequences are left unchanged.
    #[default]
    Centered,
    /// Cut the window at the ends, `[max(0, i - k), min(n - 1, i + k)]`.
    Truncated,
}

/// Replaces each second coordinate by the median of its neighbours within
/// radius `k`, keeping the window centred at the ends.
pub fn neighborhood_median(pairs: &[(f64, f64)], k: usize) -> Result<Vec<(f64, f64)>> {
    neighborhood_median_with(pairs, k, MedianEdges::Centered)
}

pub fn neighborhood_median_with(pairs: &[(f64, f64)], k: usize, edges: MedianEdges) -> Result<Vec<(f64, f64)>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no matched pairs to smooth"));
    }
    let n = pairs.len();
    let mut window = Vec::with_capacity(2 * k + 1);
    Ok((0..n)
        .map(|i| {
            let (lo, hi) = match edges {
                MedianEdges::Centered => {
                    let r = k.min(i).min(n - 1 - i);
                    (i - r, i + r)
                }
                MedianEdges::Truncated => (i.saturating_sub(k), (i + k).min(n - 1)),
            };
            window.clear();
            window.extend(pairs[lo..=hi].iter().map(|p| p.1));
            window.sort_by(f64::total_cmp);
            (pairs[i].0, median(&window))
        })
        .collect())
}

/// Pearson correlation of the two coordinates; 0 when either has no
/// variance.
pub fn order_score(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::invalid(format!("need at least 2 pairs for a correlation, got {}", pairs.len())));
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Positive,
    Negative,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Positive => "positive",
            Decision::Negative => "negative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareParams {
    pub lambda: f64,
    pub smooth_k: usize,
    pub kappa: f64,
}

impl Default for CompareParams {
    fn default() -> Self {
        Self { lambda: 0.5, smooth_k: DEFAULT_SMOOTH_K, kappa: DEFAULT_KAPPA }
    }
}

impl CompareParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::invalid(format!("lambda must be in [0, 1], got {}", self.lambda)));
        }
        if !self.kappa.is_finite() {
            return Err(Error::invalid("kappa must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// `(t_i, t_j)` for every matched pair, sorted by `t_i`.
    pub pairs: Vec<(f64, f64)>,
    /// `(t_i, median-smoothed t_j)`.
    pub smoothed: Vec<(f64, f64)>,
    pub rho: f64,
    pub error: f64,
    pub decision: Decision,
    pub kappa: f64,
    pub cost: f64,
}

/// Cost matrix, optimal assignment, smoothing and order score.
pub fn compare(a: &Fingerprint, b: &Fingerprint, params: &CompareParams) -> Result<MatchResult> {
    params.validate()?;
    let c = cost_matrix(a, b, params.lambda)?;
    let matched = min_cost_assignment(&c)?;
    let pairs: Vec<(f64, f64)> = matched.iter().map(|&(i, j)| (c.row_times[i], c.col_times[j])).collect();
    let smoothed = neighborhood_median(&pairs, params.smooth_k)?;
    let rho = if smoothed.len() < 2 { 0.0 } else { order_score(&smoothed)? };
    let error = 1.0 - rho;
    let decision = if error < params.kappa { Decision::Positive } else { Decision::Negative };
    Ok(MatchResult { cost: c.total(&matched), pairs, smoothed, rho, error, decision, kappa: params.kappa })
}
