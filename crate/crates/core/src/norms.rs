//! Order statistics and norms: ℓ_p, weak ℓ_p, empirical L_q, ψ_α through
//! moment growth, the local (p)-norm, M_ℓ and the ℓ₁-ball moment formula.
//!
//! All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::samplers::SampleMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Analytic,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub method: NormMethod,
    /// Number of samples behind an empirical value; 0 for analytic ones.
    pub sample_size: usize,
}

impl NormReport {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            method: NormMethod::Analytic,
            sample_size: 0,
        }
    }

    pub fn empirical(value: f64, sample_size: usize) -> Self {
        Self {
            value,
            method: NormMethod::Empirical,
            sample_size,
        }
    }
}

/// |v_i| sorted non-increasingly.
pub fn order_stats_desc(v: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    a.sort_unstable_by(|x, y| y.total_cmp(x));
    a
}

/// Prefix sums of the decreasing rearrangement of v_i²: entry k holds
/// Σ_{i≤k} (v_i²)*, with entry 0 equal to 0.
pub fn sorted_square_prefix(v: &[f64]) -> Vec<f64> {
    let mut sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    sq.sort_unstable_by(|x, y| y.total_cmp(x));
    let mut out = Vec::with_capacity(sq.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for s in sq {
        acc += s;
        out.push(acc);
    }
    out
}

/// (Σ_{i≤k} (v_i²)*)^{1/2}: the ℓ₂ norm of the k largest entries.
pub fn top_k_l2(v: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > v.len() {
        return Err(Error::OutOfRange {
            index: k,
            max: v.len(),
        });
    }
    Ok(sorted_square_prefix(v)[k].sqrt())
}

pub fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return v.iter().fold(0.0, |m, x| m.max(x.abs()));
    }
    if p == 2.0 {
        return v.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    // scale by the max entry to avoid overflow at large p
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// max_k v_k*/k^{1/p}, with k running over 1..=len(v). Since v_k* ≤ v_1*
/// and k^{1/p} ≥ 1 the maximum sits at k = 1, so no sort is needed.
pub fn weak_lp_norm(v: &[f64], _p: f64) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// (mean |x|^q)^{1/q}.
pub fn empirical_lq(samples: &[f64], q: f64) -> Result<f64> {
    if q < 1.0 {
        return invalid(format!("moment exponent must be at least 1, got {q}"));
    }
    if samples.is_empty() {
        return invalid("no samples");
    }
    Ok(lp_norm(samples, q) / (samples.len() as f64).powf(1.0 / q))
}

/// Geometric grid {1, 2, 4, …} capped at `q_max`, with `q_max` appended.
pub fn moment_grid(q_max: f64) -> Vec<f64> {
    let mut g = Vec::new();
    let mut q = 1.0;
    while q < q_max {
        g.push(q);
        q *= 2.0;
    }
    g.push(q_max.max(1.0));
    g
}

/// sup over the grid of ‖Z‖_q / q^{1/α}. Moments above log(sample count)
/// are refused: they are dominated by a handful of draws.
pub fn psi_alpha_estimate(samples: &[f64], alpha: f64, q_grid: &[f64]) -> Result<NormReport> {
    if alpha <= 0.0 {
        return invalid(format!("alpha must be positive, got {alpha}"));
    }
    if q_grid.is_empty() {
        return invalid("empty moment grid");
    }
    let q_cap = (samples.len() as f64).ln();
    let mut best = 0.0f64;
    for &q in q_grid {
        if q < 1.0 || q > q_cap {
            return invalid(format!(
                "moment {q} outside [1, log(sample count) = {q_cap:.3}]"
            ));
        }
        best = best.max(empirical_lq(samples, q)? / q.powf(1.0 / alpha));
    }
    Ok(NormReport::empirical(best, samples.len()))
}

/// ‖Z‖_(p) = sup_{1≤q≤p} ‖Z‖_q/√q over the grid.
pub fn p_norm_local(samples: &[f64], p: f64, q_grid: &[f64]) -> Result<NormReport> {
    if p < 1.0 {
        return invalid(format!("p must be at least 1, got {p}"));
    }
    if q_grid.is_empty() {
        return invalid("empty moment grid");
    }
    let mut best = 0.0f64;
    for &q in q_grid {
        if !(1.0..=p).contains(&q) {
            return invalid(format!("moment {q} outside [1, {p}]"));
        }
        best = best.max(empirical_lq(samples, q)? / q.sqrt());
    }
    Ok(NormReport::empirical(best, samples.len()))
}

/// Empirical M_ℓ: the largest top-ℓ ℓ₂ norm over the rows.
pub fn m_ell_estimate(x: &SampleMatrix, ell: usize) -> Result<NormReport> {
    if ell == 0 || ell > x.n_cols {
        return Err(Error::OutOfRange {
            index: ell,
            max: x.n_cols,
        });
    }
    let mut best = 0.0f64;
    for row in x.rows() {
        best = best.max(top_k_l2(row, ell)?);
    }
    Ok(NormReport::empirical(best, x.n_rows))
}

/// All M_ℓ for ℓ = 1..=n in one pass; entry ℓ−1 holds M_ℓ.
pub fn m_ell_profile(x: &SampleMatrix) -> Vec<f64> {
    let mut best = vec![0.0f64; x.n_cols];
    for row in x.rows() {
        let pre = sorted_square_prefix(row);
        for (b, s) in best.iter_mut().zip(&pre[1..]) {
            *b = b.max(s.sqrt());
        }
    }
    best
}

/// κ₁n^{1/p}ℓ^{1/2−1/p}: by Hölder, a bound on M_ℓ for laws supported in
/// κ₁n^{1/p}B_pⁿ (constant 1).
pub fn m_ell_ceiling(kappa1: f64, n: usize, p: f64, ell: usize) -> NormReport {
    NormReport::analytic(kappa1 * (n as f64).powf(1.0 / p) * (ell as f64).powf(0.5 - 1.0 / p))
}

/// p‖t‖_∞ + √p (Σ_{i>⌊p⌋} (t_i²)*)^{1/2}, the order of the L_p norm of
/// ⟨t, X⟩ under the isotropic uniform law on B₁ⁿ.
pub fn l1ball_moment_formula(t: &[f64], p: f64) -> Result<f64> {
    let n = t.len();
    if !(p >= 1.0 && p <= n as f64) {
        return invalid(format!("p = {p} outside [1, {n}]"));
    }
    let pre = sorted_square_prefix(t);
    let head = p.floor() as usize;
    let tail = (pre[n] - pre[head]).max(0.0).sqrt();
    Ok(p * lp_norm(t, f64::INFINITY) + p.sqrt() * tail)
}
