//! The three sample events controlling large coordinates (Ω₁), small
//! coordinates above s₀ (Ω₂) and increments below s₀ (Ω₃), and the bounds
//! they imply for every subset of the sample.

use serde::{Deserialize, Serialize};

use crate::chaining::admissible::AdmissibleSequence;
use crate::chaining::decomposition::{Checker, OmegaReport};
use crate::chaining::eta::EtaSequence;
use crate::chaining::tail::{ell_for, log_en, s0_and_ells, tail_functional, QuantileTable};
use crate::error::{invalid, Error, Result};
use crate::norms::sorted_square_prefix;
use crate::samplers::SampleMatrix;

/// Values of h and of each chain point π_s h on the N sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainEvaluation {
    pub big_n: usize,
    /// full[h][i] = h(X_i).
    pub full: Vec<Vec<f64>>,
    /// pi[h][s][i] = (π_s h)(X_i).
    pub pi: Vec<Vec<Vec<f64>>>,
}

impl ChainEvaluation {
    /// Linear class h_t = ⟨·, t⟩ over the points of an admissible sequence.
    pub fn linear(x: &SampleMatrix, a: &AdmissibleSequence) -> Result<Self> {
        if a.dim() != x.n_cols {
            return Err(Error::DimensionMismatch {
                expected: x.n_cols,
                got: a.dim(),
            });
        }
        let full = a.points.iter().map(|t| x.project(t)).collect();
        // project each distinct center once per level
        let mut pi = vec![Vec::with_capacity(a.len()); a.points.len()];
        for level in &a.levels {
            let proj: Vec<Vec<f64>> = level.centers.iter().map(|c| x.project(c)).collect();
            for (h, &c) in level.assign.iter().enumerate() {
                pi[h].push(proj[c].clone());
            }
        }
        Ok(Self {
            big_n: x.n_rows,
            full,
            pi,
        })
    }

    pub fn from_values(full: Vec<Vec<f64>>, pi: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let big_n = full.first().map_or(0, Vec::len);
        if big_n == 0 || pi.len() != full.len() {
            return invalid("need at least one function on a nonempty sample");
        }
        let levels = pi[0].len();
        if levels == 0 {
            return invalid("need at least one level");
        }
        for (f, p) in full.iter().zip(&pi) {
            if f.len() != big_n || p.len() != levels || p.iter().any(|v| v.len() != big_n) {
                return invalid("ragged evaluation table");
            }
        }
        Ok(Self { big_n, full, pi })
    }

    pub fn functions(&self) -> usize {
        self.full.len()
    }

    pub fn levels(&self) -> usize {
        self.pi.first().map_or(0, Vec::len)
    }

    /// π_s h; levels past the last stored one repeat it.
    pub fn pi_at(&self, h: usize, s: usize) -> &[f64] {
        let l = self.pi[h].len() - 1;
        &self.pi[h][s.min(l)]
    }

    /// Δ_s h = π_s h − π_{s−1} h, with Δ₀ h = π₀ h.
    pub fn increment(&self, h: usize, s: usize) -> Vec<f64> {
        let cur = self.pi_at(h, s);
        if s == 0 {
            return cur.to_vec();
        }
        let prev = self.pi_at(h, s - 1);
        cur.iter().zip(prev).map(|(a, b)| a - b).collect()
    }
}

/// θ_{u,s}(Δ_s h) per function and level, and θ_{u,s₀}(π_{s₀} h).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTable {
    pub increments: Vec<Vec<f64>>,
    pub base: Vec<f64>,
}

/// Per-function quantile tables for each increment Δ_s h, and the
/// class-uniform table for F_u.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTables {
    pub increments: Vec<Vec<QuantileTable>>,
    pub class: QuantileTable,
}

impl QuantileTables {
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            increments: self
                .increments
                .iter()
                .map(|row| row.iter().map(|t| t.scaled(c)).collect())
                .collect(),
            class: self.class.scaled(c),
        }
    }
}

/// Event parameters: the schedule, u and κ₃.
#[derive(Debug, Clone, PartialEq)]
pub struct EventParams<'a> {
    pub eta: &'a EtaSequence,
    pub u: f64,
    pub kappa3: f64,
}

fn top_sums(v: &[f64]) -> Vec<f64> {
    sorted_square_prefix(v)
}

fn rank(u: f64, ell: usize, big_n: usize) -> usize {
    ((u * ell as f64).floor() as usize).min(big_n)
}

fn check_theta(ev: &ChainEvaluation, theta: &ThetaTable, levels: usize) -> Result<()> {
    if theta.increments.len() != ev.functions() || theta.base.len() != ev.functions() {
        return Err(Error::DimensionMismatch {
            expected: ev.functions(),
            got: theta.increments.len().min(theta.base.len()),
        });
    }
    if let Some(row) = theta.increments.iter().find(|r| r.len() < levels) {
        return Err(Error::OutOfRange {
            index: levels - 1,
            max: row.len().saturating_sub(1),
        });
    }
    Ok(())
}

fn check_tables(ev: &ChainEvaluation, q: &QuantileTables, levels: usize) -> Result<()> {
    if q.increments.len() != ev.functions() || q.increments.iter().any(|r| r.len() < levels) {
        return invalid("quantile tables must cover every function and level");
    }
    Ok(())
}

/// Ω₁: for log(eN) ≤ η_s ≤ N, the top u·ℓ_{s+1} (capped at N) squares of
/// Δ_s h sum to at most θ²; for η_s > N all N squares do (condition 2);
/// and the top u·ℓ_{s₀+1} squares of π_{s₀}h are bounded by the base θ
/// (condition 3).
pub fn check_omega1(ev: &ChainEvaluation, p: &EventParams, theta: &ThetaTable) -> Result<OmegaReport> {
    let big_n = ev.big_n;
    let levels = ev.levels().min(p.eta.len());
    check_theta(ev, theta, levels)?;
    let le = log_en(big_n);
    let nf = big_n as f64;
    let (s0, _) = s0_and_ells(p.eta, big_n);
    let mut c = Checker::new(levels, 3);
    for h in 0..ev.functions() {
        for s in 0..levels {
            let e = p.eta.value(s);
            if e < le {
                continue;
            }
            let pre = top_sums(&ev.increment(h, s));
            if e <= nf {
                let k = rank(p.u, ell_for(p.eta.value(s + 1), big_n), big_n);
                c.check(1, Some(s), h, Some(k), pre[k].sqrt(), theta.increments[h][s]);
            } else {
                c.check(2, Some(s), h, Some(big_n), pre[big_n].sqrt(), theta.increments[h][s]);
            }
        }
        let k = rank(p.u, ell_for(p.eta.value(s0 + 1), big_n), big_n);
        let pre = top_sums(ev.pi_at(h, s0));
        c.check(3, Some(s0.min(levels.saturating_sub(1))), h, Some(k), pre[k].sqrt(), theta.base[h]);
    }
    Ok(c.finish())
}

/// Ω₂: for s ≥ s₀ and j > u·ℓ_s, the squares ranked u·ℓ_s+1..j of Δ_s h
/// are bounded by f_u(Δ_s h, j)² (condition 1) and those of π_s h by
/// F_u(j)² (condition 2).
pub fn check_omega2(ev: &ChainEvaluation, p: &EventParams, q: &QuantileTables) -> Result<OmegaReport> {
    let big_n = ev.big_n;
    let levels = ev.levels().min(p.eta.len());
    check_tables(ev, q, levels)?;
    let (s0, ells) = s0_and_ells(p.eta, big_n);
    let big_f: Vec<f64> = (1..=big_n)
        .map(|j| tail_functional(j, p.u, &q.class, p.kappa3))
        .collect::<Result<_>>()?;
    let mut c = Checker::new(levels, 2);
    for h in 0..ev.functions() {
        for s in s0..levels {
            let start = rank(p.u, ells[s], big_n);
            if start >= big_n {
                continue;
            }
            let inc = top_sums(&ev.increment(h, s));
            let pis = top_sums(ev.pi_at(h, s));
            for j in start + 1..=big_n {
                let f = tail_functional(j, p.u, &q.increments[h][s], p.kappa3)?;
                c.check(1, Some(s), h, Some(j), (inc[j] - inc[start]).max(0.0).sqrt(), f);
                c.check(2, Some(s), h, Some(j), (pis[j] - pis[start]).max(0.0).sqrt(), big_f[j - 1]);
            }
        }
    }
    Ok(c.finish())
}

/// Ω₃ (only when η₀ < log(eN)): for s < s₀ and every j, the top j squares
/// of Δ_s h are bounded by f_u(Δ_s h, j)² and those of π_{s₀}h by F_u(j)².
pub fn check_omega3(ev: &ChainEvaluation, p: &EventParams, q: &QuantileTables) -> Result<OmegaReport> {
    let big_n = ev.big_n;
    let levels = ev.levels().min(p.eta.len());
    check_tables(ev, q, levels)?;
    let mut c = Checker::new(levels, 2);
    if p.eta.value(0) >= log_en(big_n) {
        return Ok(c.finish());
    }
    let (s0, _) = s0_and_ells(p.eta, big_n);
    for h in 0..ev.functions() {
        let base = top_sums(ev.pi_at(h, s0));
        for s in 0..s0.min(levels) {
            let inc = top_sums(&ev.increment(h, s));
            for j in 1..=big_n {
                let f = tail_functional(j, p.u, &q.increments[h][s], p.kappa3)?;
                c.check(1, Some(s), h, Some(j), inc[j].sqrt(), f);
            }
        }
        for j in 1..=big_n {
            let f = tail_functional(j, p.u, &q.class, p.kappa3)?;
            c.check(2, None, h, Some(j), base[j].sqrt(), f);
        }
    }
    Ok(c.finish())
}

/// Both versions of the subset bounds that hold on the good event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodEventReport {
    /// Increments: ≤ θ + f_u(Δ_s h, k) when η_s ≤ N, ≤ θ otherwise, with
    /// θ = 0 below s₀.
    pub increments: OmegaReport,
    /// Whole functions against γ_u + Σ_{2^i ≤ k} F_u(min(u2^i, N)) + R.
    pub functions: OmegaReport,
    /// Same with the base term θ_{u,s₀}(π_{s₀}h) folded into γ instead.
    pub functions_base_in_gamma: OmegaReport,
    pub gamma_u: f64,
    pub gamma_u_with_base: f64,
}

/// Checks both subset bounds for every function and every k = 1..N. The
/// worst subset of size k is the top k coordinates, so this covers all I.
pub fn check_good_event_conclusions(
    ev: &ChainEvaluation,
    p: &EventParams,
    theta: &ThetaTable,
    q: &QuantileTables,
) -> Result<GoodEventReport> {
    let big_n = ev.big_n;
    let levels = ev.levels().min(p.eta.len());
    check_theta(ev, theta, levels)?;
    check_tables(ev, q, levels)?;
    let (s0, _) = s0_and_ells(p.eta, big_n);
    let nf = big_n as f64;
    let th = |h: usize, s: usize| if s < s0 { 0.0 } else { theta.increments[h][s] };

    let mut inc_c = Checker::new(levels, 2);
    for h in 0..ev.functions() {
        for s in 0..levels {
            let pre = top_sums(&ev.increment(h, s));
            for k in 1..=big_n {
                if p.eta.value(s) <= nf {
                    let f = tail_functional(k, p.u, &q.increments[h][s], p.kappa3)?;
                    inc_c.check(1, Some(s), h, Some(k), pre[k].sqrt(), th(h, s) + f);
                } else {
                    inc_c.check(2, Some(s), h, Some(k), pre[k].sqrt(), th(h, s));
                }
            }
        }
    }

    let gamma_u = (0..ev.functions())
        .map(|h| (s0 + 1..levels).map(|s| th(h, s)).sum::<f64>())
        .fold(0.0, f64::max);
    let gamma_u_with_base = (0..ev.functions())
        .map(|h| (s0 + 1..levels).map(|s| th(h, s)).sum::<f64>() + theta.base[h])
        .fold(0.0, f64::max);
    // Σ_{i : 2^i ≤ k} F_u(min(u2^i, N)), cumulative in k
    let mut dyadic_f = vec![0.0; big_n + 1];
    {
        let mut i = 0;
        let mut acc = 0.0;
        let mut next = 1usize;
        for k in 1..=big_n {
            while next <= k {
                let arg = ((p.u * (1u64 << i) as f64).floor() as usize).clamp(1, big_n);
                acc += tail_functional(arg, p.u, &q.class, p.kappa3)?;
                i += 1;
                next <<= 1;
            }
            dyadic_f[k] = acc;
        }
    }
    let mut fn_c = Checker::new(1, 1);
    let mut fn_b = Checker::new(1, 1);
    for h in 0..ev.functions() {
        let pre = top_sums(&ev.full[h]);
        for k in 1..=big_n {
            let rest = if s0 == 0 {
                theta.base[h]
            } else {
                theta.base[h].min(tail_functional(k, p.u, &q.class, p.kappa3)?)
            };
            let lhs = pre[k].sqrt();
            fn_c.check(1, None, h, Some(k), lhs, gamma_u + dyadic_f[k] + rest);
            fn_b.check(1, None, h, Some(k), lhs, gamma_u_with_base + dyadic_f[k]);
        }
    }
    Ok(GoodEventReport {
        increments: inc_c.finish(),
        functions: fn_c.finish(),
        functions_base_in_gamma: fn_b.finish(),
        gamma_u,
        gamma_u_with_base,
    })
}
