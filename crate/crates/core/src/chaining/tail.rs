//! Levels s₀ and ℓ_s, tail quantiles y_j at levels δ_j = (j/eN)^{1+ε}, and
//! the quantile functionals f_u / F_u that bound the small coordinates of
//! a sample.

use serde::{Deserialize, Serialize};
use statrs::function::beta::inv_beta_reg;
use statrs::function::erf::erfc_inv;

use crate::chaining::eta::EtaSequence;
use crate::error::{invalid, Error, Result};
use crate::norms::order_stats_desc;
use crate::par::map_indexed;
use crate::samplers::{sample_scalar, DistributionKind, DistributionSpec};

/// ln(eN).
pub fn log_en(big_n: usize) -> f64 {
    1.0 + (big_n as f64).ln()
}

/// ℓ for one schedule value: 1 below ln(eN), else the largest ℓ ≤ N with
/// ℓ·ln(eN/ℓ) ≤ η (that map is increasing on [1, N]).
pub fn ell_for(eta: f64, big_n: usize) -> usize {
    let tol = |x: f64| x * (1.0 + 1e-12);
    if eta < log_en(big_n) {
        return 1;
    }
    let nf = big_n as f64;
    let mut best = 1;
    for l in 1..=big_n {
        let lf = l as f64;
        if lf * (std::f64::consts::E * nf / lf).ln() <= tol(eta) {
            best = l;
        } else {
            break;
        }
    }
    best
}

/// s₀ = first s with η_s ≥ ln(eN) (may lie past the stored values; the
/// schedule formula is used there) and ℓ_s for every stored level.
pub fn s0_and_ells(eta: &EtaSequence, big_n: usize) -> (usize, Vec<usize>) {
    let le = log_en(big_n);
    let s0 = (0..).find(|&s| eta.value(s) >= le).expect("schedules are unbounded");
    let ells = (0..eta.len()).map(|s| ell_for(eta.values[s], big_n)).collect();
    (s0, ells)
}

/// δ_j = (j/eN)^{1+ε}.
pub fn delta_j(j: usize, big_n: usize, eps: f64) -> f64 {
    (j as f64 / (std::f64::consts::E * big_n as f64)).powf(1.0 + eps)
}

/// Where tail probabilities come from. Scalar laws are taken standardized
/// (variance 1); `scale` multiplies the unit-variance Student-t and Pareto
/// draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailSource {
    /// Pr(|Y| ≥ y) = exp(−√2 y).
    Laplace,
    Gaussian,
    Rademacher,
    StudentT { nu: f64, scale: f64 },
    SymPareto { tail_index: f64, scale: f64 },
    /// Moment bound: y_j = ‖Y‖_q (N/j)^{(1+ε)/q}.
    Lq { norm: f64, q: f64 },
    /// Orlicz bound: Pr(|Y| ≥ t) ≤ 2exp(−(t/‖Y‖_ψβ)^β).
    PsiBeta { norm: f64, beta: f64 },
    /// Empirical quantiles of the stored sample.
    Empirical { samples: Vec<f64> },
}

impl TailSource {
    /// Closed-form tail of a standardized scalar law, if there is one.
    pub fn from_spec(spec: &DistributionSpec) -> Option<Self> {
        if spec.truncation().is_some() || !spec.standardized {
            return None;
        }
        Some(match spec.kind {
            DistributionKind::Gaussian => Self::Gaussian,
            DistributionKind::Rademacher => Self::Rademacher,
            DistributionKind::LaplaceExponential => Self::Laplace,
            DistributionKind::StudentT => {
                let nu = spec.shape()?;
                Self::StudentT {
                    nu,
                    scale: ((nu - 2.0) / nu).sqrt(),
                }
            }
            DistributionKind::SymPareto => {
                let a = spec.shape()?;
                Self::SymPareto {
                    tail_index: a,
                    scale: ((a - 2.0) / a).sqrt(),
                }
            }
            _ => return None,
        })
    }

    /// Empirical source; the sample is stored sorted by decreasing |value|.
    pub fn empirical(samples: &[f64]) -> Self {
        Self::Empirical {
            samples: order_stats_desc(samples),
        }
    }

    /// inf{y : Pr(|Y| ≥ y) ≤ δ}.
    pub fn quantile(&self, delta: f64) -> Result<f64> {
        if delta.is_nan() || delta <= 0.0 {
            return invalid(format!("tail level must be positive, got {delta}"));
        }
        if delta >= 1.0 {
            return Ok(0.0);
        }
        Ok(match self {
            Self::Laplace => -delta.ln() / std::f64::consts::SQRT_2,
            Self::Gaussian => std::f64::consts::SQRT_2 * erfc_inv(delta),
            Self::Rademacher => 1.0,
            Self::StudentT { nu, scale } => {
                // Pr(|T| ≥ t) = I_{ν/(ν+t²)}(ν/2, 1/2)
                let x = inv_beta_reg(nu / 2.0, 0.5, delta);
                scale * (nu * (1.0 - x) / x).sqrt()
            }
            Self::SymPareto { tail_index, scale } => scale * delta.powf(-1.0 / tail_index),
            Self::Lq { .. } => {
                return Err(Error::Unsupported(
                    "moment sources are indexed by j; use tail_quantile_y".into(),
                ))
            }
            Self::PsiBeta { norm, beta } => norm * (2.0 / delta).ln().max(0.0).powf(1.0 / beta),
            Self::Empirical { samples } => {
                let m = samples.len();
                let needed = (10.0 / delta).ceil();
                if (m as f64) < needed {
                    return Err(Error::InsufficientSamples {
                        needed: needed as usize,
                        have: m,
                    });
                }
                let r = (delta * m as f64).floor() as usize;
                samples[r.min(m - 1)]
            }
        })
    }
}

/// y_j for 1 ≤ j ≤ N.
pub fn tail_quantile_y(src: &TailSource, j: usize, big_n: usize, eps: f64) -> Result<f64> {
    if j == 0 || j > big_n {
        return Err(Error::OutOfRange { index: j, max: big_n });
    }
    if eps < 0.0 {
        return invalid(format!("eps must be nonnegative, got {eps}"));
    }
    let delta = delta_j(j, big_n, eps);
    if delta >= 1.0 {
        return Ok(0.0);
    }
    match src {
        TailSource::Lq { norm, q } => Ok(norm * (big_n as f64 / j as f64).powf((1.0 + eps) / q)),
        other => other.quantile(delta),
    }
}

/// y_{2^i} (or z_{2^i}) for every 2^i ≤ N, indexed by i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub dyadic: Vec<f64>,
}

impl QuantileTable {
    pub fn build(src: &TailSource, big_n: usize, eps: f64) -> Result<Self> {
        let mut dyadic = Vec::new();
        let mut j = 1usize;
        while j <= big_n {
            dyadic.push(tail_quantile_y(src, j, big_n, eps)?);
            j <<= 1;
        }
        Ok(Self { dyadic })
    }

    pub fn zeros(big_n: usize) -> Self {
        Self {
            dyadic: vec![0.0; dyadic_len(big_n)],
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dyadic: self.dyadic.iter().map(|y| c * y).collect(),
        }
    }

    /// Class-uniform quantiles z_j = max over members of y_j.
    pub fn pointwise_max<'a>(tables: impl IntoIterator<Item = &'a QuantileTable>) -> Self {
        let mut dyadic: Vec<f64> = Vec::new();
        for t in tables {
            if dyadic.len() < t.dyadic.len() {
                dyadic.resize(t.dyadic.len(), 0.0);
            }
            for (d, y) in dyadic.iter_mut().zip(&t.dyadic) {
                *d = d.max(*y);
            }
        }
        Self { dyadic }
    }
}

fn dyadic_len(big_n: usize) -> usize {
    (usize::BITS - big_n.leading_zeros()) as usize
}

/// κ₃√u (Σ_{j ≥ 0 : 2^j ≤ ⌈k/u⌉} 2^j q²_{2^j})^{1/2}. With a per-function
/// table this is f_u(·, k); with the class-uniform table it is F_u(k).
pub fn tail_functional(k: usize, u: f64, table: &QuantileTable, kappa3: f64) -> Result<f64> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if u.is_nan() || u < 1.0 {
        return invalid(format!("u must be at least 1, got {u}"));
    }
    let top = (k as f64 / u).ceil() as usize;
    let mut acc = 0.0;
    let mut j = 0usize;
    while (1usize << j) <= top {
        let y = *table.dyadic.get(j).ok_or(Error::OutOfRange {
            index: 1 << j,
            max: 1usize << table.dyadic.len().saturating_sub(1),
        })?;
        acc += (1u64 << j) as f64 * y * y;
        j += 1;
    }
    Ok(kappa3 * u.sqrt() * acc.sqrt())
}

/// f_u(·,k)² for k = 1..=N.
pub fn tail_lemma_thresholds(src: &TailSource, big_n: usize, u: f64, eps: f64, kappa3: f64) -> Result<Vec<f64>> {
    let table = QuantileTable::build(src, big_n, eps)?;
    (1..=big_n)
        .map(|k| tail_functional(k, u, &table, kappa3).map(|f| f * f))
        .collect()
}

/// One draw of N = `f2.len()` values: the largest ratio of
/// Σ_{i=start+1}^k (Y_i²)* to f2[k−1] over k > start (0 when start ≥ N).
pub fn tail_lemma_trial(spec: &DistributionSpec, f2: &[f64], start: usize, seed: u64) -> Result<f64> {
    let y = sample_scalar(spec, f2.len(), seed)?;
    let sorted = order_stats_desc(&y);
    let mut acc = 0.0;
    let mut worst = 0.0f64;
    for k in start + 1..=f2.len() {
        acc += sorted[k - 1] * sorted[k - 1];
        worst = worst.max(acc / f2[k - 1]);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailLemmaReport {
    pub failure_rate: f64,
    pub trials: usize,
    /// 2exp(−uεℓ·ln(eN/ℓ)), the probability bound with unit constant.
    pub bound: f64,
}

/// min(2exp(−uεℓ·ln(eN/ℓ)), 1).
pub fn tail_lemma_bound(big_n: usize, ell: usize, u: f64, eps: f64) -> f64 {
    let lf = ell as f64;
    (2.0 * (-u * eps * lf * (std::f64::consts::E * big_n as f64 / lf).ln()).exp()).min(1.0)
}

/// Fraction of trials (N draws each) in which some k > uℓ has
/// Σ_{i=uℓ+1}^k (Y_i²)* > f_u(Y,k)², with quantiles from `src`.
#[allow(clippy::too_many_arguments)]
pub fn check_tail_lemma(
    spec: &DistributionSpec,
    src: &TailSource,
    big_n: usize,
    ell: usize,
    u: f64,
    eps: f64,
    kappa3: f64,
    trials: usize,
    seed: u64,
) -> Result<TailLemmaReport> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    if ell == 0 || ell > big_n {
        return Err(Error::OutOfRange { index: ell, max: big_n });
    }
    let f2 = tail_lemma_thresholds(src, big_n, u, eps, kappa3)?;
    let start = ((u * ell as f64).floor() as usize).min(big_n);
    let worst = map_indexed(trials, |t| {
        tail_lemma_trial(spec, &f2, start, crate::seed::trial_seed(seed, 0, t as u64))
    });
    let mut count = 0;
    for w in worst {
        count += usize::from(w? > 1.0 + 1e-12);
    }
    Ok(TailLemmaReport {
        failure_rate: count as f64 / trials as f64,
        trials,
        bound: tail_lemma_bound(big_n, ell, u, eps),
    })
}
