//! Expected suprema of the exponential (and gaussian) process indexed by a
//! finite T ⊂ Rⁿ, the per-level functional for log-concave increments, and
//! the comparison of γ₁(T, ℓ∞) + γ₂(T, ℓ₂) with E(T).

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::chaining::admissible::{gamma_beta_value, greedy_admissible, standard_eta_for, Metric};
use crate::error::{invalid, Error, Result};
use crate::par::map_indexed;
use crate::seed::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProcessLaw {
    /// Symmetric exponential coordinates with variance 1 (density
    /// ∝ exp(−√2|y|)).
    #[default]
    Exponential,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl MeanEstimate {
    pub fn from_values(v: &[f64]) -> Self {
        let m = v.len() as f64;
        let mean = v.iter().sum::<f64>() / m;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / m).sqrt(),
            trials: v.len(),
        }
    }
}

fn draw(law: ProcessLaw, rng: &mut impl Rng) -> f64 {
    match law {
        ProcessLaw::Exponential => {
            let e: f64 = rng.sample(Exp1);
            if rng.random::<bool>() {
                e * std::f64::consts::FRAC_1_SQRT_2
            } else {
                -e * std::f64::consts::FRAC_1_SQRT_2
            }
        }
        ProcessLaw::Gaussian => rng.sample(StandardNormal),
    }
}

fn check_set(t: &[Vec<f64>]) -> Result<usize> {
    let n = t.first().map(Vec::len).ok_or_else(|| Error::InvalidParameter("T is empty".into()))?;
    if let Some(bad) = t.iter().find(|x| x.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    Ok(n)
}

/// Monte Carlo E sup_{t∈T} ⟨y, t⟩.
pub fn exp_sup_e(t: &[Vec<f64>], trials: usize, seed: u64, law: ProcessLaw) -> Result<MeanEstimate> {
    let n = check_set(t)?;
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    let sups = map_indexed(trials, |k| {
        let mut rng = rng_for(seed, 0, k as u64);
        let y: Vec<f64> = (0..n).map(|_| draw(law, &mut rng)).collect();
        t.iter()
            .map(|v| v.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    });
    Ok(MeanEstimate::from_values(&sups))
}

/// E‖y‖₂ = E sup over the Euclidean unit ball.
pub fn euclidean_ball_e(n: usize, trials: usize, seed: u64, law: ProcessLaw) -> Result<MeanEstimate> {
    if n == 0 || trials == 0 {
        return invalid("n and trials must be at least 1");
    }
    let v = map_indexed(trials, |k| {
        let mut rng = rng_for(seed, 0, k as u64);
        (0..n).map(|_| draw(law, &mut rng).powi(2)).sum::<f64>().sqrt()
    });
    Ok(MeanEstimate::from_values(&v))
}

/// u(2^s‖Δt‖_∞ + 2^{s/2}‖Δt‖₂), unit constant.
pub fn theta_logconcave(s: usize, u: f64, dt: &[f64]) -> f64 {
    let inf = dt.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let l2 = dt.iter().map(|x| x * x).sum::<f64>().sqrt();
    let w = 2f64.powi(s as i32);
    u * (w * inf + w.sqrt() * l2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSandwich {
    pub gamma1_linf: f64,
    pub gamma2_l2: f64,
    pub e: MeanEstimate,
    /// (γ₁ + γ₂)/E(T); None when E(T) is 0 (singletons).
    pub ratio: Option<f64>,
}

/// Greedy upper bounds for γ₁(T, ℓ∞) and γ₂(T, ℓ₂) under the standard
/// schedule against a Monte Carlo E(T). Greedy overestimates γ, so only a
/// lower bound on the ratio is meaningful.
pub fn gamma12_vs_e_check(t: &[Vec<f64>], trials: usize, seed: u64) -> Result<GammaSandwich> {
    check_set(t)?;
    let eta = standard_eta_for(t.len());
    let g1 = gamma_beta_value(&greedy_admissible(t, Metric::LInf, eta.clone())?, 1.0)?;
    let g2 = gamma_beta_value(&greedy_admissible(t, Metric::L2, eta)?, 2.0)?;
    let e = if t.len() == 1 {
        // sup over a singleton is linear in y, so its mean is 0
        MeanEstimate {
            mean: 0.0,
            stderr: 0.0,
            trials: 0,
        }
    } else {
        exp_sup_e(t, trials, seed, ProcessLaw::Exponential)?
    };
    let ratio = (e.mean > 0.0).then(|| (g1 + g2) / e.mean);
    Ok(GammaSandwich {
        gamma1_linf: g1,
        gamma2_l2: g2,
        e,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_set() {
        let e = exp_sup_e(&[vec![0.0; 3]], 100, 1, ProcessLaw::Exponential).unwrap();
        assert_eq!(e.mean, 0.0);
    }

    #[test]
    fn signed_unit_vector() {
        let t = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let e = exp_sup_e(&t, 40_000, 3, ProcessLaw::Exponential).unwrap();
        assert!((e.mean - std::f64::consts::FRAC_1_SQRT_2).abs() <= 3.0 * e.stderr, "{e:?}");
        let g = exp_sup_e(&t, 40_000, 3, ProcessLaw::Gaussian).unwrap();
        let exact = (2.0 / std::f64::consts::PI).sqrt();
        assert!((g.mean - exact).abs() <= 3.0 * g.stderr, "{g:?}");
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_logconcave(3, 2.0, &[0.0; 4]), 0.0);
        assert_eq!(theta_logconcave(0, 1.0, &[1.0, 0.0, 0.0]), 2.0);
        let n = 16;
        let dt = vec![1.0 / (n as f64).sqrt(); n];
        assert!((theta_logconcave(4, 1.0, &dt) - 2.0 * (n as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sandwich_singleton_and_pair() {
        let r = gamma12_vs_e_check(&[vec![1.0, 2.0]], 100, 1).unwrap();
        assert_eq!(r.ratio, None);
        assert_eq!(r.gamma1_linf + r.gamma2_l2, 0.0);
        let r = gamma12_vs_e_check(&[vec![1.0, 0.0], vec![-1.0, 0.0]], 20_000, 1).unwrap();
        // centers restricted to T: d(e₁, −e₁) = 2 under both metrics
        assert_eq!(r.gamma1_linf, 2.0);
        assert_eq!(r.gamma2_l2, 2.0);
        let ratio = r.ratio.unwrap();
        assert!((ratio - 4.0 / std::f64::consts::FRAC_1_SQRT_2).abs() < 0.1, "{ratio}");
    }
}
