//! The φ families and the aggregates Φ, Φ_s built from them.

use serde::{Deserialize, Serialize};

use crate::chaining::eta::EtaSequence;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiKind {
    /// √x log^{1/β}(eN/x)
    Beta { beta: f64 },
    /// √x (N/x)^{(1+ε)/q}
    Lq { q: f64, eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiFamily {
    pub kind: PhiKind,
    /// Sample size N; φ lives on [1, N].
    pub n: usize,
}

impl PhiFamily {
    pub fn beta(beta: f64, n: usize) -> Result<Self> {
        let f = Self {
            kind: PhiKind::Beta { beta },
            n,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn lq(q: f64, eps: f64, n: usize) -> Result<Self> {
        let f = Self {
            kind: PhiKind::Lq { q, eps },
            n,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("phi needs N ≥ 1");
        }
        match self.kind {
            PhiKind::Beta { beta } if !(beta > 0.0) => invalid(format!("beta must be positive, got {beta}")),
            PhiKind::Lq { q, .. } if !(q > 2.0) => invalid(format!("q must exceed 2, got {q}")),
            PhiKind::Lq { q, eps } if !(eps >= 0.0 && eps < q / 2.0 - 1.0) => {
                invalid(format!("eps = {eps} outside [0, q/2 − 1 = {})", q / 2.0 - 1.0))
            }
            _ => Ok(()),
        }
    }

    /// φ(x) with unit constant; x must lie in [1, N].
    pub fn eval(&self, x: f64) -> Result<f64> {
        let n = self.n as f64;
        if !(x >= 1.0 && x <= n * (1.0 + 1e-12)) {
            return invalid(format!("phi argument {x} outside [1, {n}]"));
        }
        Ok(self.eval_unchecked(x.min(n)))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        let n = self.n as f64;
        match self.kind {
            PhiKind::Beta { beta } => x.sqrt() * (std::f64::consts::E * n / x).ln().powf(1.0 / beta),
            PhiKind::Lq { q, eps } => x.sqrt() * (n / x).powf((1.0 + eps) / q),
        }
    }

    /// φ at an integer in 1..=N.
    pub fn at(&self, k: usize) -> f64 {
        self.eval_unchecked(k as f64)
    }
}

pub fn phi_eval(f: &PhiFamily, x: f64) -> Result<f64> {
    f.eval(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiAggregates {
    /// (Σ_{i≤N} φ⁴(i)/i²)^{1/2}
    pub big_phi: f64,
    /// Φ_s for each level with η_s ≤ N, None otherwise.
    pub per_level: Vec<Option<f64>>,
}

/// Φ and Φ_s = (Σ_{i=1}^{N−⌈η_s⌉} φ²(η_s+i)/(η_s+i) · φ²(i)/i)^{1/2} by
/// direct summation.
pub fn phi_aggregates(f: &PhiFamily, eta: &EtaSequence) -> PhiAggregates {
    let n = f.n;
    let sq_over: Vec<f64> = (1..=n).map(|i| f.at(i).powi(2) / i as f64).collect();
    let big_phi = sq_over.iter().map(|v| v * v).sum::<f64>().sqrt();
    let per_level = eta
        .values
        .iter()
        .map(|&e| {
            if e > n as f64 {
                return None;
            }
            let upper = n - (e.ceil() as usize).min(n);
            let s: f64 = (1..=upper)
                .map(|i| {
                    let x = e + i as f64;
                    f.eval_unchecked(x).powi(2) / x * sq_over[i - 1]
                })
                .sum();
            Some(s.sqrt())
        })
        .collect();
    PhiAggregates { big_phi, per_level }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaining::eta::{make_eta, EtaKind};

    #[test]
    fn value_at_n_is_root_n() {
        for beta in [0.5, 1.0, 2.0, 7.0] {
            let f = PhiFamily::beta(beta, 100).unwrap();
            assert!((f.eval(100.0).unwrap() - 10.0).abs() < 1e-12);
        }
        let f = PhiFamily::lq(6.0, 0.5, 49).unwrap();
        assert!((f.eval(49.0).unwrap() - 7.0).abs() < 1e-12);
        let f = PhiFamily::beta(1.0, 1).unwrap();
        assert_eq!(f.eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn domain_and_family_checks() {
        let f = PhiFamily::beta(1.0, 10).unwrap();
        assert!(f.eval(0.5).is_err());
        assert!(f.eval(11.0).is_err());
        assert!(PhiFamily::lq(2.0, 0.0, 5).is_err());
        assert!(PhiFamily::lq(4.0, 1.0, 5).is_err());
        assert!(PhiFamily::beta(0.0, 5).is_err());
    }

    #[test]
    fn big_phi_bound_lq() {
        let f = PhiFamily::lq(8.0, 0.0, 256).unwrap();
        let eta = make_eta(EtaKind::Standard, 256.0).unwrap();
        let agg = phi_aggregates(&f, &eta);
        assert!(agg.big_phi <= 2f64.sqrt() * 16.0, "{}", agg.big_phi);
        // Φ_0 with η₀ = 0 is Φ itself
        assert!((agg.per_level[0].unwrap() - agg.big_phi).abs() < 1e-9 * agg.big_phi);
        for p in agg.per_level.iter().flatten() {
            assert!(*p <= agg.big_phi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn single_point_phi() {
        let f = PhiFamily::lq(6.0, 0.0, 1).unwrap();
        let eta = make_eta(EtaKind::Standard, 4.0).unwrap();
        let agg = phi_aggregates(&f, &eta);
        assert_eq!(agg.big_phi, 1.0);
    }
}
