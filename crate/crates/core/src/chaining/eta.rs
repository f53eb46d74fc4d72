//! Increasing schedules (η_s) controlling the level cardinalities 2^{η_s}.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaKind {
    /// η₀ = 0, η_s = 2^s.
    Standard,
    /// η_s = κ₄ 2^{s+s₁} max{log(en/2^{s+s₁}), 1}.
    Ball { n: usize, s1: u32, kappa4: f64 },
}

impl EtaKind {
    pub fn value(&self, s: usize) -> f64 {
        match *self {
            EtaKind::Standard => {
                if s == 0 {
                    0.0
                } else {
                    2f64.powi(s as i32)
                }
            }
            EtaKind::Ball { n, s1, kappa4 } => {
                let k = 2f64.powi(s as i32 + s1 as i32);
                let l = (std::f64::consts::E * n as f64 / k).ln().max(1.0);
                kappa4 * k * l
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaSequence {
    pub values: Vec<f64>,
    pub kind: EtaKind,
}

/// Largest η ratio allowed between consecutive levels.
pub const MAX_RATIO: f64 = 10.0;
pub const MIN_RATIO: f64 = 1.1;

impl EtaSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// η_s, computed from the formula beyond the stored levels.
    pub fn value(&self, s: usize) -> f64 {
        self.values.get(s).copied().unwrap_or_else(|| self.kind.value(s))
    }

    /// ⌊2^{η_s}⌋ as a level cardinality budget (saturating).
    pub fn budget(&self, s: usize) -> usize {
        let e = self.value(s);
        if e >= (usize::BITS - 1) as f64 {
            usize::MAX
        } else {
            2f64.powf(e).floor() as usize
        }
    }

    /// Appends formula values until there are at least `len` levels.
    pub fn extend_to(&mut self, len: usize) {
        while self.values.len() < len {
            let s = self.values.len();
            self.values.push(self.kind.value(s));
        }
    }

    pub fn is_standard(&self) -> bool {
        self.kind == EtaKind::Standard
    }

    /// First s with 1.1 ≤ η_{s+1}/η_s ≤ 10 failing (s ≥ 1), or with the
    /// sequence decreasing.
    pub fn ratio_violation(&self) -> Option<(usize, String)> {
        for s in 0..self.values.len().saturating_sub(1) {
            let (a, b) = (self.values[s], self.values[s + 1]);
            if b < a {
                return Some((s, format!("η_{} = {b} < η_{s} = {a}", s + 1)));
            }
            if s >= 1 {
                let r = b / a;
                if !(MIN_RATIO..=MAX_RATIO).contains(&r) {
                    return Some((s, format!("ratio η_{}/η_{s} = {r:.4} outside [1.1, 10]", s + 1)));
                }
            }
        }
        None
    }

    /// Levels s with η_s + η_{s+1} > log₂10 + η_{s+2}, i.e. where
    /// 2^{η_s}·2^{η_{s+1}} ≤ 10·2^{η_{s+2}} fails.
    pub fn growth_violations(&self) -> Vec<usize> {
        let l = 10f64.log2();
        (0..self.values.len().saturating_sub(2))
            .filter(|&s| self.values[s] + self.values[s + 1] > l + self.values[s + 2] * (1.0 + 1e-12))
            .collect()
    }

    /// Both schedule constraints; the product-growth one is enforced for the
    /// standard kind only (see `make_eta`).
    pub fn validate(&self) -> Result<()> {
        if let Some((s, detail)) = self.ratio_violation() {
            return Err(Error::EtaInvariant { s, detail });
        }
        if self.is_standard() {
            if let Some(&s) = self.growth_violations().first() {
                return Err(Error::EtaInvariant {
                    s,
                    detail: "2^{η_s}·2^{η_{s+1}} > 10·2^{η_{s+2}}".into(),
                });
            }
        }
        Ok(())
    }
}

/// Builds a schedule whose last value is the first one exceeding `cap`.
///
/// The ball formula grows only linearly up to logarithms, so the product
/// constraint 2^{η_s}2^{η_{s+1}} ≤ 10·2^{η_{s+2}} cannot hold for it at
/// κ₄ ≥ 10; for that kind it is reported by `growth_violations` rather than
/// refused.
pub fn make_eta(kind: EtaKind, cap: f64) -> Result<EtaSequence> {
    if let EtaKind::Ball { n, s1, kappa4 } = kind {
        if n < 2 {
            return invalid(format!("ball schedule needs n ≥ 2, got {n}"));
        }
        if kappa4 < 10.0 {
            return invalid(format!("ball schedule needs kappa4 ≥ 10, got {kappa4}"));
        }
        if 2f64.powi(s1 as i32) > n as f64 {
            return invalid(format!("2^s1 = {} exceeds n = {n}", 2u64.pow(s1)));
        }
    }
    if !cap.is_finite() {
        return invalid("schedule cap must be finite");
    }
    let mut values = Vec::new();
    let mut s = 0;
    loop {
        let v = kind.value(s);
        values.push(v);
        if v > cap && values.len() >= 2 {
            break;
        }
        s += 1;
    }
    let eta = EtaSequence { values, kind };
    eta.validate()?;
    Ok(eta)
}

/// Default cap: first η_s above max(N, 2n).
pub fn default_cap(big_n: usize, n: usize) -> f64 {
    big_n.max(2 * n) as f64
}

/// The exponent δ with 2^{s₁} = n^δ.
pub fn ball_delta(n: usize, s1: u32) -> f64 {
    s1 as f64 * 2f64.ln() / (n as f64).ln()
}
