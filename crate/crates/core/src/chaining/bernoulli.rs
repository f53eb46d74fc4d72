//! Suprema of the Bernoulli process v ↦ |Σ ε_i v_i²| over a finite set.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::par::map_indexed;
use crate::seed::rng_for;

/// Largest N for exhaustive enumeration of sign patterns.
pub const EXHAUSTIVE_MAX_N: usize = 20;

fn squares(v: &[Vec<f64>]) -> Result<(usize, Vec<Vec<f64>>)> {
    let n = v.first().map(Vec::len).ok_or_else(|| Error::InvalidParameter("V is empty".into()))?;
    if let Some(bad) = v.iter().find(|x| x.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    Ok((n, v.iter().map(|x| x.iter().map(|a| a * a).collect()).collect()))
}

fn sup_for(sq: &[Vec<f64>], sign: impl Fn(usize) -> f64) -> f64 {
    sq.iter()
        .map(|w| w.iter().enumerate().map(|(i, x)| sign(i) * x).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// One sup value per trial, with ε drawn from the trial's own stream.
/// `trials = 0` enumerates all 2^N sign patterns instead (pattern m sets
/// ε_i = −1 where bit i of m is set), which needs N ≤ 20.
pub fn bernoulli_sup_mc(v: &[Vec<f64>], trials: usize, seed: u64) -> Result<Vec<f64>> {
    let (n, sq) = squares(v)?;
    if trials == 0 {
        if n > EXHAUSTIVE_MAX_N {
            return invalid(format!("exhaustive mode needs N ≤ {EXHAUSTIVE_MAX_N}, got {n}"));
        }
        return Ok(map_indexed(1usize << n, |m| {
            sup_for(&sq, |i| if m >> i & 1 == 1 { -1.0 } else { 1.0 })
        }));
    }
    Ok(map_indexed(trials, |t| {
        let mut rng = rng_for(seed, 0, t as u64);
        let eps: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        sup_for(&sq, |i| eps[i])
    }))
}
