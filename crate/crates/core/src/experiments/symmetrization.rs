//! Both sides of the symmetrization inequality
//! β_N(x)·Pr(sup_f |Σ(f(X_i) − Ef)| > x) ≤ 2·Pr(sup_f |Σ ε_i f(X_i)| > x/4)
//! for the class f_t = ⟨·,t⟩² over a finite set of unit directions.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::experiments::theorem_b::family_points;
use crate::experiments::{cell_stream, ExperimentConfig, SetFamily, SweepResult};
use crate::norms::empirical_lq;
use crate::par::map_indexed;
use crate::samplers::{sample_matrix, DistributionSpec, SampleMatrix};
use crate::seed::{mix_seed, rng_from, trial_seed};

pub const STATS: [&str; 6] = ["beta_hat", "p_sup", "lhs", "rhs", "joint_se", "holds"];

pub const DEFAULT_DIRECTIONS: usize = 20;
pub const DEFAULT_MC: usize = 400;
pub const DEFAULT_N: usize = 10;
pub const DEFAULT_BIG_N: usize = 100;
pub const DEFAULT_CALIBRATION: usize = 20_000;
/// Moment order used for the class diameter when the law does not name one.
pub const DEFAULT_Q: f64 = 6.0;

const DIR_STREAM: u64 = 0x6469_7273;
const CAL_STREAM: u64 = 0x6361_6c32;
const BETA_STREAM: u64 = 1;
const SUP_STREAM: u64 = 2;
const SIGN_STREAM: u64 = 3;

/// x at which β_N(x) ≥ 1/2: d²√N for q ≥ 4 and d²N^{2/q} for 2 < q < 4,
/// with unit constants.
pub fn gine_zinn_threshold(q: f64, d: f64, big_n: usize) -> Result<f64> {
    if q <= 2.0 {
        return invalid(format!("threshold needs q > 2, got {q}"));
    }
    let nf = big_n as f64;
    Ok(if q >= 4.0 {
        d * d * nf.sqrt()
    } else {
        d * d * nf.powf(2.0 / q)
    })
}

/// sup_t ‖⟨X,t⟩‖_{L_q} estimated from `rows` fresh rows.
pub fn class_lq_diameter(spec: &DistributionSpec, dirs: &[Vec<f64>], q: f64, rows: usize, seed: u64) -> Result<f64> {
    let n = dirs.first().map_or(1, Vec::len);
    let x = sample_matrix(spec, rows, n, seed)?;
    let mut d = 0.0f64;
    for t in dirs {
        d = d.max(empirical_lq(&x.project(t), q)?);
    }
    Ok(d)
}

/// Per-block centered sums Σ_i (⟨X_i,t⟩² − ‖t‖²), one vector per block of
/// `big_n` rows, optionally multiplied by random signs.
fn block_sums(x: &SampleMatrix, dirs: &[Vec<f64>], big_n: usize, signs: Option<&[f64]>) -> Vec<Vec<f64>> {
    let targets: Vec<f64> = dirs.iter().map(|t| t.iter().map(|v| v * v).sum()).collect();
    (0..x.n_rows / big_n)
        .map(|b| {
            let mut acc = vec![0.0; dirs.len()];
            for i in b * big_n..(b + 1) * big_n {
                let row = x.row(i);
                let e = signs.map_or(1.0, |s| s[i]);
                for (k, t) in dirs.iter().enumerate() {
                    let ip: f64 = row.iter().zip(t).map(|(a, b)| a * b).sum();
                    acc[k] += match signs {
                        Some(_) => e * ip * ip,
                        None => ip * ip - targets[k],
                    };
                }
            }
            acc
        })
        .collect()
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn binom_se(p: f64, m: usize) -> f64 {
    (p * (1.0 - p) / m as f64).sqrt()
}

/// One repetition: three independent batches of `mc` samples of size N
/// estimate β_N(x), the left probability and the signed probability.
#[allow(clippy::too_many_arguments)]
pub fn symmetrization_trial(
    spec: &DistributionSpec,
    dirs: &[Vec<f64>],
    n: usize,
    big_n: usize,
    x_level: f64,
    mc: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let m = mc as f64;
    let xb = sample_matrix(spec, mc * big_n, n, mix_seed(seed, BETA_STREAM))?;
    let sums = block_sums(&xb, dirs, big_n, None);
    let beta = (0..dirs.len())
        .map(|k| sums.iter().filter(|s| s[k].abs() <= x_level / 2.0).count() as f64 / m)
        .fold(1.0, f64::min);
    let xs = sample_matrix(spec, mc * big_n, n, mix_seed(seed, SUP_STREAM))?;
    let p_sup = block_sums(&xs, dirs, big_n, None)
        .iter()
        .filter(|s| sup_abs(s) > x_level)
        .count() as f64
        / m;
    let xr = sample_matrix(spec, mc * big_n, n, mix_seed(seed, SIGN_STREAM))?;
    let mut rng = rng_from(mix_seed(seed, SIGN_STREAM ^ 0xff));
    let eps: Vec<f64> = (0..mc * big_n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let p_r = block_sums(&xr, dirs, big_n, Some(&eps))
        .iter()
        .filter(|s| sup_abs(s) > x_level / 4.0)
        .count() as f64
        / m;
    let lhs = beta * p_sup;
    let rhs = 2.0 * p_r;
    let se = (p_sup.powi(2) * binom_se(beta, mc).powi(2)
        + beta.powi(2) * binom_se(p_sup, mc).powi(2)
        + 4.0 * binom_se(p_r, mc).powi(2))
    .sqrt();
    let holds = if lhs <= rhs + 3.0 * se { 1.0 } else { 0.0 };
    Ok(vec![beta, p_sup, lhs, rhs, se, holds])
}

/// Grid: `grids.big_n` (default 100) at n = `grids.n[0]` (default 10).
///
/// The class is `params.directions` random unit directions (default 20;
/// 0 gives the class {0}), drawn once independently of N. The threshold
/// uses d = sup_t ‖⟨X,t⟩‖_{L_q}, calibrated on `calibration_rows` rows,
/// scaled by `x_factor`. Each trial is one repetition with `mc_trials`
/// samples per probability.
pub fn run_symmetrization(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let spec = &cfg.distribution;
    let n = cfg.grids.n.first().copied().unwrap_or(DEFAULT_N);
    let big_ns = if cfg.grids.big_n.is_empty() {
        vec![DEFAULT_BIG_N]
    } else {
        cfg.grids.big_n.clone()
    };
    let q = cfg.q().unwrap_or(DEFAULT_Q);
    let count = cfg.params.directions.unwrap_or(DEFAULT_DIRECTIONS);
    let dseed = mix_seed(cfg.seed, DIR_STREAM ^ n as u64);
    let dirs = if count == 0 {
        family_points(SetFamily::Zero, n, 1, 1, dseed)?
    } else {
        let mut rng = rng_from(dseed);
        family_points(SetFamily::Sphere, n, count, 1, rng.random())?
    };
    let rows = cfg.params.calibration_rows.unwrap_or(DEFAULT_CALIBRATION);
    let d = class_lq_diameter(spec, &dirs, q, rows, mix_seed(cfg.seed, CAL_STREAM))?;
    let mc = cfg.params.mc_trials.unwrap_or(DEFAULT_MC);
    let mut out = SweepResult::new(cfg, &["n", "big_n", "x"], &STATS);
    out.constant("d_lq", d);
    out.constant("q", q);
    out.constant("threshold_constant", 1.0);
    for big_n in big_ns {
        let x_level = cfg.params.x_factor * gine_zinn_threshold(q, d, big_n)?;
        let params = vec![n as f64, big_n as f64, x_level];
        let stream = cell_stream(&params);
        let trials = map_indexed(cfg.trials, |t| {
            symmetrization_trial(spec, &dirs, n, big_n, x_level, mc, trial_seed(cfg.seed, stream, t as u64))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let cell = out.push_cell(params, trials);
        let held = out.values(cell, "holds").iter().sum::<f64>();
        out.fit("holds_fraction", "fraction of repetitions with lhs ≤ rhs + 3·joint_se", Some(cell), held / cfg.trials as f64);
        let b = out.summary(cell, "beta_hat").map_or(f64::NAN, |s| s.min);
        out.fit("beta_min", "smallest β_N(x) estimate over repetitions", Some(cell), b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;

    #[test]
    fn thresholds() {
        assert_eq!(gine_zinn_threshold(6.0, 2.0, 100).unwrap(), 40.0);
        assert!((gine_zinn_threshold(3.0, 1.0, 1000).unwrap() - 100.0).abs() < 1e-9);
        assert!(gine_zinn_threshold(2.0, 1.0, 10).is_err());
    }

    #[test]
    fn zero_class_both_sides_vanish() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Symmetrization, DistributionSpec::gaussian(), 3, 4);
        cfg.params.directions = Some(0);
        cfg.params.mc_trials = Some(20);
        cfg.params.calibration_rows = Some(100);
        cfg.grids.big_n = vec![10];
        let r = run_symmetrization(&cfg).unwrap();
        assert!(r.values(0, "lhs").iter().all(|&v| v == 0.0));
        assert!(r.values(0, "rhs").iter().all(|&v| v == 0.0));
        assert!(r.values(0, "beta_hat").iter().all(|&v| v == 1.0));
    }

    #[test]
    fn single_gaussian_functional_beta_at_least_half() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Symmetrization, DistributionSpec::gaussian(), 2, 8);
        cfg.params.directions = Some(1);
        cfg.params.mc_trials = Some(400);
        cfg.grids.big_n = vec![100];
        let r = run_symmetrization(&cfg).unwrap();
        assert!(r.values(0, "beta_hat").iter().all(|&b| b >= 0.5));
    }
}
