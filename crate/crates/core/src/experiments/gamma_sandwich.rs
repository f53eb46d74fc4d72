//! (γ₁(T,ℓ∞) + γ₂(T,ℓ₂))/E(T) over random finite sets T.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::chaining::exponential::gamma12_vs_e_check;
use crate::error::Result;
use crate::experiments::{cell_stream, ExperimentConfig, SweepResult};
use crate::par::map_indexed;
use crate::seed::{mix_seed, rng_from, trial_seed};

pub const STATS: [&str; 4] = ["gamma1_linf", "gamma2_l2", "e", "ratio"];

pub const DEFAULT_DIM: usize = 8;
pub const DEFAULT_POINTS: usize = 10;
pub const DEFAULT_E_TRIALS: usize = 2000;

/// `points` i.i.d. standard gaussian vectors in R^dim.
pub fn random_set(dim: usize, points: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from(seed);
    (0..points)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

/// One cell with `params.dim` × `params.points`; each trial is a fresh
/// gaussian set. The ratio is NaN when E(T) = 0.
pub fn run_gamma_sandwich(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let dim = cfg.params.dim.unwrap_or(DEFAULT_DIM);
    let points = cfg.params.points.unwrap_or(DEFAULT_POINTS);
    let mc = cfg.params.mc_trials.unwrap_or(DEFAULT_E_TRIALS);
    let mut out = SweepResult::new(cfg, &["dim", "points", "set"], &STATS);
    let params = vec![dim as f64, points as f64];
    let stream = cell_stream(&params);
    let trials = map_indexed(cfg.trials, |t| -> Result<Vec<f64>> {
        let seed = trial_seed(cfg.seed, stream, t as u64);
        let set = random_set(dim, points, seed);
        let g = gamma12_vs_e_check(&set, mc, mix_seed(seed, 1))?;
        Ok(vec![g.gamma1_linf, g.gamma2_l2, g.e.mean, g.ratio.unwrap_or(f64::NAN)])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    // one record per set, with the set index as a parameter so plots can
    // spread them out
    let mut cell_params = params.clone();
    cell_params.push(0.0);
    let cell = out.push_cell(cell_params, trials);
    let s = *out.summary(cell, "ratio").expect("stat exists");
    out.fit("ratio_min", "smallest (γ₁+γ₂)/E(T) over sets", Some(cell), s.min);
    out.fit("ratio_max", "largest (γ₁+γ₂)/E(T) over sets", Some(cell), s.max);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;
    use crate::samplers::DistributionSpec;

    #[test]
    fn ratios_are_positive_and_deterministic() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::GammaSandwich, DistributionSpec::gaussian(), 4, 6);
        cfg.params.mc_trials = Some(300);
        let r = run_gamma_sandwich(&cfg).unwrap();
        assert!(r.values(0, "ratio").iter().all(|&v| v > 0.0));
        assert_eq!(r, run_gamma_sandwich(&cfg).unwrap());
    }
}
