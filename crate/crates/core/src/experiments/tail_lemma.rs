//! Empirical failure rate of the tail-selector bound: for N i.i.d. draws,
//! the squares ranked uℓ+1..k must stay below f_u(k)² for every k.

use crate::chaining::tail::{tail_lemma_bound, tail_lemma_thresholds, tail_lemma_trial, TailSource};
use crate::error::{Error, Result};
use crate::experiments::{cell_stream, ExperimentConfig, SweepResult};
use crate::par::map_indexed;
use crate::seed::trial_seed;

pub const STATS: [&str; 2] = ["worst_ratio", "violated"];

pub const DEFAULT_ELL: usize = 10;
pub const DEFAULT_EPS: f64 = 1.0;

/// Closed-form quantiles when the law has them, else the moment source
/// built from ‖ξ‖_q.
pub fn tail_source_for(cfg: &ExperimentConfig) -> Result<TailSource> {
    let spec = &cfg.distribution;
    if spec.truncation().is_some() || !spec.kind.is_scalar() {
        return Err(Error::Unsupported("tail lemma needs an untruncated scalar law".into()));
    }
    if let Some(src) = TailSource::from_spec(spec) {
        return Ok(src);
    }
    let q = cfg
        .q()
        .ok_or_else(|| Error::InvalidParameter("no quantile source: set a moment order q".into()))?;
    let norm = spec
        .coordinate_lr_norm(q)
        .ok_or_else(|| Error::InvalidParameter(format!("‖ξ‖_{q} is not known for {:?}", spec.kind)))?;
    Ok(TailSource::Lq { norm, q })
}

/// Grid: `grids.big_n`, with ℓ = `params.ell` (default 10), ε = `params.eps`
/// (default 1), u and κ₃ from params.
///
/// Per trial: the largest ratio of the tail sum to f_u(k)² over k > uℓ and
/// whether it exceeds 1. Fitted per cell: the failure rate and the bound
/// 2exp(−uεℓ·log(eN/ℓ)).
pub fn run_tail_lemma(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let src = tail_source_for(cfg)?;
    let ell = cfg.params.ell.unwrap_or(DEFAULT_ELL);
    let eps = cfg.params.eps.unwrap_or(DEFAULT_EPS);
    let (u, kappa3) = (cfg.params.u, cfg.params.kappa3);
    let mut out = SweepResult::new(cfg, &["big_n", "ell", "u", "eps", "kappa3"], &STATS);
    for &big_n in &cfg.grids.big_n {
        if ell == 0 || ell > big_n {
            return Err(Error::OutOfRange { index: ell, max: big_n });
        }
        let f2 = tail_lemma_thresholds(&src, big_n, u, eps, kappa3)?;
        let start = ((u * ell as f64).floor() as usize).min(big_n);
        let params = vec![big_n as f64, ell as f64, u, eps, kappa3];
        let stream = cell_stream(&params);
        let trials = map_indexed(cfg.trials, |t| -> Result<Vec<f64>> {
            let w = tail_lemma_trial(&cfg.distribution, &f2, start, trial_seed(cfg.seed, stream, t as u64))?;
            Ok(vec![w, f64::from(u8::from(w > 1.0 + 1e-12))])
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let cell = out.push_cell(params, trials);
        let rate = out.summary(cell, "violated").map_or(f64::NAN, |s| s.mean);
        out.fit("failure_rate", "fraction of trials with a violated k", Some(cell), rate);
        out.fit(
            "bound",
            "2exp(−uεℓ·log(eN/ℓ)) with unit constant",
            Some(cell),
            tail_lemma_bound(big_n, ell, u, eps),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;
    use crate::samplers::DistributionSpec;

    #[test]
    fn laplace_small_run() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::TailLemma, DistributionSpec::laplace(), 50, 2);
        cfg.grids.big_n = vec![200];
        cfg.params.u = 4.0;
        let r = run_tail_lemma(&cfg).unwrap();
        assert_eq!(r.records.len(), 50);
        assert!(r.fitted_value("failure_rate", Some(0)).unwrap() <= 0.1);
    }

    #[test]
    fn heavy_law_uses_moment_source() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::TailLemma, DistributionSpec::student_t(6.0, 8.0), 5, 2);
        cfg.distribution.standardized = false;
        assert!(matches!(tail_source_for(&cfg).unwrap(), TailSource::Lq { .. }));
        cfg.distribution = DistributionSpec::coordinate();
        assert!(tail_source_for(&cfg).is_err());
    }
}
