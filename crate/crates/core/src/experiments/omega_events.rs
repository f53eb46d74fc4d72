//! Frequency of the good events Ω₁ ∩ Ω₂ ∩ Ω₃ for the ball construction over
//! random directions, and the subset bounds on each resample where they
//! hold.

use rand::Rng;

use crate::chaining::admissible::AdmissibleSequence;
use crate::chaining::ball::{ball_admissible, theta_ball_table, BallParams};
use crate::chaining::eta::default_cap;
use crate::chaining::omega::{
    check_good_event_conclusions, check_omega1, check_omega2, check_omega3, ChainEvaluation, EventParams,
    QuantileTables, ThetaTable,
};
use crate::chaining::tail::{s0_and_ells, QuantileTable, TailSource};
use crate::error::{Error, Result};
use crate::experiments::theorem_b::family_points;
use crate::experiments::{cell_stream, ExperimentConfig, SetFamily, SweepResult};
use crate::norms::empirical_lq;
use crate::par::map_indexed;
use crate::samplers::{calibrate_kappa1, sample_matrix, DistributionSpec, SampleMatrix};
use crate::seed::{mix_seed, rng_from, trial_seed};

pub const STATS: [&str; 6] = [
    "omega1",
    "omega2",
    "omega3",
    "all_hold",
    "conclusions_ok",
    "conclusions_base_in_gamma_ok",
];

pub const DEFAULT_N: usize = 32;
pub const DEFAULT_BIG_N: usize = 128;
pub const DEFAULT_DIRECTIONS: usize = 20;
pub const DEFAULT_S1: u32 = 1;
pub const DEFAULT_EPS: f64 = 0.25;
pub const DEFAULT_Q: f64 = 6.0;
pub const DEFAULT_P: f64 = 3.0;
pub const DEFAULT_KAPPA1_LEVEL: f64 = 0.99;
pub const DEFAULT_CALIBRATION: usize = 20_000;

const KAPPA_STREAM: u64 = 0x006b_6170_7061;
const CAL_STREAM: u64 = 0x6361_6c33;
const DIR_STREAM: u64 = 0x6469_7232;

/// Everything fixed before resampling: the conditioned law, the chain, the
/// per-level functionals and the quantile tables.
#[derive(Debug, Clone)]
pub struct OmegaSetup {
    pub spec: DistributionSpec,
    pub kappa1: f64,
    pub chain: AdmissibleSequence,
    pub theta: ThetaTable,
    pub tables: QuantileTables,
    pub s0: usize,
}

fn lq_table(x: &SampleMatrix, t: &[f64], q: f64, big_n: usize, eps: f64) -> Result<QuantileTable> {
    if t.iter().all(|&v| v == 0.0) {
        return Ok(QuantileTable::zeros(big_n));
    }
    let norm = empirical_lq(&x.project(t), q)?;
    QuantileTable::build(&TailSource::Lq { norm, q }, big_n, eps)
}

/// Builds the setup at dimension n and sample size N from `cfg`.
///
/// The law is conditioned to κ₁n^{1/p}B_pⁿ, with κ₁ from `params.kappa1`,
/// the distribution's own κ₁, or the `kappa1_level` quantile (default 0.99)
/// of ‖X‖_p/n^{1/p}. L_q norms of every increment and chain point come
/// from `calibration_rows` conditioned rows.
pub fn omega_setup(cfg: &ExperimentConfig, n: usize, big_n: usize) -> Result<OmegaSetup> {
    let base = &cfg.distribution;
    let p = cfg.params.p.or(base.p).unwrap_or(DEFAULT_P);
    let q = cfg.q().unwrap_or(DEFAULT_Q);
    let eps = cfg.params.eps.unwrap_or(DEFAULT_EPS);
    let s1 = cfg.params.s1.unwrap_or(DEFAULT_S1);
    let rows = cfg.params.calibration_rows.unwrap_or(DEFAULT_CALIBRATION);
    let kappa1 = match cfg.params.kappa1.or(base.truncation().map(|t| t.1)) {
        Some(k) => k,
        None => calibrate_kappa1(
            base,
            n,
            p,
            cfg.params.kappa1_level.unwrap_or(DEFAULT_KAPPA1_LEVEL),
            rows,
            mix_seed(cfg.seed, KAPPA_STREAM ^ n as u64),
        )?,
    };
    let spec = base.untruncated().truncated(p, kappa1);
    let count = cfg.params.directions.unwrap_or(DEFAULT_DIRECTIONS);
    let mut rng = rng_from(mix_seed(cfg.seed, DIR_STREAM ^ n as u64));
    let points = family_points(SetFamily::Sphere, n, count.max(1), 1, rng.random())?;
    let x_cal = sample_matrix(&spec, rows, n, mix_seed(cfg.seed, CAL_STREAM ^ n as u64))?;
    let params = BallParams {
        n,
        p,
        kappa1,
        kappa4: cfg.params.kappa4,
        s1,
        cap: default_cap(big_n, n),
    };
    let chain = ball_admissible(&points, &params, Some(&x_cal))?;
    let levels = chain.len();
    let theta_s = theta_ball_table(cfg.params.u, &params, &chain.eta)?;
    let (s0, _) = s0_and_ells(&chain.eta, big_n);
    let base_theta = *theta_s
        .get(s0)
        .ok_or(Error::OutOfRange { index: s0, max: levels - 1 })?;
    let theta = ThetaTable {
        increments: vec![theta_s[..levels].to_vec(); points.len()],
        base: vec![base_theta; points.len()],
    };
    let mut increments = Vec::with_capacity(points.len());
    let mut all = Vec::new();
    for h in 0..points.len() {
        let mut row = Vec::with_capacity(levels);
        for s in 0..levels {
            row.push(lq_table(&x_cal, &chain.increment(s, h), q, big_n, eps)?);
            all.push(lq_table(&x_cal, chain.pi(s, h), q, big_n, eps)?);
        }
        all.push(lq_table(&x_cal, &points[h], q, big_n, eps)?);
        increments.push(row);
    }
    let class = QuantileTable::pointwise_max(increments.iter().flatten().chain(all.iter()));
    Ok(OmegaSetup {
        spec,
        kappa1,
        chain,
        theta,
        tables: QuantileTables { increments, class },
        s0,
    })
}

fn flag(b: bool) -> f64 {
    f64::from(u8::from(b))
}

/// One resample: event indicators, and the subset bounds when all hold
/// (NaN otherwise).
pub fn omega_trial(setup: &OmegaSetup, big_n: usize, u: f64, kappa3: f64, seed: u64) -> Result<Vec<f64>> {
    let x = sample_matrix(&setup.spec, big_n, setup.chain.dim(), seed)?;
    let ev = ChainEvaluation::linear(&x, &setup.chain)?;
    let p = EventParams {
        eta: &setup.chain.eta,
        u,
        kappa3,
    };
    let o1 = check_omega1(&ev, &p, &setup.theta)?.holds;
    let o2 = check_omega2(&ev, &p, &setup.tables)?.holds;
    let o3 = check_omega3(&ev, &p, &setup.tables)?.holds;
    let all = o1 && o2 && o3;
    let (c, cb) = if all {
        let g = check_good_event_conclusions(&ev, &p, &setup.theta, &setup.tables)?;
        (
            flag(g.increments.holds && g.functions.holds),
            flag(g.increments.holds && g.functions_base_in_gamma.holds),
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(vec![flag(o1), flag(o2), flag(o3), flag(all), c, cb])
}

/// Grid: n = `grids.n[0]` (default 32) × `grids.big_n` (default 128).
///
/// Fitted per cell: the empirical probability of all three events and the
/// fraction of good resamples on which the subset bounds held.
pub fn run_omega_events(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let n = cfg.grids.n.first().copied().unwrap_or(DEFAULT_N);
    let big_ns = if cfg.grids.big_n.is_empty() {
        vec![DEFAULT_BIG_N]
    } else {
        cfg.grids.big_n.clone()
    };
    let (u, kappa3) = (cfg.params.u, cfg.params.kappa3);
    let mut out = SweepResult::new(cfg, &["n", "big_n", "u"], &STATS);
    for big_n in big_ns {
        let setup = omega_setup(cfg, n, big_n)?;
        out.constant(&format!("kappa1_n{n}"), setup.kappa1);
        out.constant(&format!("s0_n{n}_N{big_n}"), setup.s0 as f64);
        out.constant(&format!("eta0_n{n}"), setup.chain.eta.value(0));
        let params = vec![n as f64, big_n as f64, u];
        let stream = cell_stream(&params);
        let trials = map_indexed(cfg.trials, |t| {
            omega_trial(&setup, big_n, u, kappa3, trial_seed(cfg.seed, stream, t as u64))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let cell = out.push_cell(params, trials);
        let pr = out.summary(cell, "all_hold").map_or(f64::NAN, |s| s.mean);
        out.fit("event_probability", "fraction of resamples with Ω₁, Ω₂ and Ω₃", Some(cell), pr);
        let c = out.summary(cell, "conclusions_ok").map_or(f64::NAN, |s| s.mean);
        out.fit(
            "conclusions_rate",
            "fraction of good resamples on which every subset bound held",
            Some(cell),
            c,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;

    #[test]
    fn small_setup_runs() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::OmegaEvents, DistributionSpec::student_t(6.0, 8.0), 4, 1);
        cfg.grids.n = vec![8];
        cfg.grids.big_n = vec![32];
        cfg.params.u = 8.0;
        cfg.params.directions = Some(4);
        cfg.params.calibration_rows = Some(2000);
        let r = run_omega_events(&cfg).unwrap();
        assert_eq!(r.records.len(), 4);
        for rec in &r.records {
            let all = rec.stats[3];
            assert_eq!(all, rec.stats[0] * rec.stats[1] * rec.stats[2]);
            assert_eq!(rec.stats[4].is_nan(), all == 0.0);
        }
    }
}
