//! Operator-norm error of the sample covariance, against the rate
//! (n/N)^{1/2} for q > 4 and (n/N)^{1−2/q}·log(N/n) for 2 < q ≤ 4.

use crate::error::Result;
use crate::experiments::envelope::{reference_envelope, EnvelopeKind, EnvelopeParams};
use crate::experiments::{cell_stream, EnvelopeValue, ExperimentConfig, SweepResult};
use crate::linalg::{op_norm_deviation, sample_covariance, CovMatrix};
use crate::par::map_indexed;
use crate::samplers::{coupon_all_hit_probability, sample_matrix, DistributionKind, DistributionSpec};
use crate::seed::{mix_seed, trial_seed};

pub const STATS: [&str; 3] = ["deviation", "fitted", "exceeds_one"];

/// Default calibration size for Σ = σ²I under truncated or unnormalized
/// laws.
pub const CALIBRATION_ROWS: usize = 20_000;

const CALIBRATION_STREAM: u64 = 0x6361_6c69_6200;

/// Convergence rate the deviation is divided by.
pub fn covariance_rate(n: usize, big_n: usize, q: Option<f64>) -> f64 {
    let a = n as f64 / big_n as f64;
    match q {
        Some(q) if q <= 4.0 => a.powf(1.0 - 2.0 / q) * (big_n as f64 / n as f64).ln().max(1.0),
        _ => a.sqrt(),
    }
}

/// σ² with E XXᵀ = σ²I, from a calibration batch (laws here are
/// unconditional with exchangeable coordinates).
pub fn calibrate_scale(spec: &DistributionSpec, n: usize, rows: usize, seed: u64) -> Result<f64> {
    let x = sample_matrix(spec, rows, n, mix_seed(seed, CALIBRATION_STREAM))?;
    Ok(x.data.iter().map(|v| v * v).sum::<f64>() / x.data.len() as f64)
}

/// Grid: `grids.n` × `grids.big_n` (or N = round(n/β) over `grids.beta`).
///
/// Per trial: ‖Σ_N − Σ‖, that over the rate, and whether it reaches 1.
/// Σ = I for standardized untruncated laws; otherwise σ²I with σ²
/// calibrated once per n. For the coordinate law the exact probability
/// that every coordinate is hit (needed for an error below 1) is reported.
pub fn run_covariance(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let spec = &cfg.distribution;
    let q = cfg.q();
    let mut out = SweepResult::new(cfg, &["n", "big_n", "aspect"], &STATS);
    let estimate_sigma = spec.truncation().is_some() || !spec.standardized;
    let cal_rows = cfg.params.calibration_rows.unwrap_or(CALIBRATION_ROWS);
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for &n in &cfg.grids.n {
        for &big_n in &cfg.grids.big_n {
            cells.push((n, big_n));
        }
        for &b in &cfg.grids.beta {
            cells.push((n, (n as f64 / b).round() as usize));
        }
    }
    let mut medians = Vec::new();
    for (n, big_n) in cells {
        let sigma2 = if estimate_sigma {
            let s = calibrate_scale(spec, n, cal_rows, cfg.seed)?;
            out.constant(&format!("sigma2_n{n}"), s);
            s
        } else {
            1.0
        };
        let target = CovMatrix::scaled_identity(n, sigma2);
        let rate = covariance_rate(n, big_n, q);
        let params = vec![n as f64, big_n as f64, n as f64 / big_n as f64];
        let stream = cell_stream(&params);
        let trials = map_indexed(cfg.trials, |t| -> Result<Vec<f64>> {
            let x = sample_matrix(spec, big_n, n, trial_seed(cfg.seed, stream, t as u64))?;
            let dev = op_norm_deviation(&sample_covariance(&x), &target)?;
            Ok(vec![dev, dev / rate, if dev >= 1.0 { 1.0 } else { 0.0 }])
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let cell = out.push_cell(params, trials);
        let s = *out.summary(cell, "fitted").expect("stat exists");
        medians.push(s.median);
        out.fit("fitted_median", "median of deviation/rate", Some(cell), s.median);
        out.fit("fitted_max", "max of deviation/rate", Some(cell), s.max);
        if spec.kind == DistributionKind::CoordinateMeasure {
            out.fit(
                "all_hit_probability",
                "exact Pr(every coordinate sampled), an upper bound on Pr(deviation < 1)",
                Some(cell),
                coupon_all_hit_probability(n, big_n),
            );
        }
        let ep = EnvelopeParams {
            q,
            eta: cfg.params.sv_eta,
        };
        let mut kinds = vec![EnvelopeKind::Rudelson, EnvelopeKind::Alpt];
        if q.is_some_and(|q| q > 4.0) {
            kinds.push(EnvelopeKind::Vershynin);
        }
        if ep.eta.is_some() {
            kinds.push(EnvelopeKind::Sv);
        }
        for kind in kinds {
            if let Ok(value) = reference_envelope(kind, n, big_n, ep) {
                out.envelopes.push(EnvelopeValue { kind, cell, value });
            }
        }
    }
    let lo = medians.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = medians.iter().copied().fold(0.0, f64::max);
    if lo > 0.0 && lo.is_finite() {
        out.fit("fit_spread", "max/min over cells of the median fitted constant", None, hi / lo);
    }
    out.constant("rate_q", q.unwrap_or(f64::INFINITY));
    Ok(out)
}
