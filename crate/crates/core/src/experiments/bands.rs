//! Pass/fail regression bands applied to a finished sweep. These are the
//! only assertions the sweeps make; everything else is reported, not judged.

use serde::{Deserialize, Serialize};

use crate::experiments::{ExperimentConfig, ExperimentKind, SweepResult};
use crate::samplers::DistributionKind;

/// Half-width of the Gaussian edge band.
pub const EDGE_TOLERANCE: f64 = 0.06;
/// Allowed growth of c₄ from the smallest to the largest n.
pub const C4_GROWTH: f64 = 0.1;
pub const C4_CEILING: f64 = 3.0;
pub const COUPON_FRACTION: f64 = 0.99;
pub const TAIL_RATE: f64 = 0.01;
pub const EVENT_PROBABILITY: f64 = 0.9;
pub const DOMINATION_RATIO: f64 = 5.0;
pub const SANDWICH_RANGE: (f64, f64) = (0.5, 50.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl BandCheck {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }
}

fn param(r: &SweepResult, cell: usize, name: &str) -> f64 {
    r.param_index(name).map_or(f64::NAN, |i| r.cells[cell].params[i])
}

fn median(r: &SweepResult, cell: usize, stat: &str) -> f64 {
    r.summary(cell, stat).map_or(f64::NAN, |s| s.median)
}

fn mean(r: &SweepResult, cell: usize, stat: &str) -> f64 {
    r.summary(cell, stat).map_or(f64::NAN, |s| s.mean)
}

fn baiyin(cfg: &ExperimentConfig, r: &SweepResult) -> Vec<BandCheck> {
    let mut out = Vec::new();
    if cfg.distribution.kind == DistributionKind::Gaussian {
        for c in 0..r.cells.len() {
            let b = param(r, c, "beta").sqrt();
            let (hi, lo) = (median(r, c, "s_max"), median(r, c, "s_min"));
            let ok = (hi - (1.0 + b)).abs() <= EDGE_TOLERANCE && (lo - (1.0 - b)).abs() <= EDGE_TOLERANCE;
            out.push(BandCheck::new(
                "gaussian_edges",
                ok,
                format!(
                    "n={} β={}: median s_max/√N={hi:.4} (1+√β={:.4}), median s_min/√N={lo:.4} (1−√β={:.4})",
                    param(r, c, "n"),
                    param(r, c, "beta"),
                    1.0 + b,
                    1.0 - b
                ),
            ));
        }
    } else if cfg.q().is_some_and(|q| q > 4.0) {
        let mut betas: Vec<f64> = r.cells.iter().map(|c| c.params[1]).collect();
        betas.sort_by(f64::total_cmp);
        betas.dedup();
        for beta in betas {
            let cells: Vec<usize> = (0..r.cells.len()).filter(|&c| param(r, c, "beta") == beta).collect();
            let (Some(&first), Some(&last)) = (cells.first(), cells.last()) else {
                continue;
            };
            let c0 = r.fitted_value("c4", Some(first)).unwrap_or(f64::NAN);
            let c1 = r.fitted_value("c4", Some(last)).unwrap_or(f64::NAN);
            out.push(BandCheck::new(
                "c4_stable",
                c1 <= c0 + C4_GROWTH && c1 <= C4_CEILING,
                format!(
                    "β={beta}: c4(n={})={c0:.4}, c4(n={})={c1:.4}",
                    param(r, first, "n"),
                    param(r, last, "n")
                ),
            ));
        }
    }
    out
}

fn covariance(cfg: &ExperimentConfig, r: &SweepResult) -> Vec<BandCheck> {
    let mut out = Vec::new();
    for c in 0..r.cells.len() {
        if cfg.distribution.kind == DistributionKind::CoordinateMeasure {
            let p = r.fitted_value("all_hit_probability", Some(c)).unwrap_or(1.0);
            if p < 1e-9 {
                let f = mean(r, c, "exceeds_one");
                out.push(BandCheck::new(
                    "coupon_control",
                    f >= COUPON_FRACTION,
                    format!("n={} N={}: Pr(deviation ≥ 1) = {f:.4}, Pr(all hit) = {p:.3e}", param(r, c, "n"), param(r, c, "big_n")),
                ));
            }
        } else if cfg.distribution.kind == DistributionKind::Gaussian && param(r, c, "aspect") <= 1e-4 {
            let v = r.values(c, "deviation");
            let f = v.iter().filter(|&&d| d <= 0.1).count() as f64 / v.len() as f64;
            out.push(BandCheck::new(
                "gaussian_small_aspect",
                f >= 0.95,
                format!("n={}: fraction with deviation ≤ 0.1 = {f:.3}", param(r, c, "n")),
            ));
        }
    }
    out
}

fn fitted_band(r: &SweepResult, name: &str, fit: &str, ok: impl Fn(f64) -> bool, what: &str) -> Vec<BandCheck> {
    r.fitted
        .iter()
        .filter(|f| f.name == fit)
        .map(|f| {
            let at = f.cell.map_or("all cells".to_string(), |c| format!("cell {c}"));
            BandCheck::new(name, ok(f.value), format!("{at}: {fit} = {:.4} ({what})", f.value))
        })
        .collect()
}

/// Bands that apply to this sweep; empty when none does.
pub fn check_bands(cfg: &ExperimentConfig, r: &SweepResult) -> Vec<BandCheck> {
    match cfg.experiment {
        ExperimentKind::Baiyin => baiyin(cfg, r),
        ExperimentKind::Covariance => covariance(cfg, r),
        ExperimentKind::TailLemma => fitted_band(r, "tail_rate", "failure_rate", |v| v <= TAIL_RATE, "≤ 0.01"),
        ExperimentKind::OmegaEvents => {
            let mut v = fitted_band(r, "event_probability", "event_probability", |v| v >= EVENT_PROBABILITY, "≥ 0.9");
            v.extend(fitted_band(r, "good_event_bounds", "conclusions_rate", |v| v == 1.0, "= 1"));
            v
        }
        ExperimentKind::TheoremB => fitted_band(r, "domination", "max_ratio_overall", |v| v <= DOMINATION_RATIO, "≤ 5"),
        ExperimentKind::Symmetrization => fitted_band(r, "symmetrization", "holds_fraction", |v| v == 1.0, "= 1"),
        ExperimentKind::WeakLp => fitted_band(r, "weak_lp_slope", "slope_within_tolerance", |v| v == 1.0, "slope within 0.3 of −(q/p−1)"),
        ExperimentKind::GammaSandwich => {
            let mut v = fitted_band(r, "sandwich_low", "ratio_min", |v| v >= SANDWICH_RANGE.0, "≥ 0.5");
            v.extend(fitted_band(r, "sandwich_high", "ratio_max", |v| v <= SANDWICH_RANGE.1, "≤ 50"));
            v
        }
    }
}
