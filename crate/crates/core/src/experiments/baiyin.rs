//! Extreme singular values of N×n matrices with i.i.d. entries, scaled by
//! √N, against the edges 1 ± √β.

use crate::error::{Error, Result};
use crate::experiments::envelope::{reference_envelope, EnvelopeKind, EnvelopeParams};
use crate::experiments::{cell_stream, EnvelopeValue, ExperimentConfig, SweepResult};
use crate::linalg::extreme_singulars_of;
use crate::par::map_indexed;
use crate::samplers::{sample_matrix, DistributionKind};
use crate::seed::trial_seed;

pub const STATS: [&str; 4] = ["s_min", "s_max", "deviation", "c4"];

/// Grid: `grids.n` × `grids.beta`, with N = round(n/β).
///
/// Per trial: s_min/√N, s_max/√N, deviation max(|s_max/√N − 1|,
/// |1 − s_min/√N|) and c₄ = deviation/√β. Fitted per cell: c₄ as the
/// maximum over trials, and the fraction of trials within the c₄ fitted at
/// the smallest n of the same β.
pub fn run_baiyin(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let spec = &cfg.distribution;
    if !spec.kind.is_scalar() {
        return Err(Error::Unsupported(format!(
            "{:?} rows are not i.i.d. entries",
            spec.kind
        )));
    }
    let mut out = SweepResult::new(cfg, &["n", "beta", "big_n"], &STATS);
    if let Some(q) = cfg.q() {
        if q <= 4.0 {
            out.diagnostics.push(format!(
                "entries have q = {q} ≤ 4 moments; the edges need a fourth moment, expect failure"
            ));
        }
    } else if matches!(spec.kind, DistributionKind::StudentT | DistributionKind::SymPareto) {
        out.diagnostics.push("moment order unknown".into());
    }
    let mut base: Vec<(f64, f64)> = Vec::new();
    let mut ns = cfg.grids.n.clone();
    ns.sort_unstable();
    for &beta in &cfg.grids.beta {
        for &n in &ns {
            let big_n = (n as f64 / beta).round() as usize;
            if big_n < n {
                return Err(Error::InvalidParameter(format!("N = {big_n} < n = {n}")));
            }
            let params = vec![n as f64, beta, big_n as f64];
            let stream = cell_stream(&params);
            let sb = beta.sqrt();
            let nf = (big_n as f64).sqrt();
            let trials = map_indexed(cfg.trials, |t| -> Result<Vec<f64>> {
                let x = sample_matrix(spec, big_n, n, trial_seed(cfg.seed, stream, t as u64))?;
                let s = extreme_singulars_of(&x)?;
                let (lo, hi) = (s.s_min / nf, s.s_max / nf);
                let dev = (hi - 1.0).abs().max((1.0 - lo).abs());
                Ok(vec![lo, hi, dev, dev / sb])
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let c4 = trials.iter().map(|t| t[3]).fold(0.0, f64::max);
            let cell = out.push_cell(params, trials);
            out.fit("c4", "max over trials of deviation/√β", Some(cell), c4);
            let c4_base = match base.iter().find(|b| b.0 == beta) {
                Some(&(_, c)) => c,
                None => {
                    base.push((beta, c4));
                    c4
                }
            };
            let within = out.values(cell, "c4").iter().filter(|&&c| c <= c4_base).count() as f64 / cfg.trials as f64;
            out.fit(
                "within_base_fraction",
                "fraction of trials with deviation ≤ c₄(smallest n)·√β",
                Some(cell),
                within,
            );
            for kind in [EnvelopeKind::Alpt, EnvelopeKind::Rudelson] {
                if let Ok(value) = reference_envelope(kind, n, big_n, EnvelopeParams::default()) {
                    out.envelopes.push(EnvelopeValue { kind, cell, value });
                }
            }
        }
    }
    let all = out.fitted.iter().filter(|f| f.name == "c4").map(|f| f.value).fold(0.0, f64::max);
    out.fit("c4_max", "max of c₄ over all cells", None, all);
    Ok(out)
}
