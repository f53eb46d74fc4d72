//! Decompositions of finite V ⊂ R^N: the derived parameters A₁, A₂, A_Φ,
//! B_{q,ε}, B₄, a checker for the three decomposition conditions, and the
//! resulting bounds on the Bernoulli process indexed by {(v_i²)}.

use serde::{Deserialize, Serialize};

use crate::chaining::admissible::AdmissibleSequence;
use crate::chaining::phi::{phi_aggregates, PhiFamily, PhiKind};
use crate::error::{invalid, Error, Result};
use crate::norms::sorted_square_prefix;

/// V with its admissible sequence, functionals θ_s(Δ_s v) (level 0 holds
/// θ₀(π₀v)), seminorm values ‖Δ_s v‖ and ‖v‖, and constants α, γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSpec {
    pub admissible: AdmissibleSequence,
    pub theta: Vec<Vec<f64>>,
    pub increment_norms: Vec<Vec<f64>>,
    pub vector_norms: Vec<f64>,
    pub alpha: f64,
    pub gamma: f64,
}

impl DecompositionSpec {
    pub fn new(
        admissible: AdmissibleSequence,
        theta: Vec<Vec<f64>>,
        increment_norms: Vec<Vec<f64>>,
        vector_norms: Vec<f64>,
        alpha: f64,
        gamma: f64,
    ) -> Result<Self> {
        let m = admissible.points.len();
        let levels = admissible.len();
        let shape_ok = |t: &Vec<Vec<f64>>| t.len() == m && t.iter().all(|r| r.len() == levels);
        if !shape_ok(&theta) || !shape_ok(&increment_norms) || vector_norms.len() != m {
            return invalid(format!("tables must be {m} vectors × {levels} levels"));
        }
        let all = theta.iter().flatten().chain(increment_norms.iter().flatten()).chain(&vector_norms);
        for &x in all {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::NonFinite(format!("table entry {x}")));
            }
        }
        if !(alpha >= 0.0 && gamma >= 0.0) {
            return invalid("alpha and gamma must be nonnegative");
        }
        Ok(Self {
            admissible,
            theta,
            increment_norms,
            vector_norms,
            alpha,
            gamma,
        })
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.admissible.points
    }

    pub fn big_n(&self) -> usize {
        self.admissible.dim()
    }

    /// d = max ‖v‖.
    pub fn d(&self) -> f64 {
        self.vector_norms.iter().copied().fold(0.0, f64::max)
    }

    fn eta(&self, s: usize) -> f64 {
        self.admissible.eta.value(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionParams {
    pub a1: f64,
    pub a2: f64,
    pub a_phi: f64,
    pub b4: f64,
    /// B_{q,ε} for an L_q family, None for ψ_β families.
    pub b_q_eps: Option<f64>,
}

/// The sums run over levels with η_s ≤ N; A₁, A₂ skip s = 0. With the
/// standard schedule the s = 0 terms of A_Φ and B vanish since η₀ = 0.
pub fn decomposition_params(d: &DecompositionSpec, f: &PhiFamily) -> DecompositionParams {
    let big_n = f.n as f64;
    let agg = phi_aggregates(f, &d.admissible.eta);
    let levels = d.admissible.len();
    let bq_exp = match f.kind {
        PhiKind::Lq { q, eps } => Some(1.0 - 2.0 * (1.0 + eps) / q),
        PhiKind::Beta { .. } => None,
    };
    let mut out = DecompositionParams {
        a1: 0.0,
        a2: 0.0,
        a_phi: 0.0,
        b4: 0.0,
        b_q_eps: bq_exp.map(|_| 0.0),
    };
    for norms in &d.increment_norms {
        let (mut a1, mut a2, mut ap, mut b4, mut bq) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (s, &w) in norms.iter().enumerate().take(levels) {
            let e = d.eta(s);
            if e > big_n {
                continue;
            }
            if s > 0 {
                let ph = f.eval_unchecked(e.max(1.0));
                a1 += ph * w;
                a2 += ph * ph * w;
            }
            if let Some(Some(phi_s)) = agg.per_level.get(s) {
                ap += phi_s * e.sqrt() * w;
            }
            b4 += e.sqrt() * w;
            if let Some(x) = bq_exp {
                bq += e.powf(x) * w;
            }
        }
        out.a1 = out.a1.max(a1);
        out.a2 = out.a2.max(a2);
        out.a_phi = out.a_phi.max(ap);
        out.b4 = out.b4.max(b4);
        if let Some(b) = out.b_q_eps.as_mut() {
            *b = b.max(bq);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: u8,
    pub level: Option<usize>,
    pub element: usize,
    pub k: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of checking an event or a set of conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub holds: bool,
    pub first_violation: Option<Violation>,
    /// min (rhs − lhs) per level (None where nothing was checked).
    pub margins: Vec<Option<f64>>,
    /// min (rhs − lhs) per condition, indexed by condition number − 1.
    pub condition_margins: Vec<Option<f64>>,
}

/// Relative slack granted to floating-point comparisons.
pub const REL_TOL: f64 = 1e-12;

pub(crate) struct Checker {
    report: OmegaReport,
}

impl Checker {
    pub(crate) fn new(levels: usize, conditions: usize) -> Self {
        Self {
            report: OmegaReport {
                holds: true,
                first_violation: None,
                margins: vec![None; levels],
                condition_margins: vec![None; conditions],
            },
        }
    }

    pub(crate) fn check(&mut self, condition: u8, level: Option<usize>, element: usize, k: Option<usize>, lhs: f64, rhs: f64) {
        let slack = rhs - lhs;
        let slot = &mut self.report.condition_margins[condition as usize - 1];
        *slot = Some(slot.map_or(slack, |m: f64| m.min(slack)));
        if let Some(s) = level {
            if s >= self.report.margins.len() {
                self.report.margins.resize(s + 1, None);
            }
            let m = &mut self.report.margins[s];
            *m = Some(m.map_or(slack, |x: f64| x.min(slack)));
        }
        let ok = lhs <= rhs + REL_TOL * rhs.abs().max(lhs.abs()) || (lhs.is_nan() && rhs.is_nan());
        if !ok && self.report.holds {
            self.report.holds = false;
            self.report.first_violation = Some(Violation {
                condition,
                level,
                element,
                k,
                lhs,
                rhs,
            });
        }
    }

    pub(crate) fn finish(self) -> OmegaReport {
        self.report
    }
}

/// Checks the three conditions. Conditions 2 and 3 quantify over all
/// I ⊂ {1..N}; for a fixed size |I| = k the worst I is the set of the k
/// largest |entries|, so scanning k = 1..N with top-k sums is exact.
pub fn verify_decomposition(d: &DecompositionSpec, f: &PhiFamily) -> OmegaReport {
    let big_n = d.big_n();
    let levels = d.admissible.len();
    let mut c = Checker::new(levels, 3);
    let dd = d.d();
    let phi: Vec<f64> = (1..=big_n).map(|k| f.at(k)).collect();
    for (v, vec) in d.vectors().iter().enumerate() {
        let total: f64 = d.theta[v].iter().sum();
        c.check(1, None, v, None, total, d.gamma);

        let pre = sorted_square_prefix(vec);
        for k in 1..=big_n {
            c.check(2, None, v, Some(k), pre[k].sqrt(), d.alpha * (d.gamma + dd * phi[k - 1]));
        }

        for s in 0..levels {
            let inc = d.admissible.increment(s, v);
            let pre = sorted_square_prefix(&inc);
            let th = d.theta[v][s];
            let w = d.increment_norms[v][s];
            let dense = d.eta(s) >= big_n as f64;
            for k in 1..=big_n {
                let rhs = if dense {
                    d.alpha * th
                } else {
                    d.alpha * (th + w * phi[k - 1])
                };
                c.check(3, Some(s), v, Some(k), pre[k].sqrt(), rhs);
            }
        }
    }
    c.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsMode {
    Full,
    Compact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliRhs {
    pub value: f64,
    pub mode: RhsMode,
    pub r: f64,
    /// The leading absolute constant, set to 1.
    pub c2: f64,
    pub params: DecompositionParams,
}

/// Right-hand side of the Bernoulli bound with unit constant.
/// Full: rα²(γ(γ + dφ(N) + A₁) + d(A₂ + A_Φ)).
/// Compact, ψ_β or q > 4: rα²(γ² + d√N(γ + B₄)).
/// Compact, 2 < q ≤ 4 (ε > 0): α²r/(1−2(1+ε)/q)·(γ² + d√Nγ + dN^{2(1+ε)/q}B_{q,ε}).
pub fn bernoulli_rhs(d: &DecompositionSpec, f: &PhiFamily, r: f64, mode: RhsMode) -> Result<BernoulliRhs> {
    if r < 1.0 {
        return invalid(format!("r must be at least 1, got {r}"));
    }
    let p = decomposition_params(d, f);
    let (a, g, dd) = (d.alpha, d.gamma, d.d());
    let big_n = f.n as f64;
    let value = match mode {
        RhsMode::Full => r * a * a * (g * (g + dd * f.at(f.n) + p.a1) + dd * (p.a2 + p.a_phi)),
        RhsMode::Compact => match f.kind {
            PhiKind::Beta { .. } => r * a * a * (g * g + dd * big_n.sqrt() * (g + p.b4)),
            PhiKind::Lq { q, .. } if q > 4.0 => r * a * a * (g * g + dd * big_n.sqrt() * (g + p.b4)),
            PhiKind::Lq { q, eps } => {
                if eps <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "compact form for 2 < q ≤ 4 needs eps > 0".into(),
                    ));
                }
                let c = 1.0 - 2.0 * (1.0 + eps) / q;
                let bq = p.b_q_eps.expect("lq family");
                a * a * r / c * (g * g + dd * big_n.sqrt() * g + dd * big_n.powf(2.0 * (1.0 + eps) / q) * bq)
            }
        },
    };
    Ok(BernoulliRhs {
        value,
        mode,
        r,
        c2: 1.0,
        params: p,
    })
}
