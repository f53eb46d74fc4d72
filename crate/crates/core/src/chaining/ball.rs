//! Admissible sequence for a finite set of directions in the Euclidean unit
//! ball, built from sparse shells and largest-coordinate projections, and
//! the matching per-level functionals.

use serde::{Deserialize, Serialize};

use crate::chaining::admissible::{farthest_point_order, nearest, AdmissibleSequence, Level, Metric};
use crate::chaining::eta::{make_eta, EtaKind, EtaSequence};
use crate::error::{invalid, Error, Result};
use crate::norms::{m_ell_ceiling, m_ell_profile};
use crate::samplers::SampleMatrix;

/// Projection of `t` onto its `k` largest coordinates in absolute value
/// (earlier index wins ties).
pub fn project_largest(t: &[f64], k: usize) -> Vec<f64> {
    if k >= t.len() {
        return t.to_vec();
    }
    let mut idx: Vec<usize> = (0..t.len()).collect();
    idx.sort_by(|&a, &b| t[b].abs().total_cmp(&t[a].abs()).then(a.cmp(&b)));
    let mut out = vec![0.0; t.len()];
    for &i in &idx[..k] {
        out[i] = t[i];
    }
    out
}

/// First level s with 2^{s+s₁} ≥ n; from there on π_s is the identity.
pub fn full_support_level(n: usize, s1: u32) -> usize {
    (0..).find(|&s| (1usize << (s + s1 as usize)) >= n).expect("finite n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallParams {
    pub n: usize,
    pub p: f64,
    pub kappa1: f64,
    pub kappa4: f64,
    pub s1: u32,
    /// Schedule cap; the schedule is lengthened past the full-support level
    /// if the cap alone would stop earlier.
    pub cap: f64,
}

/// Admissible sequence for `points` ⊂ B₂ⁿ. Sparse levels (2^{s+s₁} < n) hold
/// projections onto the largest 2^{s+s₁} coordinates, thinned by a
/// farthest-point net under the ψ₂ proxy d(v,w) = ‖v−w‖_∞ M_{|supp(v−w)|}
/// when the budget 2^{η_s} binds. M_ℓ comes from the calibration sample, or
/// from the analytic ceiling κ₁n^{1/p}ℓ^{1/2−1/p} without one.
pub fn ball_admissible(
    points: &[Vec<f64>],
    params: &BallParams,
    x_cal: Option<&SampleMatrix>,
) -> Result<AdmissibleSequence> {
    let n = params.n;
    if points.is_empty() {
        return invalid("no directions");
    }
    if points.iter().any(|t| t.len() != n) {
        return invalid("direction dimension differs from n");
    }
    let mut eta = make_eta(
        EtaKind::Ball {
            n,
            s1: params.s1,
            kappa4: params.kappa4,
        },
        params.cap,
    )?;
    let full = full_support_level(n, params.s1);
    eta.extend_to(full + 1);
    let m_ell = match x_cal {
        Some(x) => {
            if x.n_cols != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: x.n_cols,
                });
            }
            m_ell_profile(x)
        }
        None => (1..=n)
            .map(|l| m_ell_ceiling(params.kappa1, n, params.p, l).value)
            .collect(),
    };
    let metric = Metric::Psi2Proxy { m_ell };
    let mut levels = Vec::with_capacity(eta.len());
    for s in 0..eta.len() {
        let k = 1usize << (s + params.s1 as usize);
        let cands: Vec<Vec<f64>> = if s >= full {
            points.to_vec()
        } else {
            points.iter().map(|t| project_largest(t, k)).collect()
        };
        let budget = eta.budget(s);
        if budget == 0 {
            return Err(Error::InvalidParameter(format!("budget 2^eta_{s} < 1")));
        }
        let level = if budget >= cands.len() {
            Level {
                assign: (0..cands.len()).collect(),
                centers: cands,
            }
        } else {
            let order = farthest_point_order(&cands, &metric);
            let centers: Vec<Vec<f64>> = order[..budget].iter().map(|&i| cands[i].clone()).collect();
            let assign = cands.iter().map(|c| nearest(&metric, c, &centers)).collect();
            Level { centers, assign }
        };
        levels.push(level);
    }
    Ok(AdmissibleSequence {
        points: points.to_vec(),
        levels,
        metric,
        eta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallRegime {
    Base,
    Sparse,
    Dense,
}

/// θ_{u,s} for the ball construction with constant 1:
/// level 0: √u η₀^{1/2} n^{1/p} 2^{s₁(1/2−1/p)};
/// 2^{s+s₁} ≤ n: √u η_s^{1/2} n^{1/p} 2^{−(s+s₁)/p};
/// otherwise (then η_s ≥ n): √u η_s^{1/2} 2^{−2^s/n}.
pub fn theta_ball(s: usize, u: f64, n: usize, p: f64, eta: &EtaSequence, s1: u32) -> Result<(f64, BallRegime)> {
    if !matches!(eta.kind, EtaKind::Ball { .. }) {
        return Err(Error::Unsupported("theta_ball needs the ball schedule".into()));
    }
    if s >= eta.len() {
        return Err(Error::OutOfRange {
            index: s,
            max: eta.len().saturating_sub(1),
        });
    }
    let nf = n as f64;
    let e = eta.values[s].sqrt() * u.sqrt();
    let k = 2f64.powi((s + s1 as usize) as i32);
    Ok(if s == 0 {
        (
            e * nf.powf(1.0 / p) * 2f64.powf(s1 as f64 * (0.5 - 1.0 / p)),
            BallRegime::Base,
        )
    } else if k <= nf {
        (e * nf.powf(1.0 / p) * k.powf(-1.0 / p), BallRegime::Sparse)
    } else {
        (e * 2f64.powf(-(2f64.powi(s as i32)) / nf), BallRegime::Dense)
    })
}

/// All θ_ball values along the schedule.
pub fn theta_ball_table(u: f64, params: &BallParams, eta: &EtaSequence) -> Result<Vec<f64>> {
    (0..eta.len())
        .map(|s| theta_ball(s, u, params.n, params.p, eta, params.s1).map(|(v, _)| v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{sample_matrix, DistributionSpec};

    fn params(n: usize, s1: u32) -> BallParams {
        BallParams {
            n,
            p: 3.0,
            kappa1: 2.0,
            kappa4: 10.0,
            s1,
            cap: 2.0 * n as f64,
        }
    }

    fn some_points(n: usize) -> Vec<Vec<f64>> {
        (0..5)
            .map(|j| {
                let v: Vec<f64> = (0..n).map(|i| ((i * 7 + j * 3) % 11) as f64 - 5.0).collect();
                let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / r).collect()
            })
            .collect()
    }

    #[test]
    fn projection() {
        assert_eq!(project_largest(&[0.1, -3.0, 2.0, 0.5], 2), vec![0.0, -3.0, 2.0, 0.0]);
        assert_eq!(project_largest(&[1.0, 2.0], 5), vec![1.0, 2.0]);
    }

    #[test]
    fn single_shell() {
        let pts = some_points(8);
        let a = ball_admissible(&pts, &params(8, 3), None).unwrap();
        for s in 0..a.len() {
            for t in 0..pts.len() {
                assert_eq!(a.pi(s, t), pts[t].as_slice());
            }
        }
    }

    #[test]
    fn sparse_supports() {
        let n = 32;
        let pts = some_points(n);
        let x = sample_matrix(&DistributionSpec::rademacher(), 64, n, 1).unwrap();
        let a = ball_admissible(&pts, &params(n, 1), Some(&x)).unwrap();
        a.validate().unwrap();
        for s in 0..a.len() {
            let k = 1usize << (s + 1);
            if k <= n {
                for c in &a.levels[s].centers {
                    assert!(c.iter().filter(|v| **v != 0.0).count() <= k);
                }
            }
        }
        // chains end at the points themselves
        let last = a.len() - 1;
        for t in 0..pts.len() {
            assert_eq!(a.pi(last, t), pts[t].as_slice());
        }
    }

    #[test]
    fn theta_regimes() {
        let n = 64;
        let eta = make_eta(
            EtaKind::Ball {
                n,
                s1: 2,
                kappa4: 10.0,
            },
            1e4,
        )
        .unwrap();
        let (v, r) = theta_ball(0, 1.0, n, 3.0, &eta, 2).unwrap();
        assert_eq!(r, BallRegime::Base);
        assert!(v > 0.0);
        // 2^{s+2} = 64 at s = 4; p = 2 makes the exponents cancel
        let (v, r) = theta_ball(4, 4.0, n, 2.0, &eta, 2).unwrap();
        assert_eq!(r, BallRegime::Sparse);
        assert!((v - 2.0 * eta.values[4].sqrt()).abs() < 1e-9);
        let (_, r) = theta_ball(5, 1.0, n, 3.0, &eta, 2).unwrap();
        assert_eq!(r, BallRegime::Dense);
        assert!(theta_ball(eta.len(), 1.0, n, 3.0, &eta, 2).is_err());
        // double-exponential damping far out
        let mut long = eta.clone();
        long.extend_to(14);
        let (v, _) = theta_ball(13, 1.0, n, 3.0, &long, 2).unwrap();
        assert!(v < 1e-30);
    }
}
