//! Admissible sequences over finite index sets, γ_β along a given sequence,
//! and an exhaustive γ_β oracle for tiny sets.

use serde::{Deserialize, Serialize};

use crate::chaining::eta::{make_eta, EtaKind, EtaSequence};
use crate::error::{invalid, Error, Result};
use crate::norms::{empirical_lq, lp_norm, moment_grid};
use crate::samplers::SampleMatrix;

/// Distance used to build and score a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    L2,
    LInf,
    /// d(v,w) = ‖v−w‖_∞ · M_{|supp(v−w)|}, with `m_ell[k-1]` = M_k.
    Psi2Proxy { m_ell: Vec<f64> },
    /// sup_q ‖⟨v−w, X⟩‖_q/√q over a calibration sample, q on a geometric grid.
    EmpiricalPsi2 { calibration: SampleMatrix, q_max: f64 },
}

impl Metric {
    pub fn norm(&self, v: &[f64]) -> f64 {
        match self {
            Metric::L2 => lp_norm(v, 2.0),
            Metric::LInf => lp_norm(v, f64::INFINITY),
            Metric::Psi2Proxy { m_ell } => {
                let supp = v.iter().filter(|x| **x != 0.0).count();
                if supp == 0 {
                    0.0
                } else {
                    lp_norm(v, f64::INFINITY) * m_ell[supp.min(m_ell.len()) - 1]
                }
            }
            Metric::EmpiricalPsi2 { calibration, q_max } => {
                if v.iter().all(|x| *x == 0.0) {
                    return 0.0;
                }
                let z = calibration.project(v);
                moment_grid(*q_max)
                    .into_iter()
                    .map(|q| empirical_lq(&z, q).unwrap_or(0.0) / q.sqrt())
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            Metric::LInf => a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
            _ => {
                let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                self.norm(&d)
            }
        }
    }
}

/// Level s: centers T_s and the assignment π_s (index into `centers` for
/// each base point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub centers: Vec<Vec<f64>>,
    pub assign: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSequence {
    pub points: Vec<Vec<f64>>,
    pub levels: Vec<Level>,
    pub metric: Metric,
    pub eta: EtaSequence,
}

impl AdmissibleSequence {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// π_s t for base point `t`.
    pub fn pi(&self, s: usize, t: usize) -> &[f64] {
        let l = &self.levels[s];
        &l.centers[l.assign[t]]
    }

    /// Δ_s t = π_s t − π_{s−1} t, with Δ_0 t = π_0 t.
    pub fn increment(&self, s: usize, t: usize) -> Vec<f64> {
        let cur = self.pi(s, t);
        if s == 0 {
            return cur.to_vec();
        }
        let prev = self.pi(s - 1, t);
        cur.iter().zip(prev).map(|(a, b)| a - b).collect()
    }

    /// d(t, T_s) = min over centers of level s.
    pub fn dist_to_level(&self, t: usize, s: usize) -> f64 {
        let p = &self.points[t];
        self.levels[s]
            .centers
            .iter()
            .map(|c| self.metric.distance(p, c))
            .fold(f64::INFINITY, f64::min)
    }

    /// d(t, π_s t).
    pub fn chain_error(&self, t: usize, s: usize) -> f64 {
        self.metric.distance(&self.points[t], self.pi(s, t))
    }

    /// Cardinality and assignment checks; |T₀| = 1 whenever η₀ = 0.
    pub fn validate(&self) -> Result<()> {
        for (s, l) in self.levels.iter().enumerate() {
            if l.centers.len() > self.eta.budget(s) {
                return Err(Error::InvalidParameter(format!(
                    "level {s} has {} centers, budget {}",
                    l.centers.len(),
                    self.eta.budget(s)
                )));
            }
            if l.assign.len() != self.points.len() || l.assign.iter().any(|&a| a >= l.centers.len()) {
                return Err(Error::InvalidParameter(format!("level {s} has a bad assignment")));
            }
        }
        if self.eta.value(0) == 0.0 && self.levels.first().is_some_and(|l| l.centers.len() != 1) {
            return invalid("|T_0| must be 1 when eta_0 = 0");
        }
        Ok(())
    }
}

/// Farthest-point order of `points` under `metric`, starting at index 0.
pub fn farthest_point_order(points: &[Vec<f64>], metric: &Metric) -> Vec<usize> {
    let m = points.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order = vec![0usize];
    let mut gap: Vec<f64> = points.iter().map(|p| metric.distance(p, &points[0])).collect();
    let mut used = vec![false; m];
    used[0] = true;
    while order.len() < m {
        let (next, _) = gap
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .fold((usize::MAX, -1.0), |acc, (i, &g)| if g > acc.1 { (i, g) } else { acc });
        used[next] = true;
        order.push(next);
        for (i, p) in points.iter().enumerate() {
            gap[i] = gap[i].min(metric.distance(p, &points[next]));
        }
    }
    order
}

/// Nearest center index (earliest on ties).
pub(crate) fn nearest(metric: &Metric, p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = metric.distance(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// A feasible sequence: level s holds the first ⌊2^{η_s}⌋ points of the
/// farthest-point order, π_s is the nearest center. Levels are added until
/// the last one contains every point.
pub fn greedy_admissible(points: &[Vec<f64>], metric: Metric, eta: EtaSequence) -> Result<AdmissibleSequence> {
    if points.is_empty() {
        return invalid("index set is empty");
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return invalid("index set vectors have different dimensions");
    }
    let mut eta = eta;
    let order = farthest_point_order(points, &metric);
    let mut levels = Vec::new();
    let mut s = 0;
    loop {
        if s >= eta.len() {
            eta.extend_to(s + 1);
        }
        let k = eta.budget(s).clamp(1, points.len());
        let centers: Vec<Vec<f64>> = order[..k].iter().map(|&i| points[i].clone()).collect();
        let assign = points.iter().map(|p| nearest(&metric, p, &centers)).collect();
        levels.push(Level { centers, assign });
        s += 1;
        if k == points.len() && s >= eta.len() {
            break;
        }
    }
    eta.values.truncate(levels.len());
    Ok(AdmissibleSequence {
        points: points.to_vec(),
        levels,
        metric,
        eta,
    })
}

/// Standard schedule long enough for |T| points.
pub fn standard_eta_for(count: usize) -> EtaSequence {
    make_eta(EtaKind::Standard, (count.max(2) as f64).log2()).expect("standard schedule is valid")
}

/// sup_t Σ_s 2^{s/β} d(t, T_s) along the given sequence; levels past the
/// stored ones are taken to be T itself.
pub fn gamma_beta_value(a: &AdmissibleSequence, beta: f64) -> Result<f64> {
    if !a.eta.is_standard() {
        return Err(Error::Unsupported("gamma_beta weights presume the standard schedule".into()));
    }
    if beta <= 0.0 {
        return invalid(format!("beta must be positive, got {beta}"));
    }
    let mut best = 0.0f64;
    for t in 0..a.points.len() {
        let v: f64 = (0..a.len())
            .map(|s| 2f64.powf(s as f64 / beta) * a.dist_to_level(t, s))
            .sum();
        best = best.max(v);
    }
    Ok(best)
}

pub const BRUTEFORCE_MAX_POINTS: usize = 6;
pub const BRUTEFORCE_MAX_LEVELS: usize = 3;

/// Exact min over all level choices T_s ⊂ T with |T_s| ≤ 2^{2^s} (|T₀| = 1)
/// of sup_t Σ_s 2^{s/β} d(t, T_s). Levels whose budget covers T are T
/// itself; the levels before that are enumerated and must number at most
/// `max_levels + 1`.
pub fn gamma_beta_bruteforce(points: &[Vec<f64>], metric: &Metric, beta: f64, max_levels: usize) -> Result<f64> {
    let m = points.len();
    if m == 0 {
        return invalid("index set is empty");
    }
    if m > BRUTEFORCE_MAX_POINTS || max_levels > BRUTEFORCE_MAX_LEVELS {
        return Err(Error::SizeLimit(format!(
            "brute force handles |T| ≤ {BRUTEFORCE_MAX_POINTS} and max_levels ≤ {BRUTEFORCE_MAX_LEVELS}"
        )));
    }
    let eta = make_eta(EtaKind::Standard, 8.0).expect("valid");
    let cover = (0..).find(|&s| eta.budget(s) >= m).expect("budget grows");
    if cover > max_levels + 1 {
        return Err(Error::SizeLimit(format!(
            "|T| = {m} needs {cover} enumerated levels, above max_levels + 1 = {}",
            max_levels + 1
        )));
    }
    let dist: Vec<Vec<f64>> = points
        .iter()
        .map(|a| points.iter().map(|b| metric.distance(a, b)).collect())
        .collect();
    // Candidate subsets for each enumerated level, as bitmasks.
    let subsets: Vec<Vec<u32>> = (0..cover)
        .map(|s| {
            let cap = if s == 0 { 1 } else { eta.budget(s).min(m) };
            (1u32..(1 << m)).filter(|mask| mask.count_ones() as usize <= cap).collect()
        })
        .collect();
    // per-level contribution vectors: cost[s][subset][t]
    let contrib: Vec<Vec<Vec<f64>>> = subsets
        .iter()
        .enumerate()
        .map(|(s, subs)| {
            let w = 2f64.powf(s as f64 / beta);
            subs.iter()
                .map(|&mask| {
                    (0..m)
                        .map(|t| {
                            w * (0..m)
                                .filter(|c| mask & (1 << c) != 0)
                                .map(|c| dist[t][c])
                                .fold(f64::INFINITY, f64::min)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut best = f64::INFINITY;
    let mut acc = vec![0.0; m];
    search(&contrib, 0, &mut acc, &mut best);
    Ok(best)
}

fn search(contrib: &[Vec<Vec<f64>>], s: usize, acc: &mut Vec<f64>, best: &mut f64) {
    if s == contrib.len() {
        let v = acc.iter().copied().fold(0.0, f64::max);
        if v < *best {
            *best = v;
        }
        return;
    }
    for c in &contrib[s] {
        let saved = acc.clone();
        for (a, x) in acc.iter_mut().zip(c) {
            *a += x;
        }
        if acc.iter().copied().fold(0.0, f64::max) < *best {
            search(contrib, s + 1, acc, best);
        }
        *acc = saved;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton() {
        let p = vec![vec![0.3, -1.0]];
        let a = greedy_admissible(&p, Metric::L2, standard_eta_for(1)).unwrap();
        for s in 0..a.len() {
            assert_eq!(a.pi(s, 0), p[0].as_slice());
            if s > 0 {
                assert!(a.increment(s, 0).iter().all(|x| *x == 0.0));
            }
        }
        assert_eq!(gamma_beta_value(&a, 2.0).unwrap(), 0.0);
        assert_eq!(gamma_beta_bruteforce(&p, &Metric::L2, 2.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn two_points() {
        let p = vec![vec![0.0, 0.0], vec![0.6, 0.8]];
        let a = greedy_admissible(&p, Metric::L2, standard_eta_for(2)).unwrap();
        assert_eq!(a.levels[0].centers.len(), 1);
        assert_eq!(a.levels[1].centers.len(), 2);
        assert!((gamma_beta_value(&a, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((gamma_beta_bruteforce(&p, &Metric::L2, 2.0, 1).unwrap() - 1.0).abs() < 1e-12);
        a.validate().unwrap();
    }

    #[test]
    fn identity_once_budget_covers() {
        let p: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let a = greedy_admissible(&p, Metric::L2, standard_eta_for(7)).unwrap();
        for s in 0..a.len() {
            if a.eta.budget(s) >= 7 {
                for t in 0..7 {
                    assert_eq!(a.pi(s, t), p[t].as_slice());
                }
            }
            if s > 0 {
                for t in 0..7 {
                    assert!(a.chain_error(t, s) <= a.chain_error(t, s - 1));
                }
            }
        }
        assert!(gamma_beta_value(&a, 2.0).unwrap() >= (0..7).map(|t| a.dist_to_level(t, 0)).fold(0.0, f64::max));
    }

    #[test]
    fn bruteforce_limits() {
        let p: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64]).collect();
        assert!(matches!(
            gamma_beta_bruteforce(&p, &Metric::L2, 2.0, 3),
            Err(Error::SizeLimit(_))
        ));
        // five points need levels 0 and 1 enumerated
        assert!(gamma_beta_bruteforce(&p[..5], &Metric::L2, 2.0, 0).is_err());
        assert!(gamma_beta_bruteforce(&p[..5], &Metric::L2, 2.0, 1).is_ok());
    }

    #[test]
    fn proxy_metric() {
        let m = Metric::Psi2Proxy {
            m_ell: vec![1.0, 2.0, 3.0],
        };
        assert_eq!(m.norm(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(m.norm(&[0.5, 0.0, -0.25]), 0.5 * 2.0);
        assert_eq!(m.distance(&[1.0, 1.0, 1.0], &[1.0, 0.0, 1.0]), 1.0);
    }

    #[test]
    fn gamma_needs_standard_schedule() {
        let p = vec![vec![0.0], vec![1.0]];
        let eta = make_eta(
            EtaKind::Ball {
                n: 4,
                s1: 1,
                kappa4: 10.0,
            },
            10.0,
        )
        .unwrap();
        let a = greedy_admissible(&p, Metric::L2, eta).unwrap();
        assert!(gamma_beta_value(&a, 2.0).is_err());
    }
}
