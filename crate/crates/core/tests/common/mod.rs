//! Oracles and property checks shared by the property suite and the
//! acceptance run. Each check returns `Err(message)` on the first failure.

#![allow(dead_code)]

use heavychain::chaining::admissible::{
    gamma_beta_bruteforce, gamma_beta_value, greedy_admissible, standard_eta_for, Metric, BRUTEFORCE_MAX_LEVELS,
};
use heavychain::chaining::bernoulli::bernoulli_sup_mc;
use heavychain::chaining::decomposition::{verify_decomposition, DecompositionSpec};
use heavychain::chaining::eta::{make_eta, EtaKind};
use heavychain::chaining::phi::{phi_aggregates, PhiFamily};
use heavychain::chaining::tail::{tail_functional, QuantileTable, TailSource};
use heavychain::experiments::omega_events::{omega_setup, omega_trial};
use heavychain::experiments::{ExperimentConfig, ExperimentKind, Summary};
use heavychain::linalg::{extreme_singulars, extreme_singulars_of, op_norm_deviation, quadratic_sup_finite, sample_covariance, symmetric_eigenvalues, CovMatrix, Matrix};
use heavychain::norms::{
    lp_norm, m_ell_estimate, moment_grid, p_norm_local, psi_alpha_estimate, sorted_square_prefix, top_k_l2,
    weak_lp_norm,
};
use heavychain::samplers::{coupon_all_hit_inclusion_exclusion, sample_matrix, DistributionSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = fn() -> Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    let cfg = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| match e {
        TestError::Fail(why, value) => format!("{why} for input {value:?}"),
        TestError::Abort(why) => format!("aborted: {why}"),
    })
}

fn vec_strategy(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

// ---- oracles ----

/// s_min and s_max of A by power iteration on AᵀA and on s_max²I − AᵀA.
pub fn power_method_singulars(a: &Matrix) -> (f64, f64) {
    let n = a.cols;
    let g = a.gram();
    let apply = |v: &[f64], shift: f64| -> Vec<f64> {
        (0..n)
            .map(|i| shift * v[i] - (0..n).map(|j| g[i * n + j] * v[j]).sum::<f64>())
            .collect()
    };
    let top = |f: &dyn Fn(&[f64]) -> Vec<f64>| -> f64 {
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let mut lambda = 0.0;
        for _ in 0..200_000 {
            let w = f(&v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let next: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / v.iter().map(|x| x * x).sum::<f64>();
            v = w.iter().map(|x| x / norm).collect();
            if (next - lambda).abs() <= 1e-15 * next.abs() {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda
    };
    let l_max = -top(&|v| apply(v, 0.0));
    let l_max = l_max.abs();
    let shifted = top(&|v| apply(v, l_max));
    ((l_max - shifted).max(0.0).sqrt(), l_max.sqrt())
}

/// (a) extreme singular values against the power-method oracle.
pub fn singulars_match_power_method(count: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let data: Vec<f64> = (0..60).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = Matrix::new(12, 5, data).map_err(|e| e.to_string())?;
        let s = extreme_singulars(&a).map_err(|e| e.to_string())?;
        let (lo, hi) = power_method_singulars(&a);
        if (s.s_max - hi).abs() > 1e-6 || (s.s_min - lo).abs() > 1e-6 {
            return Err(format!("matrix {i}: jacobi ({}, {}) vs power ({lo}, {hi})", s.s_min, s.s_max));
        }
    }
    Ok(())
}

/// The three decomposition conditions checked over every subset I.
pub fn decomposition_by_subsets(d: &DecompositionSpec, f: &PhiFamily) -> bool {
    let big_n = d.big_n();
    let dd = d.d();
    let phi = |k: usize| f.at(k);
    let ok = |lhs: f64, rhs: f64| lhs <= rhs + 1e-12 * rhs.abs().max(lhs.abs());
    for (v, vec) in d.vectors().iter().enumerate() {
        if !ok(d.theta[v].iter().sum(), d.gamma) {
            return false;
        }
        let incs: Vec<Vec<f64>> = (0..d.admissible.len()).map(|s| d.admissible.increment(s, v)).collect();
        for mask in 1u32..(1 << big_n) {
            let k = mask.count_ones() as usize;
            let sum = |w: &[f64]| -> f64 {
                (0..big_n).filter(|i| mask >> i & 1 == 1).map(|i| w[i] * w[i]).sum::<f64>().sqrt()
            };
            if !ok(sum(vec), d.alpha * (d.gamma + dd * phi(k))) {
                return false;
            }
            for (s, inc) in incs.iter().enumerate() {
                let rhs = if d.admissible.eta.value(s) >= big_n as f64 {
                    d.alpha * d.theta[v][s]
                } else {
                    d.alpha * (d.theta[v][s] + d.increment_norms[v][s] * phi(k))
                };
                if !ok(sum(inc), rhs) {
                    return false;
                }
            }
        }
    }
    true
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A random decomposition of a few vectors in R^N, with α and γ drawn so
/// that both outcomes occur.
pub fn random_decomposition(rng: &mut ChaCha8Rng, big_n: usize) -> (DecompositionSpec, PhiFamily) {
    let m = rng.random_range(2..=4);
    let pts: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..big_n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let a = greedy_admissible(&pts, Metric::L2, standard_eta_for(m)).expect("valid set");
    let levels = a.len();
    let theta: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..levels).map(|_| rng.random_range(0.0..1.5)).collect())
        .collect();
    let inc_norms: Vec<Vec<f64>> = (0..m)
        .map(|v| (0..levels).map(|s| l2(&a.increment(s, v)) * rng.random_range(0.0..1.2)).collect())
        .collect();
    let vec_norms: Vec<f64> = pts.iter().map(|p| l2(p) * rng.random_range(0.2..1.2)).collect();
    let max_theta = theta.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    let gamma = max_theta * rng.random_range(0.9..1.5);
    let alpha = rng.random_range(0.3..2.0);
    let f = if rng.random::<bool>() {
        PhiFamily::beta(rng.random_range(0.5..2.0), big_n).expect("valid")
    } else {
        PhiFamily::lq(6.0, rng.random_range(0.0..1.5), big_n).expect("valid")
    };
    let d = DecompositionSpec::new(a, theta, inc_norms, vec_norms, alpha, gamma).expect("valid");
    (d, f)
}

/// (b) top-k reduction against subset enumeration. Returns how many
/// instances held, so callers can see both outcomes were exercised.
pub fn decomposition_matches_subsets(count: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut held = 0;
    for i in 0..count {
        let big_n = rng.random_range(2..=12);
        let (d, f) = random_decomposition(&mut rng, big_n);
        let fast = verify_decomposition(&d, &f).holds;
        let slow = decomposition_by_subsets(&d, &f);
        if fast != slow {
            return Err(format!("instance {i} (N = {big_n}): top-k says {fast}, subsets say {slow}"));
        }
        held += usize::from(fast);
    }
    Ok(held)
}

/// (c) greedy γ ≥ brute-force γ on 5-point sets, equality on two-point sets.
pub fn greedy_dominates_bruteforce(count: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let pts: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        for (metric, beta) in [(Metric::L2, 2.0), (Metric::LInf, 1.0)] {
            let g = gamma_beta_value(&greedy_admissible(&pts, metric.clone(), standard_eta_for(5)).unwrap(), beta).unwrap();
            let b = gamma_beta_bruteforce(&pts, &metric, beta, BRUTEFORCE_MAX_LEVELS).unwrap();
            if g < b * (1.0 - 1e-12) {
                return Err(format!("set {i}: greedy {g} < brute force {b}"));
            }
        }
        let two = &pts[..2];
        let g = gamma_beta_value(&greedy_admissible(two, Metric::L2, standard_eta_for(2)).unwrap(), 2.0).unwrap();
        let b = gamma_beta_bruteforce(two, &Metric::L2, 2.0, BRUTEFORCE_MAX_LEVELS).unwrap();
        if (g - b).abs() > 1e-12 * b.max(1.0) {
            return Err(format!("two-point set {i}: greedy {g} ≠ brute force {b}"));
        }
    }
    Ok(())
}

// ---- property checks ----

pub fn phi_increasing() -> Result<(), String> {
    let beta = (0.1f64..4.0, 2usize..3000, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(b, n, x, y)| (b, n, x.min(y), x.max(y)));
    run(256, beta, |(b, n, lo, hi)| {
        let f = PhiFamily::beta(b, n).unwrap();
        // φ_β increases up to N·e^{1−2/β} and may turn down after it
        let top = (n as f64 * (1.0 - 2.0 / b).exp()).min(n as f64);
        prop_assume!(top > 1.0);
        let (x, y) = (1.0 + lo * (top - 1.0), 1.0 + hi * (top - 1.0));
        prop_assert!(f.eval(x).unwrap() <= f.eval(y).unwrap() * (1.0 + 1e-12));
        Ok(())
    })?;
    let lq = (2.05f64..12.0, 0.0f64..1.0, 2usize..3000, 0.0f64..1.0, 0.0f64..1.0);
    run(256, lq, |(q, e, n, a, b)| {
        let eps = e * (q / 2.0 - 1.0) * 0.999;
        let f = PhiFamily::lq(q, eps, n).unwrap();
        let nf = n as f64;
        let (x, y) = (1.0 + a.min(b) * (nf - 1.0), 1.0 + a.max(b) * (nf - 1.0));
        prop_assert!(f.eval(x).unwrap() <= f.eval(y).unwrap() * (1.0 + 1e-12));
        Ok(())
    })
}

pub fn phi_level_aggregates_bounded() -> Result<(), String> {
    let s = (0.3f64..3.0, 4usize..2000, prop::bool::ANY, 10.0f64..30.0, 0u32..3);
    run(128, s, |(b, n, standard, k4, s1)| {
        let f = PhiFamily::beta(b, n).unwrap();
        let kind = if standard {
            EtaKind::Standard
        } else {
            EtaKind::Ball {
                n: 64,
                s1,
                kappa4: k4,
            }
        };
        let eta = make_eta(kind, n as f64).unwrap();
        let agg = phi_aggregates(&f, &eta);
        for v in agg.per_level.iter().flatten() {
            prop_assert!(*v <= agg.big_phi * (1.0 + 1e-12), "{v} > {}", agg.big_phi);
        }
        Ok(())
    })
}

fn table_strategy() -> impl Strategy<Value = (TailSource, usize, f64)> {
    let src = prop_oneof![
        Just(TailSource::Laplace),
        Just(TailSource::Gaussian),
        Just(TailSource::Rademacher),
        (2.5f64..10.0).prop_map(|nu| TailSource::StudentT {
            nu,
            scale: ((nu - 2.0) / nu).sqrt()
        }),
        (0.5f64..3.0, 3.0f64..8.0).prop_map(|(norm, q)| TailSource::Lq { norm, q }),
    ];
    (src, 4usize..500, 0.05f64..1.5)
}

pub fn tail_functionals_monotone() -> Result<(), String> {
    let s = (table_strategy(), 1.0f64..6.0, 0.5f64..5.0, 0.0f64..1.0, 0.0f64..1.0, 1.0f64..3.0);
    run(256, s, |((src, n, eps), u, k3, a, b, scale)| {
        let table = QuantileTable::build(&src, n, eps).unwrap();
        let other = QuantileTable::build(&TailSource::Laplace, n, eps).unwrap().scaled(scale);
        let class = QuantileTable::pointwise_max([&table, &other]);
        let k1 = 1 + (a.min(b) * (n - 1) as f64) as usize;
        let k2 = 1 + (a.max(b) * (n - 1) as f64) as usize;
        let f = |k: usize, t: &QuantileTable, c: f64| tail_functional(k, u, t, c).unwrap();
        prop_assert!(f(k1, &table, k3) <= f(k2, &table, k3) * (1.0 + 1e-12));
        prop_assert!(f(k1, &class, k3) <= f(k2, &class, k3) * (1.0 + 1e-12));
        prop_assert!(f(k1, &table, k3) <= f(k1, &table, k3 * scale) * (1.0 + 1e-12));
        prop_assert!(f(k2, &table, k3) <= f(k2, &class, k3) * (1.0 + 1e-12));
        Ok(())
    })
}

pub fn top_k_additive() -> Result<(), String> {
    run(256, (vec_strategy(1..=40), 0.0f64..1.0), |(v, a)| {
        let k = 1 + (a * (v.len() - 1) as f64) as usize;
        let pre = sorted_square_prefix(&v);
        let total: f64 = v.iter().map(|x| x * x).sum();
        let head = top_k_l2(&v, k).unwrap().powi(2);
        let tail = pre[v.len()] - pre[k];
        prop_assert!((head + tail - total).abs() <= 1e-10 * total.max(1.0));
        Ok(())
    })
}

pub fn top_k_matches_subsets() -> Result<(), String> {
    run(128, (vec_strategy(1..=10), 0.0f64..1.0), |(v, a)| {
        let k = 1 + (a * (v.len() - 1) as f64) as usize;
        let best = (0u32..1 << v.len())
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..v.len()).filter(|i| m >> i & 1 == 1).map(|i| v[i] * v[i]).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt();
        prop_assert!((top_k_l2(&v, k).unwrap() - best).abs() <= 1e-12 * best.max(1.0));
        Ok(())
    })
}

pub fn weak_norm_below_lp() -> Result<(), String> {
    run(256, (vec_strategy(1..=50), 0.5f64..8.0), |(v, p)| {
        prop_assert!(weak_lp_norm(&v, p) <= lp_norm(&v, p) * (1.0 + 1e-12));
        Ok(())
    })
}

pub fn psi_two_dominates_local_norm() -> Result<(), String> {
    run(64, (any::<u64>(), 2.0f64..5.0), |(seed, p)| {
        let z = heavychain::samplers::sample_scalar(&DistributionSpec::student_t(6.0, 8.0), 2000, seed).unwrap();
        let grid: Vec<f64> = moment_grid(7.0);
        let local: Vec<f64> = grid.iter().copied().filter(|&q| q <= p).collect();
        let psi = psi_alpha_estimate(&z, 2.0, &grid).unwrap().value;
        let loc = p_norm_local(&z, p, &local).unwrap().value;
        prop_assert!(psi >= loc);
        Ok(())
    })
}

pub fn m_ell_full_is_max_row_norm() -> Result<(), String> {
    run(64, (any::<u64>(), 1usize..12, 1usize..30), |(seed, n, rows)| {
        let x = sample_matrix(&DistributionSpec::laplace(), rows, n, seed).unwrap();
        let m = m_ell_estimate(&x, n).unwrap().value;
        let direct = x.rows().map(l2).fold(0.0, f64::max);
        prop_assert!((m - direct).abs() <= 1e-12 * direct.max(1.0));
        Ok(())
    })
}

fn symmetric_specs() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        Just(DistributionSpec::gaussian()),
        Just(DistributionSpec::rademacher()),
        Just(DistributionSpec::laplace()),
        Just(DistributionSpec::student_t(6.0, 8.0)),
        Just(DistributionSpec::sym_pareto(4.5, 6.0)),
        Just(DistributionSpec::lp_ball(1.0)),
        Just(DistributionSpec::gaussian().truncated(3.0, 2.0)),
    ]
}

pub fn sign_flips_preserve_statistics() -> Result<(), String> {
    run(64, (symmetric_specs(), any::<u64>(), 2usize..8, 0usize..8), |(spec, seed, n, j)| {
        let x = sample_matrix(&spec, 3 * n, n, seed).unwrap();
        let mut y = x.clone();
        y.flip_column(j % n);
        let (a, b) = (extreme_singulars_of(&x).unwrap(), extreme_singulars_of(&y).unwrap());
        prop_assert!((a.s_max - b.s_max).abs() <= 1e-9 * a.s_max.max(1.0));
        prop_assert!((a.s_min - b.s_min).abs() <= 1e-9 * a.s_max.max(1.0));
        for (r, s) in x.rows().zip(y.rows()) {
            prop_assert_eq!(lp_norm(r, 3.0), lp_norm(s, 3.0));
        }
        Ok(())
    })
}

pub fn sampling_is_deterministic() -> Result<(), String> {
    run(64, (symmetric_specs(), any::<u64>(), 1usize..6, 1usize..20), |(spec, seed, n, rows)| {
        prop_assert_eq!(sample_matrix(&spec, rows, n, seed).unwrap(), sample_matrix(&spec, rows, n, seed).unwrap());
        Ok(())
    })
}

pub fn singular_values_consistent() -> Result<(), String> {
    let s = (1usize..7, 0usize..6, prop::collection::vec(-3.0f64..3.0, 100), 0.01f64..50.0);
    run(128, s, |(n, extra, data, c)| {
        let rows = n + extra;
        let a = Matrix::new(rows, n, data[..rows * n].to_vec()).unwrap();
        let ev = symmetric_eigenvalues(a.gram(), n).unwrap();
        let fro: f64 = a.data.iter().map(|x| x * x).sum();
        let sum_sq: f64 = ev.iter().sum();
        prop_assert!((sum_sq - fro).abs() <= 1e-8 * fro.max(1e-300));
        let s = extreme_singulars(&a).unwrap();
        let (lo, hi) = power_method_singulars(&a);
        prop_assert!((s.s_max - hi).abs() <= 1e-6 * hi.max(1.0));
        prop_assert!((s.s_min - lo).abs() <= 1e-6 * hi.max(1.0));
        let sc = extreme_singulars(&a.scaled(c)).unwrap();
        prop_assert!((sc.s_max - c * s.s_max).abs() <= 1e-10 * (c * s.s_max).max(1e-300));
        prop_assert!((sc.s_min - c * s.s_min).abs() <= 1e-9 * (c * s.s_max).max(1e-300));
        Ok(())
    })
}

pub fn schedules_valid() -> Result<(), String> {
    run(128, (2usize..4096, 0u32..6, 10.0f64..30.0, 1.0f64..5000.0), |(n, s1, k4, cap)| {
        prop_assume!(2f64.powi(s1 as i32) <= n as f64);
        let std = make_eta(EtaKind::Standard, cap).unwrap();
        prop_assert!(std.validate().is_ok());
        prop_assert!(std.growth_violations().is_empty());
        let ball = make_eta(EtaKind::Ball { n, s1, kappa4: k4 }, cap).unwrap();
        prop_assert!(ball.validate().is_ok());
        prop_assert!(ball.values.windows(2).all(|w| w[1] > w[0]));
        Ok(())
    })
}

pub fn bernoulli_mc_matches_enumeration() -> Result<(), String> {
    let s = (1usize..4, 2usize..10, any::<u64>(), prop::collection::vec(-2.0f64..2.0, 40));
    run(48, s, |(m, n, seed, data)| {
        let v: Vec<Vec<f64>> = (0..m).map(|i| data[i * n..(i + 1) * n].to_vec()).collect();
        let exact = Summary::of(&bernoulli_sup_mc(&v, 0, seed).unwrap()).mean;
        let mc = Summary::of(&bernoulli_sup_mc(&v, 4000, seed).unwrap());
        prop_assert!((mc.mean - exact).abs() <= 3.0 * mc.stderr + 1e-12, "exact {exact}, mc {} ± {}", mc.mean, mc.stderr);
        Ok(())
    })
}

pub fn decomposition_top_k_exact() -> Result<(), String> {
    run(64, any::<u64>(), |seed| {
        let r = decomposition_matches_subsets(3, seed);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
        Ok(())
    })
}

pub fn greedy_gamma_upper_bound() -> Result<(), String> {
    run(32, any::<u64>(), |seed| {
        let r = greedy_dominates_bruteforce(2, seed);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
        Ok(())
    })
}

pub fn good_event_implies_bounds() -> Result<(), String> {
    let s = (any::<u64>(), prop::sample::select(vec![(8usize, 16usize), (8, 32), (16, 32)]), prop::sample::select(vec![1.0, 2.0, 8.0]));
    run(12, s, |(seed, (n, big_n), u)| {
        let mut cfg = ExperimentConfig::new(ExperimentKind::OmegaEvents, DistributionSpec::student_t(6.0, 8.0), 1, seed);
        cfg.params.u = u;
        cfg.params.directions = Some(5);
        cfg.params.calibration_rows = Some(3000);
        let setup = omega_setup(&cfg, n, big_n).unwrap();
        for t in 0..8 {
            let r = omega_trial(&setup, big_n, u, cfg.params.kappa3, seed ^ t).unwrap();
            if r[3] == 1.0 {
                prop_assert_eq!(r[4], 1.0);
                prop_assert_eq!(r[5], 1.0);
            }
        }
        Ok(())
    })
}

pub fn summaries_ordered() -> Result<(), String> {
    run(256, prop::collection::vec(-1e3f64..1e3, 1..60), |v| {
        let s = Summary::of(&v);
        prop_assert!(s.min <= s.q05 && s.q05 <= s.median && s.median <= s.q95 && s.q95 <= s.max);
        prop_assert_eq!(s.count, v.len());
        Ok(())
    })
}

/// Missing-coordinate frequency for the coordinate law against the exact
/// occupancy probability.
pub fn coupon_frequency_matches_exact() -> Result<(), String> {
    let (n, trials) = (10usize, 3000usize);
    let exact_missing = 1.0 - coupon_all_hit_inclusion_exclusion(n, n);
    let mut missing = 0usize;
    for t in 0..trials {
        let x = sample_matrix(&DistributionSpec::coordinate(), n, n, 1000 + t as u64).map_err(|e| e.to_string())?;
        let hit = (0..n).filter(|&j| (0..n).any(|i| x.get(i, j) != 0.0)).count();
        missing += usize::from(hit < n);
    }
    let p = missing as f64 / trials as f64;
    let se = (exact_missing * (1.0 - exact_missing) / trials as f64).sqrt();
    if (p - exact_missing).abs() > 3.0 * se {
        return Err(format!("missing frequency {p} vs exact {exact_missing} (se {se})"));
    }
    Ok(())
}

/// On a fine net of S², the finite quadratic supremum approaches the
/// spectral deviation.
pub fn net_approaches_spectral_deviation() -> Result<(), String> {
    let x = sample_matrix(&DistributionSpec::gaussian(), 40, 3, 5).map_err(|e| e.to_string())?;
    let m = 10_000;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let net: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let th = golden * i as f64;
            vec![r * th.cos(), r * th.sin(), z]
        })
        .collect();
    let sup = quadratic_sup_finite(&x, &net, None).map_err(|e| e.to_string())?;
    let exact = op_norm_deviation(&sample_covariance(&x), &CovMatrix::identity(3)).map_err(|e| e.to_string())?;
    if sup > exact * (1.0 + 1e-12) || sup < 0.95 * exact {
        return Err(format!("net sup {sup} vs spectral {exact}"));
    }
    Ok(())
}

pub const ALL: &[(&str, Check)] = &[
    ("phi_increasing", phi_increasing),
    ("phi_level_aggregates_bounded", phi_level_aggregates_bounded),
    ("tail_functionals_monotone", tail_functionals_monotone),
    ("top_k_additive", top_k_additive),
    ("top_k_matches_subsets", top_k_matches_subsets),
    ("weak_norm_below_lp", weak_norm_below_lp),
    ("psi_two_dominates_local_norm", psi_two_dominates_local_norm),
    ("m_ell_full_is_max_row_norm", m_ell_full_is_max_row_norm),
    ("sign_flips_preserve_statistics", sign_flips_preserve_statistics),
    ("sampling_is_deterministic", sampling_is_deterministic),
    ("singular_values_consistent", singular_values_consistent),
    ("schedules_valid", schedules_valid),
    ("bernoulli_mc_matches_enumeration", bernoulli_mc_matches_enumeration),
    ("decomposition_top_k_exact", decomposition_top_k_exact),
    ("greedy_gamma_upper_bound", greedy_gamma_upper_bound),
    ("good_event_implies_bounds", good_event_implies_bounds),
    ("summaries_ordered", summaries_ordered),
    ("coupon_frequency_matches_exact", coupon_frequency_matches_exact),
    ("net_approaches_spectral_deviation", net_approaches_spectral_deviation),
];
