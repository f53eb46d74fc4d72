//! Scalar and row-vector laws: gaussian, Rademacher, heavy-tailed
//! Student-t and symmetric Pareto, Laplace, uniform on an ℓ_p ball, and the
//! scaled coordinate measure. Rows can be conditioned to an ℓ_p ball by
//! rejection.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::norms::lp_norm;
use crate::seed::{mix_seed, rng_from};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Gaussian,
    Rademacher,
    StudentT,
    SymPareto,
    LaplaceExponential,
    LpBallUniform,
    CoordinateMeasure,
}

impl DistributionKind {
    pub fn is_scalar(self) -> bool {
        !matches!(self, Self::LpBallUniform | Self::CoordinateMeasure)
    }

    pub fn is_symmetric(self) -> bool {
        // Every supported law is symmetric; kept as a method so callers can
        // ask instead of assuming.
        true
    }

    /// Unconditional log-concave laws (after isotropic normalization).
    pub fn is_log_concave(self, p: Option<f64>) -> bool {
        match self {
            Self::Gaussian | Self::LaplaceExponential => true,
            Self::LpBallUniform => p.is_some_and(|p| p >= 1.0),
            _ => false,
        }
    }
}

/// A named law. `q` is the moment exponent of interest, `nu` the degrees of
/// freedom (Student-t) or tail index (Pareto), `p` the ball exponent for
/// `lp_ball_uniform` or the truncation exponent otherwise, `kappa1` the
/// truncation radius factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa1: Option<f64>,
    #[serde(default = "default_true")]
    pub standardized: bool,
}

fn default_true() -> bool {
    true
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind) -> Self {
        Self {
            kind,
            q: None,
            nu: None,
            p: None,
            kappa1: None,
            standardized: true,
        }
    }

    pub fn gaussian() -> Self {
        Self::new(DistributionKind::Gaussian)
    }

    pub fn rademacher() -> Self {
        Self::new(DistributionKind::Rademacher)
    }

    pub fn laplace() -> Self {
        Self::new(DistributionKind::LaplaceExponential)
    }

    pub fn coordinate() -> Self {
        Self::new(DistributionKind::CoordinateMeasure)
    }

    /// Student-t with `nu` degrees of freedom, tracked moment `q < nu`.
    pub fn student_t(q: f64, nu: f64) -> Self {
        Self {
            q: Some(q),
            nu: Some(nu),
            ..Self::new(DistributionKind::StudentT)
        }
    }

    pub fn sym_pareto(q: f64, tail_index: f64) -> Self {
        Self {
            q: Some(q),
            nu: Some(tail_index),
            ..Self::new(DistributionKind::SymPareto)
        }
    }

    pub fn lp_ball(p: f64) -> Self {
        Self {
            p: Some(p),
            ..Self::new(DistributionKind::LpBallUniform)
        }
    }

    pub fn truncated(mut self, p: f64, kappa1: f64) -> Self {
        self.p = Some(p);
        self.kappa1 = Some(kappa1);
        self
    }

    /// Degrees of freedom / tail index, defaulting to `q + 2`.
    pub fn shape(&self) -> Option<f64> {
        self.nu.or(self.q.map(|q| q + 2.0))
    }

    /// Truncation exponent and radius factor, if the law is conditioned.
    pub fn truncation(&self) -> Option<(f64, f64)> {
        match (self.kind, self.p, self.kappa1) {
            (DistributionKind::LpBallUniform, _, _) => None,
            (_, Some(p), Some(k)) => Some((p, k)),
            _ => None,
        }
    }

    /// The same law without the truncation.
    pub fn untruncated(&self) -> Self {
        let mut s = self.clone();
        s.kappa1 = None;
        s
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DistributionKind::StudentT => {
                let nu = self
                    .shape()
                    .ok_or_else(|| Error::InvalidParameter("student_t needs q or nu".into()))?;
                if nu <= 2.0 {
                    return invalid(format!("student_t needs nu > 2 for finite variance, got {nu}"));
                }
                if let Some(q) = self.q {
                    if q >= nu {
                        return invalid(format!(
                            "student_t moment q = {q} must be below nu = {nu}"
                        ));
                    }
                    if q <= 2.0 {
                        return invalid(format!("tail exponent q must exceed 2, got {q}"));
                    }
                }
            }
            DistributionKind::SymPareto => {
                let a = self
                    .shape()
                    .ok_or_else(|| Error::InvalidParameter("sym_pareto needs q or nu".into()))?;
                if a <= 2.0 {
                    return invalid(format!("sym_pareto needs tail index > 2, got {a}"));
                }
                if let Some(q) = self.q {
                    if q >= a {
                        return invalid(format!(
                            "sym_pareto moment q = {q} must be below the tail index {a}"
                        ));
                    }
                    if q <= 2.0 {
                        return invalid(format!("tail exponent q must exceed 2, got {q}"));
                    }
                }
            }
            DistributionKind::LpBallUniform => {
                let p = self
                    .p
                    .ok_or_else(|| Error::InvalidParameter("lp_ball_uniform needs p".into()))?;
                if !(p > 0.0 && p.is_finite()) {
                    return invalid(format!("ball exponent must be positive, got {p}"));
                }
                if self.kappa1.is_some() {
                    return Err(Error::Unsupported(
                        "truncation of lp_ball_uniform (p is the ball exponent)".into(),
                    ));
                }
            }
            _ => {}
        }
        if let Some((p, k)) = self.truncation() {
            if p <= 2.0 {
                return invalid(format!("truncation exponent p must exceed 2, got {p}"));
            }
            if k <= 0.0 {
                return invalid(format!("kappa1 must be positive, got {k}"));
            }
        }
        Ok(())
    }

    /// Analytic ‖ξ‖_{L_r} of one (standardized) coordinate, when known.
    pub fn coordinate_lr_norm(&self, r: f64) -> Option<f64> {
        let scale = self.scalar_scale();
        let m = match self.kind {
            DistributionKind::Gaussian => {
                // E|g|^r = 2^{r/2} Γ((r+1)/2) / √π
                ((r / 2.0) * 2f64.ln() + ln_gamma((r + 1.0) / 2.0)
                    - 0.5 * std::f64::consts::PI.ln())
                .exp()
            }
            DistributionKind::Rademacher => 1.0,
            DistributionKind::LaplaceExponential => {
                // b^r Γ(r+1), b = 1/√2
                (ln_gamma(r + 1.0) - r * 0.5 * 2f64.ln()).exp()
            }
            DistributionKind::StudentT => {
                let nu = self.shape()?;
                if r >= nu {
                    return None;
                }
                // ν^{r/2} Γ((r+1)/2) Γ((ν−r)/2) / (√π Γ(ν/2))
                ((r / 2.0) * nu.ln() + ln_gamma((r + 1.0) / 2.0) + ln_gamma((nu - r) / 2.0)
                    - 0.5 * std::f64::consts::PI.ln()
                    - ln_gamma(nu / 2.0))
                .exp()
            }
            DistributionKind::SymPareto => {
                let a = self.shape()?;
                if r >= a {
                    return None;
                }
                a / (a - r)
            }
            _ => return None,
        };
        Some(scale * m.powf(1.0 / r))
    }

    /// Multiplicative factor applied to raw scalar draws.
    fn scalar_scale(&self) -> f64 {
        if !self.standardized {
            return 1.0;
        }
        match self.kind {
            DistributionKind::StudentT => {
                let nu = self.shape().unwrap_or(f64::INFINITY);
                ((nu - 2.0) / nu).sqrt()
            }
            DistributionKind::SymPareto => {
                let a = self.shape().unwrap_or(f64::INFINITY);
                ((a - 2.0) / a).sqrt()
            }
            _ => 1.0,
        }
    }
}

/// N×n matrix of i.i.d. rows, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMatrix {
    pub data: Vec<f64>,
    pub n_rows: usize,
    pub n_cols: usize,
    pub seed: u64,
    pub spec: DistributionSpec,
    /// Fraction of rejected draws when the law is truncated, else 0.
    pub rejection_rate: f64,
}

impl SampleMatrix {
    pub fn from_rows(rows: &[Vec<f64>], spec: DistributionSpec, seed: u64) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            data,
            n_rows,
            n_cols,
            seed,
            spec,
            rejection_rate: 0.0,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols.max(1))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    /// Evaluates ⟨X_i, t⟩ for every row.
    pub fn project(&self, t: &[f64]) -> Vec<f64> {
        assert_eq!(t.len(), self.n_cols, "direction has wrong dimension");
        self.rows()
            .map(|r| r.iter().zip(t).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Flips the sign of column `j` in every row.
    pub fn flip_column(&mut self, j: usize) {
        for i in 0..self.n_rows {
            self.data[i * self.n_cols + j] = -self.data[i * self.n_cols + j];
        }
    }
}

fn draw_scalar(spec: &DistributionSpec, scale: f64, rng: &mut ChaCha8Rng) -> f64 {
    match spec.kind {
        DistributionKind::Gaussian => rng.sample(StandardNormal),
        DistributionKind::Rademacher => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
        DistributionKind::StudentT => {
            let nu = spec.shape().expect("validated");
            let t: f64 = StudentT::new(nu).expect("validated").sample(rng);
            scale * t
        }
        DistributionKind::SymPareto => {
            let a = spec.shape().expect("validated");
            // |ξ| = U^{-1/a} on [1, ∞); U ∈ (0,1]
            let u: f64 = 1.0 - rng.random::<f64>();
            let m = u.powf(-1.0 / a);
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            scale * s * m
        }
        DistributionKind::LaplaceExponential => {
            let e: f64 = rng.sample(Exp1);
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            s * e * std::f64::consts::FRAC_1_SQRT_2
        }
        DistributionKind::LpBallUniform | DistributionKind::CoordinateMeasure => {
            unreachable!("vector law")
        }
    }
}

/// I.i.d. scalar draws.
pub fn sample_scalar(spec: &DistributionSpec, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return invalid("count must be at least 1");
    }
    if !spec.kind.is_scalar() {
        return Err(Error::Unsupported(format!("{:?} is a vector law", spec.kind)));
    }
    spec.validate()?;
    let scale = spec.scalar_scale();
    let mut rng = rng_from(seed);
    Ok((0..count).map(|_| draw_scalar(spec, scale, &mut rng)).collect())
}

/// E x₁² for the uniform law on B_pⁿ:
/// Γ(1+n/p)Γ(3/p) / (Γ(1/p)Γ(1+(n+2)/p)).
pub fn lp_ball_marginal_second_moment(n: usize, p: f64) -> f64 {
    let n = n as f64;
    (ln_gamma(1.0 + n / p) + ln_gamma(3.0 / p) - ln_gamma(1.0 / p) - ln_gamma(1.0 + (n + 2.0) / p))
        .exp()
}

/// Per-row sampler with any precomputed constants.
struct RowSampler<'a> {
    spec: &'a DistributionSpec,
    n: usize,
    scale: f64,
    ball: Option<(Gamma<f64>, f64)>,
}

impl<'a> RowSampler<'a> {
    fn new(spec: &'a DistributionSpec, n: usize) -> Result<Self> {
        spec.validate()?;
        let ball = if spec.kind == DistributionKind::LpBallUniform {
            let p = spec.p.expect("validated");
            let g = Gamma::new(1.0 / p, 1.0)
                .map_err(|e| Error::InvalidParameter(format!("ball exponent: {e}")))?;
            let iso = if spec.standardized {
                1.0 / lp_ball_marginal_second_moment(n, p).sqrt()
            } else {
                1.0
            };
            Some((g, iso))
        } else {
            None
        };
        Ok(Self {
            spec,
            n,
            scale: spec.scalar_scale(),
            ball,
        })
    }

    fn fill(&self, out: &mut [f64], rng: &mut ChaCha8Rng) {
        match self.spec.kind {
            DistributionKind::CoordinateMeasure => {
                out.fill(0.0);
                let j = rng.random_range(0..self.n);
                out[j] = (self.n as f64).sqrt();
            }
            DistributionKind::LpBallUniform => {
                let (g, iso) = self.ball.as_ref().expect("ball law");
                let p = self.spec.p.expect("validated");
                // Generalized-normal coordinates with density ∝ exp(−|t|^p),
                // normalized by (Σ|g_i|^p + W)^{1/p} with W ~ Exp(1).
                let mut acc = 0.0;
                for x in out.iter_mut() {
                    let gp: f64 = g.sample(rng);
                    acc += gp;
                    let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    *x = s * gp.powf(1.0 / p);
                }
                let w: f64 = rng.sample(Exp1);
                let r = (acc + w).powf(1.0 / p);
                for x in out.iter_mut() {
                    *x *= iso / r;
                }
            }
            _ => {
                for x in out.iter_mut() {
                    *x = draw_scalar(self.spec, self.scale, rng);
                }
            }
        }
    }
}

/// Stream offset for the truncation resampler, kept apart from the main draw.
const RESAMPLE_STREAM: u64 = 0x7472_756e_6361_7465;
const PILOT_STREAM: u64 = 0x7069_6c6f_7400_0000;
/// Rows drawn to estimate the acceptance probability before resampling.
pub const PILOT_ROWS: usize = 4000;

/// N i.i.d. rows. A truncated spec is conditioned to κ₁n^{1/p}B_pⁿ by
/// rejection.
pub fn sample_matrix(spec: &DistributionSpec, n_rows: usize, n: usize, seed: u64) -> Result<SampleMatrix> {
    if n_rows == 0 || n == 0 {
        return invalid("N and n must be at least 1");
    }
    let base = spec.untruncated();
    let sampler = RowSampler::new(&base, n)?;
    let mut rng = rng_from(seed);
    let mut data = vec![0.0; n_rows * n];
    for row in data.chunks_exact_mut(n) {
        sampler.fill(row, &mut rng);
    }
    let x = SampleMatrix {
        data,
        n_rows,
        n_cols: n,
        seed,
        spec: base,
        rejection_rate: 0.0,
    };
    spec.validate()?;
    match spec.truncation() {
        Some((p, k1)) => {
            let (mut out, rate) = truncate_to_lp_ball(&x, p, k1)?;
            out.spec = spec.clone();
            out.rejection_rate = rate;
            Ok(out)
        }
        None => Ok(x),
    }
}

/// Rejection-resamples rows with ‖X_i‖_p > κ₁n^{1/p}. Returns the conditioned
/// matrix and rejected / total attempts.
pub fn truncate_to_lp_ball(x: &SampleMatrix, p: f64, kappa1: f64) -> Result<(SampleMatrix, f64)> {
    if p <= 2.0 {
        return invalid(format!("truncation exponent p must exceed 2, got {p}"));
    }
    if kappa1 <= 0.0 {
        return invalid(format!("kappa1 must be positive, got {kappa1}"));
    }
    let n = x.n_cols;
    let radius = kappa1 * (n as f64).powf(1.0 / p);
    let inside = |r: &[f64]| lp_norm(r, p) <= radius;
    let bad: Vec<usize> = (0..x.n_rows).filter(|&i| !inside(x.row(i))).collect();
    if bad.is_empty() {
        return Ok((x.clone(), 0.0));
    }
    let base = x.spec.untruncated();
    let sampler = RowSampler::new(&base, n)?;

    let mut pilot_rng = rng_from(mix_seed(x.seed, PILOT_STREAM));
    let mut buf = vec![0.0; n];
    let mut accepted = 0usize;
    for _ in 0..PILOT_ROWS {
        sampler.fill(&mut buf, &mut pilot_rng);
        if inside(&buf) {
            accepted += 1;
        }
    }
    let estimate = accepted as f64 / PILOT_ROWS as f64;
    if estimate < 1e-3 {
        return Err(Error::LowAcceptance { estimate });
    }

    let mut out = x.clone();
    let mut rng = rng_from(mix_seed(x.seed, RESAMPLE_STREAM));
    let mut rejected = bad.len();
    let mut attempts = x.n_rows;
    for i in bad {
        loop {
            sampler.fill(&mut buf, &mut rng);
            attempts += 1;
            if inside(&buf) {
                out.data[i * n..(i + 1) * n].copy_from_slice(&buf);
                break;
            }
            rejected += 1;
        }
    }
    let rate = rejected as f64 / attempts as f64;
    out.rejection_rate = rate;
    Ok((out, rate))
}

/// κ₁ as the `level` quantile of ‖X‖_p / n^{1/p} over `pilot_rows` fresh rows.
pub fn calibrate_kappa1(
    spec: &DistributionSpec,
    n: usize,
    p: f64,
    level: f64,
    pilot_rows: usize,
    seed: u64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&level) {
        return invalid(format!("quantile level must lie in [0,1), got {level}"));
    }
    let x = sample_matrix(&spec.untruncated(), pilot_rows, n, seed)?;
    let scale = (n as f64).powf(1.0 / p);
    let mut r: Vec<f64> = x.rows().map(|row| lp_norm(row, p) / scale).collect();
    r.sort_by(f64::total_cmp);
    let idx = ((level * r.len() as f64).ceil() as usize).clamp(1, r.len()) - 1;
    Ok(r[idx])
}

/// I.i.d. symmetric Laplace entries with variance 1 (density ∝ e^{−√2|t|}).
pub fn sample_exponential_vector(n: usize, count: usize, seed: u64) -> Result<SampleMatrix> {
    sample_matrix(&DistributionSpec::laplace(), count, n, seed)
}

/// Pr(every one of n coordinates appears among N uniform draws), by the
/// occupancy recursion. Stable where inclusion-exclusion cancels.
pub fn coupon_all_hit_probability(n: usize, draws: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    // dist[j] = Pr(j distinct coordinates seen)
    let mut dist = vec![0.0f64; n + 1];
    dist[0] = 1.0;
    let nf = n as f64;
    for _ in 0..draws {
        for j in (0..=n).rev() {
            let stay = dist[j] * (j as f64 / nf);
            let enter = if j > 0 {
                dist[j - 1] * ((n - j + 1) as f64 / nf)
            } else {
                0.0
            };
            dist[j] = stay + enter;
        }
    }
    dist[n]
}

/// Σ_k (−1)^k C(n,k)(1 − k/n)^N. Exact in rational arithmetic, so only
/// trustworthy in floating point for small n.
pub fn coupon_all_hit_inclusion_exclusion(n: usize, draws: usize) -> f64 {
    let nf = n as f64;
    let mut total = 0.0;
    let mut binom = 1.0;
    for k in 0..=n {
        let term = binom * (1.0 - k as f64 / nf).powi(draws as i32);
        total += if k % 2 == 0 { term } else { -term };
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    total
}
