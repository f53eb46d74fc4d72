//! Browser bindings. Every export takes plain numbers or JSON text and
//! returns JSON text; errors surface as JS exceptions carrying the message.

use heavychain::chaining::admissible::{
    gamma_beta_bruteforce, gamma_beta_value, greedy_admissible, standard_eta_for, Metric, BRUTEFORCE_MAX_LEVELS,
    BRUTEFORCE_MAX_POINTS,
};
use heavychain::linalg::{op_norm_deviation, sample_covariance, CovMatrix};
use heavychain::samplers::{coupon_all_hit_probability, sample_matrix, DistributionKind, DistributionSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest matrix the page will sample, to keep the tab responsive.
pub const MAX_ENTRIES: usize = 400_000;
pub const MAX_POINTS: usize = 64;

fn law(name: &str) -> Result<DistributionSpec, String> {
    match name {
        "gaussian" => Ok(DistributionSpec::gaussian()),
        "rademacher" => Ok(DistributionSpec::rademacher()),
        "student_t" => Ok(DistributionSpec::student_t(6.0, 8.0)),
        "heavy_student_t" => Ok(DistributionSpec::student_t(3.0, 3.5)),
        "coordinate_measure" => Ok(DistributionSpec::coordinate()),
        other => Err(format!("unknown law {other}")),
    }
}

#[derive(Debug, Serialize)]
pub struct Spectrum {
    /// Eigenvalues of the sample covariance, ascending.
    pub eigenvalues: Vec<f64>,
    /// Limiting support (1 ± √(n/N))² of the spectrum.
    pub edge_low: f64,
    pub edge_high: f64,
    /// ‖Σ_N − I‖.
    pub deviation: f64,
    /// Chance that N draws hit all n coordinates; only for the coordinate law.
    pub all_hit: Option<f64>,
}

/// Spectrum of the sample covariance of `big_n` rows in R^n.
pub fn spectrum_of(law_name: &str, n: usize, big_n: usize, seed: u64) -> Result<Spectrum, String> {
    let spec = law(law_name)?;
    if n == 0 || big_n < n {
        return Err(format!("need N ≥ n ≥ 1, got n = {n}, N = {big_n}"));
    }
    if n * big_n > MAX_ENTRIES {
        return Err(format!("n·N = {} exceeds {MAX_ENTRIES}", n * big_n));
    }
    let x = sample_matrix(&spec, big_n, n, seed).map_err(|e| e.to_string())?;
    let cov = sample_covariance(&x);
    let eigenvalues = cov.eigenvalues().map_err(|e| e.to_string())?;
    let deviation = op_norm_deviation(&cov, &CovMatrix::identity(n)).map_err(|e| e.to_string())?;
    let b = (n as f64 / big_n as f64).sqrt();
    Ok(Spectrum {
        eigenvalues,
        edge_low: (1.0 - b) * (1.0 - b),
        edge_high: (1.0 + b) * (1.0 + b),
        deviation,
        all_hit: (spec.kind == DistributionKind::CoordinateMeasure).then(|| coupon_all_hit_probability(n, big_n)),
    })
}

#[derive(Debug, Serialize)]
pub struct GammaView {
    pub greedy: f64,
    /// Exact value for at most six points.
    pub bruteforce: Option<f64>,
    /// Per level, the center each point is assigned to.
    pub levels: Vec<Vec<Vec<f64>>>,
}

/// γ_β of planar points given as `[[x, y], …]`, with the greedy chain.
pub fn gamma_of(points_json: &str, beta: f64) -> Result<GammaView, String> {
    let points: Vec<Vec<f64>> = serde_json::from_str(points_json).map_err(|e| e.to_string())?;
    if points.is_empty() || points.len() > MAX_POINTS {
        return Err(format!("need 1 to {MAX_POINTS} points, got {}", points.len()));
    }
    let seq = greedy_admissible(&points, Metric::L2, standard_eta_for(points.len())).map_err(|e| e.to_string())?;
    let greedy = gamma_beta_value(&seq, beta).map_err(|e| e.to_string())?;
    let bruteforce = if points.len() <= BRUTEFORCE_MAX_POINTS {
        gamma_beta_bruteforce(&points, &Metric::L2, beta, BRUTEFORCE_MAX_LEVELS).ok()
    } else {
        None
    };
    let levels = (0..seq.len())
        .map(|s| (0..points.len()).map(|t| seq.pi(s, t).to_vec()).collect())
        .collect();
    Ok(GammaView {
        greedy,
        bruteforce,
        levels,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spectrum(law_name: &str, n: usize, big_n: usize, seed: u32) -> Result<String, JsValue> {
    to_js(spectrum_of(law_name, n, big_n, u64::from(seed)))
}

#[wasm_bindgen]
pub fn gamma(points_json: &str, beta: f64) -> Result<String, JsValue> {
    to_js(gamma_of(points_json, beta))
}
