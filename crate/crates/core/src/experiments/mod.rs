//! Monte Carlo sweeps: configuration, per-trial records, summaries and
//! fitted constants, plus the runners for each experiment.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::samplers::DistributionSpec;
use crate::seed::splitmix64;

pub mod bands;
pub mod baiyin;
pub mod covariance;
pub mod envelope;
pub mod gamma_sandwich;
pub mod omega_events;
pub mod output;
pub mod stats;
pub mod symmetrization;
pub mod tail_lemma;
pub mod theorem_b;
pub mod weak_lp;

pub use envelope::{reference_envelope, EnvelopeKind};
pub use stats::Summary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Baiyin,
    Covariance,
    TheoremB,
    Symmetrization,
    TailLemma,
    OmegaEvents,
    GammaSandwich,
    WeakLp,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Baiyin => "baiyin",
            Self::Covariance => "covariance",
            Self::TheoremB => "theorem_b",
            Self::Symmetrization => "symmetrization",
            Self::TailLemma => "tail_lemma",
            Self::OmegaEvents => "omega_events",
            Self::GammaSandwich => "gamma_sandwich",
            Self::WeakLp => "weak_lp",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default)]
    pub n: Vec<usize>,
    /// Aspect ratios n/N.
    #[serde(default)]
    pub beta: Vec<f64>,
    /// Sample sizes N.
    #[serde(default)]
    pub big_n: Vec<usize>,
}

/// Index-set families for the quadratic-process experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetFamily {
    /// {±e_j}.
    SignedCoordinates,
    /// Random points of the unit sphere.
    Sphere,
    /// Random unit vectors with `sparsity` nonzero entries.
    Sparse,
    /// {0}.
    Zero,
}

fn default_kappa3() -> f64 {
    4.0
}
fn default_kappa4() -> f64 {
    10.0
}
fn one() -> f64 {
    1.0
}

/// Experiment parameters. Unset optional values fall back to per-experiment
/// defaults documented on each runner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "one")]
    pub u: f64,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "default_kappa3")]
    pub kappa3: f64,
    #[serde(default = "default_kappa4")]
    pub kappa4: f64,
    /// Exponent of the ℓ_p diameter (weak-ℓ_p and ball experiments).
    #[serde(default)]
    pub p: Option<f64>,
    /// Moment order; defaults to the distribution's q.
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub s1: Option<u32>,
    #[serde(default)]
    pub ell: Option<usize>,
    /// Size of random direction / point families.
    #[serde(default)]
    pub directions: Option<usize>,
    #[serde(default)]
    pub sparsity: Option<usize>,
    #[serde(default)]
    pub families: Vec<SetFamily>,
    /// Rows used to calibrate norms, covariances and κ₁.
    #[serde(default)]
    pub calibration_rows: Option<usize>,
    /// Inner Monte Carlo size (E(T), symmetrization probabilities).
    #[serde(default)]
    pub mc_trials: Option<usize>,
    /// Exceedance level in the weak-ℓ_p experiment; fitted when unset.
    #[serde(default)]
    pub c1: Option<f64>,
    /// Multiplier on the symmetrization threshold.
    #[serde(default = "one")]
    pub x_factor: f64,
    /// Quantile level for calibrating κ₁.
    #[serde(default)]
    pub kappa1_level: Option<f64>,
    #[serde(default)]
    pub kappa1: Option<f64>,
    /// Dimension of the point sets in the γ sandwich.
    #[serde(default)]
    pub dim: Option<usize>,
    /// Points per set in the γ sandwich.
    #[serde(default)]
    pub points: Option<usize>,
    /// Tail exponent of the projection condition in the sv envelope.
    #[serde(default)]
    pub sv_eta: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub plot: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: OutputFormat::Csv,
            plot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default = "DistributionSpec::gaussian")]
    pub distribution: DistributionSpec,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, distribution: DistributionSpec, trials: usize, seed: u64) -> Self {
        Self {
            experiment,
            grids: Grids::default(),
            distribution,
            trials,
            seed,
            params: Params::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| crate::Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.grids.n.contains(&0) || self.grids.big_n.contains(&0) {
            return invalid("grid sizes must be positive");
        }
        if let Some(b) = self.grids.beta.iter().find(|b| !(**b > 0.0 && **b <= 1.0)) {
            return invalid(format!("aspect ratio must lie in (0, 1], got {b}"));
        }
        if !(self.params.u >= 1.0) || !(self.params.r >= 1.0) {
            return invalid("u and r must be at least 1");
        }
        self.distribution.validate()
    }

    /// Moment order from the parameters, else from the distribution.
    pub fn q(&self) -> Option<f64> {
        self.params.q.or(self.distribution.q)
    }
}

/// One trial of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub cell: usize,
    pub params: Vec<f64>,
    pub trial: usize,
    pub stats: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: usize,
    pub params: Vec<f64>,
    /// One summary per statistic, in `stat_names` order.
    pub stats: Vec<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedConstant {
    pub name: String,
    pub definition: String,
    /// None for a whole-sweep constant.
    pub cell: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeValue {
    pub kind: EnvelopeKind,
    pub cell: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub trials: usize,
    pub param_names: Vec<String>,
    pub stat_names: Vec<String>,
    pub records: Vec<Record>,
    pub cells: Vec<CellSummary>,
    pub fitted: Vec<FittedConstant>,
    pub envelopes: Vec<EnvelopeValue>,
    /// Constants used (κ₃, κ₄, u, ...), so every output carries them.
    pub constants: BTreeMap<String, f64>,
    pub diagnostics: Vec<String>,
}

impl SweepResult {
    pub fn new(cfg: &ExperimentConfig, param_names: &[&str], stat_names: &[&str]) -> Self {
        Self {
            experiment: cfg.experiment,
            seed: cfg.seed,
            trials: cfg.trials,
            param_names: param_names.iter().map(|s| s.to_string()).collect(),
            stat_names: stat_names.iter().map(|s| s.to_string()).collect(),
            records: Vec::new(),
            cells: Vec::new(),
            fitted: Vec::new(),
            envelopes: Vec::new(),
            constants: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    /// Appends a cell's trials and its summary; returns the cell index.
    pub fn push_cell(&mut self, params: Vec<f64>, trials: Vec<Vec<f64>>) -> usize {
        let cell = self.cells.len();
        let k = self.stat_names.len();
        let stats = (0..k)
            .map(|j| Summary::of(&trials.iter().map(|t| t[j]).collect::<Vec<_>>()))
            .collect();
        for (trial, s) in trials.into_iter().enumerate() {
            debug_assert_eq!(s.len(), k);
            self.records.push(Record {
                cell,
                params: params.clone(),
                trial,
                stats: s,
            });
        }
        self.cells.push(CellSummary { cell, params, stats });
        cell
    }

    pub fn stat_index(&self, name: &str) -> Option<usize> {
        self.stat_names.iter().position(|s| s == name)
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|s| s == name)
    }

    /// Summary of a statistic in one cell.
    pub fn summary(&self, cell: usize, stat: &str) -> Option<&Summary> {
        self.cells.get(cell)?.stats.get(self.stat_index(stat)?)
    }

    /// Per-trial values of a statistic in one cell.
    pub fn values(&self, cell: usize, stat: &str) -> Vec<f64> {
        let Some(j) = self.stat_index(stat) else {
            return Vec::new();
        };
        self.records.iter().filter(|r| r.cell == cell).map(|r| r.stats[j]).collect()
    }

    pub fn fitted_value(&self, name: &str, cell: Option<usize>) -> Option<f64> {
        self.fitted.iter().find(|f| f.name == name && f.cell == cell).map(|f| f.value)
    }

    pub fn fit(&mut self, name: &str, definition: &str, cell: Option<usize>, value: f64) {
        self.fitted.push(FittedConstant {
            name: name.into(),
            definition: definition.into(),
            cell,
            value,
        });
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.constants.insert(name.into(), value);
    }
}

/// Seed stream of a cell, derived from its parameter values rather than its
/// position so a cell's results do not depend on the rest of the grid.
pub fn cell_stream(params: &[f64]) -> u64 {
    params
        .iter()
        .fold(0x6365_6c6c_u64, |acc, p| splitmix64(acc ^ p.to_bits()))
}

/// Runs the configured experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Baiyin => baiyin::run_baiyin(cfg),
        ExperimentKind::Covariance => covariance::run_covariance(cfg),
        ExperimentKind::TheoremB => theorem_b::run_theorem_b(cfg),
        ExperimentKind::Symmetrization => symmetrization::run_symmetrization(cfg),
        ExperimentKind::TailLemma => tail_lemma::run_tail_lemma(cfg),
        ExperimentKind::OmegaEvents => omega_events::run_omega_events(cfg),
        ExperimentKind::GammaSandwich => gamma_sandwich::run_gamma_sandwich(cfg),
        ExperimentKind::WeakLp => weak_lp::run_weak_lp_tail(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrip_and_validation() {
        let text = r#"{"experiment":"baiyin","grids":{"n":[20],"beta":[0.5]},
            "distribution":{"kind":"gaussian"},"trials":3,"seed":7,
            "params":{"u":2.0},"output":{"dir":"o","format":"json","plot":true}}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.params.kappa3, 4.0);
        assert_eq!(cfg.params.kappa4, 10.0);
        assert_eq!(cfg.output.format, OutputFormat::Json);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(ExperimentConfig::from_json(&text.replace("0.5", "1.5")).is_err());
        assert!(ExperimentConfig::from_json(&text.replace("\"trials\":3", "\"trials\":0")).is_err());
        assert!(ExperimentConfig::from_json(&text.replace("\"u\"", "\"uu\"")).is_err());
    }

    #[test]
    fn cell_streams_differ() {
        assert_ne!(cell_stream(&[100.0, 0.25]), cell_stream(&[200.0, 0.25]));
        assert_eq!(cell_stream(&[100.0, 0.25]), cell_stream(&[100.0, 0.25]));
    }
}
