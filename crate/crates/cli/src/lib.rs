//! Argument handling and dispatch for the `heavychain` binary.
//!
//! Exit codes: 0 success, 1 bad config or usage, 2 numerical failure,
//! 3 band violation under `--check`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use heavychain::chaining::admissible::{
    gamma_beta_bruteforce, gamma_beta_value, greedy_admissible, standard_eta_for, AdmissibleSequence, Metric,
    BRUTEFORCE_MAX_LEVELS, BRUTEFORCE_MAX_POINTS,
};
use heavychain::chaining::decomposition::{verify_decomposition, DecompositionSpec, OmegaReport};
use heavychain::chaining::phi::{PhiFamily, PhiKind};
use heavychain::experiments::bands::check_bands;
use heavychain::experiments::output::write_outputs;
use heavychain::experiments::{run as run_sweep, ExperimentConfig, ExperimentKind, OutputFormat, SweepResult};
use heavychain::Error;
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "HEAVYCHAIN_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "heavychain", version, about = "Monte Carlo checks of random matrix bounds and chaining utilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extreme singular values of N×n matrices.
    Baiyin(Common),
    /// Sample covariance deviation against reference envelopes.
    Covariance(Common),
    /// Quadratic process over finite index sets.
    TheoremB(Common),
    /// Symmetrization inequality over a class of linear functionals.
    Symmetrize(Common),
    /// Violation rate of the tail-functional bound.
    TailLemma(Common),
    /// Frequency of the good events for the ball construction.
    OmegaCheck(Common),
    /// γ_β of a finite set, or the γ₁+γ₂ against E(T) sweep.
    Gamma(Common),
    /// Check a decomposition's conditions by top-k reduction.
    DecomposeVerify(Common),
    /// Tail of the largest weak-ℓ_p row norm.
    WeakLp(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed; beats the config value and HEAVYCHAIN_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write an SVG plot.
    #[arg(long)]
    pub plot: bool,
    /// Exit 3 when a regression band fails.
    #[arg(long)]
    pub check: bool,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG },
            message: e.to_string(),
        }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

/// What a finished command reports.
struct Done {
    summary: String,
    band_failures: Vec<String>,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. The summary goes to stdout, errors to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(done) => {
            println!("{}", done.summary);
            if done.band_failures.is_empty() {
                EXIT_OK
            } else {
                for f in &done.band_failures {
                    eprintln!("band failed: {f}");
                }
                EXIT_CHECK
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn common(c: &Command) -> &Common {
    match c {
        Command::Baiyin(a)
        | Command::Covariance(a)
        | Command::TheoremB(a)
        | Command::Symmetrize(a)
        | Command::TailLemma(a)
        | Command::OmegaCheck(a)
        | Command::Gamma(a)
        | Command::DecomposeVerify(a)
        | Command::WeakLp(a) => a,
    }
}

fn execute(cmd: &Command) -> Result<Done, Failure> {
    let args = common(cmd);
    let text = fs::read_to_string(&args.config)
        .map_err(|e| config_error(format!("cannot read {}: {e}", args.config.display())))?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", args.config.display())))?;
    let work = || -> Result<Done, Failure> {
        match cmd {
            Command::Baiyin(_) => experiment(ExperimentKind::Baiyin, &raw, args),
            Command::Covariance(_) => experiment(ExperimentKind::Covariance, &raw, args),
            Command::TheoremB(_) => experiment(ExperimentKind::TheoremB, &raw, args),
            Command::Symmetrize(_) => experiment(ExperimentKind::Symmetrization, &raw, args),
            Command::TailLemma(_) => experiment(ExperimentKind::TailLemma, &raw, args),
            Command::OmegaCheck(_) => experiment(ExperimentKind::OmegaEvents, &raw, args),
            Command::WeakLp(_) => experiment(ExperimentKind::WeakLp, &raw, args),
            Command::Gamma(_) if raw.get("experiment").is_some() => {
                experiment(ExperimentKind::GammaSandwich, &raw, args)
            }
            Command::Gamma(_) => gamma(&raw, args),
            Command::DecomposeVerify(_) => decompose(&raw, args),
        }
    };
    match args.jobs {
        None => work(),
        Some(0) => Err(config_error("--jobs must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| config_error(format!("thread pool: {e}")))?
            .install(work),
    }
}

/// Seed precedence: flag, then config, then environment, then 0.
fn resolve_seed(flag: Option<u64>, raw: &serde_json::Value) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = raw.get("seed") {
        return v.as_u64().ok_or_else(|| config_error(format!("seed must be a nonnegative integer, got {v}")));
    }
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| config_error(format!("{SEED_ENV}={s} is not a nonnegative integer"))),
        Err(_) => Ok(0),
    }
}

fn experiment(kind: ExperimentKind, raw: &serde_json::Value, args: &Common) -> Result<Done, Failure> {
    let mut cfg: ExperimentConfig =
        serde_json::from_value(raw.clone()).map_err(|e| config_error(format!("config: {e}")))?;
    if cfg.experiment != kind {
        return Err(config_error(format!(
            "config is for {}, not {}",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    cfg.seed = resolve_seed(args.seed, raw)?;
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(d) = &args.out_dir {
        cfg.output.dir = d.clone();
    }
    if let Some(f) = args.format {
        cfg.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    cfg.output.plot |= args.plot;
    cfg.validate()?;
    let result = run_sweep(&cfg)?;
    let paths = write_outputs(&result, &cfg.output, args.force)?;
    let band_failures = if args.check {
        check_bands(&cfg, &result)
            .into_iter()
            .filter(|b| !b.pass)
            .map(|b| format!("{}: {}", b.name, b.detail))
            .collect()
    } else {
        Vec::new()
    };
    Ok(Done {
        summary: sweep_summary(&result, &paths),
        band_failures,
    })
}

/// Key fitted constant for each experiment, and how cells are combined.
fn headline(kind: ExperimentKind) -> (&'static str, fn(f64, f64) -> f64) {
    match kind {
        ExperimentKind::Baiyin => ("c4_max", f64::max),
        ExperimentKind::Covariance => ("fitted_max", f64::max),
        ExperimentKind::TheoremB => ("max_ratio_overall", f64::max),
        ExperimentKind::Symmetrization => ("holds_fraction", f64::min),
        ExperimentKind::TailLemma => ("failure_rate", f64::max),
        ExperimentKind::OmegaEvents => ("event_probability", f64::min),
        ExperimentKind::GammaSandwich => ("ratio_max", f64::max),
        ExperimentKind::WeakLp => ("slope", f64::max),
    }
}

fn sweep_summary(r: &SweepResult, paths: &[PathBuf]) -> String {
    let (name, combine) = headline(r.experiment);
    let fit = r
        .fitted
        .iter()
        .filter(|f| f.name == name)
        .map(|f| f.value)
        .reduce(combine)
        .map_or("n/a".to_string(), |v| format!("{v:.6}"));
    let (_, stat) = heavychain::experiments::output::plot_axes(r.experiment);
    let median = r
        .cells
        .last()
        .and_then(|_| r.summary(r.cells.len() - 1, stat))
        .map_or("n/a".to_string(), |s| format!("{:.6}", s.median));
    let out = paths.first().map_or(String::new(), |p| format!(" -> {}", p.display()));
    format!(
        "{}: {} cells × {} trials, median {stat} (last cell) = {median}, {name} = {fit}{out}",
        r.experiment.name(),
        r.cells.len(),
        r.trials,
    )
}

fn write_once(dir: &Path, file: &str, content: &str, force: bool) -> Result<PathBuf, Failure> {
    let path = dir.join(file);
    if path.exists() && !force {
        return Err(Error::OutputExists(path.display().to_string()).into());
    }
    fs::create_dir_all(dir).map_err(Error::from)?;
    fs::write(&path, content).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn out_dir(args: &Common, raw: &serde_json::Value) -> PathBuf {
    args.out_dir
        .clone()
        .or_else(|| raw.pointer("/output/dir").and_then(|v| v.as_str()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn two() -> f64 {
    2.0
}

fn default_metric() -> Metric {
    Metric::L2
}

/// γ_β of an explicit finite set.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaConfig {
    points: Vec<Vec<f64>>,
    #[serde(default = "two")]
    beta: f64,
    #[serde(default = "default_metric")]
    metric: Metric,
    /// Only `output.dir` is used, read from the raw value.
    #[serde(default)]
    #[allow(dead_code)]
    output: Option<serde_json::Value>,
}

#[derive(Debug, Serialize)]
struct GammaOutput {
    beta: f64,
    points: usize,
    /// Exact value when the set is small enough to enumerate.
    bruteforce: Option<f64>,
    greedy: f64,
}

fn gamma(raw: &serde_json::Value, args: &Common) -> Result<Done, Failure> {
    let cfg: GammaConfig = serde_json::from_value(raw.clone()).map_err(|e| config_error(format!("config: {e}")))?;
    if cfg.points.is_empty() {
        return Err(config_error("points must not be empty"));
    }
    let greedy_seq = greedy_admissible(&cfg.points, cfg.metric.clone(), standard_eta_for(cfg.points.len()))?;
    let greedy = gamma_beta_value(&greedy_seq, cfg.beta)?;
    let bruteforce = if cfg.points.len() <= BRUTEFORCE_MAX_POINTS {
        Some(gamma_beta_bruteforce(&cfg.points, &cfg.metric, cfg.beta, BRUTEFORCE_MAX_LEVELS)?)
    } else {
        None
    };
    let out = GammaOutput {
        beta: cfg.beta,
        points: cfg.points.len(),
        bruteforce,
        greedy,
    };
    let json = serde_json::to_string_pretty(&out).map_err(|e| Error::Io(e.to_string()))?;
    let path = write_once(&out_dir(args, raw), "gamma.json", &json, args.force)?;
    let value = bruteforce.unwrap_or(greedy);
    let how = if bruteforce.is_some() { "exact" } else { "greedy upper bound" };
    Ok(Done {
        summary: format!(
            "gamma_{} = {value} ({how}); greedy = {greedy} -> {}",
            cfg.beta,
            path.display()
        ),
        band_failures: Vec::new(),
    })
}

/// A decomposition given either as a full admissible sequence or as points,
/// from which a greedy sequence on the standard schedule is built. Table
/// rows must have one entry per level.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecomposeConfig {
    #[serde(default)]
    admissible: Option<AdmissibleSequence>,
    #[serde(default)]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_metric")]
    metric: Metric,
    theta: Vec<Vec<f64>>,
    increment_norms: Vec<Vec<f64>>,
    vector_norms: Vec<f64>,
    alpha: f64,
    gamma: f64,
    phi: PhiKind,
    /// Only `output.dir` is used, read from the raw value.
    #[serde(default)]
    #[allow(dead_code)]
    output: Option<serde_json::Value>,
}

fn decompose(raw: &serde_json::Value, args: &Common) -> Result<Done, Failure> {
    let cfg: DecomposeConfig =
        serde_json::from_value(raw.clone()).map_err(|e| config_error(format!("config: {e}")))?;
    let admissible = match (cfg.admissible, cfg.points) {
        (Some(a), None) => {
            a.validate()?;
            a
        }
        (None, Some(p)) => {
            if p.is_empty() {
                return Err(config_error("points must not be empty"));
            }
            let eta = standard_eta_for(p.len());
            greedy_admissible(&p, cfg.metric, eta)?
        }
        _ => return Err(config_error("give exactly one of admissible and points")),
    };
    let levels = admissible.len();
    let spec = DecompositionSpec::new(
        admissible,
        cfg.theta,
        cfg.increment_norms,
        cfg.vector_norms,
        cfg.alpha,
        cfg.gamma,
    )
    .map_err(|e| config_error(format!("{e} (the sequence has {levels} levels)")))?;
    let big_n = spec.big_n();
    let family = match cfg.phi {
        PhiKind::Beta { beta } => PhiFamily::beta(beta, big_n)?,
        PhiKind::Lq { q, eps } => PhiFamily::lq(q, eps, big_n)?,
    };
    let report: OmegaReport = verify_decomposition(&spec, &family);
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    let path = write_once(&out_dir(args, raw), "decompose_verify.json", &json, args.force)?;
    let margin = report
        .condition_margins
        .iter()
        .flatten()
        .copied()
        .reduce(f64::min)
        .map_or("n/a".to_string(), |m| format!("{m:.6}"));
    let band_failures = match (&report.first_violation, args.check) {
        (Some(v), true) => vec![format!(
            "condition {} fails for vector {} (level {:?}, k {:?}): {} > {}",
            v.condition, v.element, v.level, v.k, v.lhs, v.rhs
        )],
        _ => Vec::new(),
    };
    Ok(Done {
        summary: format!(
            "decomposition holds = {} over {} vectors in R^{big_n}, smallest margin = {margin} -> {}",
            report.holds,
            spec.vectors().len(),
            path.display()
        ),
        band_failures,
    })
}
