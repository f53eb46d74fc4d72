//! Writing sweeps to disk: CSV records or a JSON dump, a JSON summary, and
//! an optional standalone SVG plot. Files are write-once.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{
    CellSummary, EnvelopeValue, ExperimentKind, FittedConstant, OutputFormat, OutputSpec, SweepResult,
};

#[derive(Serialize)]
struct SummaryFile<'a> {
    experiment: ExperimentKind,
    seed: u64,
    trials: usize,
    param_names: &'a [String],
    stat_names: &'a [String],
    cells: &'a [CellSummary],
    fitted: &'a [FittedConstant],
    envelopes: &'a [EnvelopeValue],
    constants: &'a std::collections::BTreeMap<String, f64>,
    diagnostics: &'a [String],
}

/// Paths the sweep would be written to.
pub fn planned_paths(result: &SweepResult, spec: &OutputSpec) -> Vec<PathBuf> {
    let stem = result.experiment.name();
    let mut paths = vec![match spec.format {
        OutputFormat::Csv => spec.dir.join(format!("{stem}.csv")),
        OutputFormat::Json => spec.dir.join(format!("{stem}.json")),
    }];
    paths.push(spec.dir.join(format!("{stem}_summary.json")));
    if spec.plot {
        paths.push(spec.dir.join(format!("{stem}.svg")));
    }
    paths
}

/// Records as CSV: cell, parameters, trial, statistics. Floats use the
/// shortest round-trip representation.
pub fn records_csv(result: &SweepResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["cell".to_string()];
    header.extend(result.param_names.iter().cloned());
    header.push("trial".into());
    header.extend(result.stat_names.iter().cloned());
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for r in &result.records {
        let mut row = vec![r.cell.to_string()];
        row.extend(r.params.iter().map(|v| v.to_string()));
        row.push(r.trial.to_string());
        row.extend(r.stats.iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn summary_json(result: &SweepResult) -> Result<String> {
    let s = SummaryFile {
        experiment: result.experiment,
        seed: result.seed,
        trials: result.trials,
        param_names: &result.param_names,
        stat_names: &result.stat_names,
        cells: &result.cells,
        fitted: &result.fitted,
        envelopes: &result.envelopes,
        constants: &result.constants,
        diagnostics: &result.diagnostics,
    };
    serde_json::to_string_pretty(&s).map_err(|e| Error::Io(e.to_string()))
}

/// Writes every output or nothing: existing files are refused up front
/// unless `force` is set.
pub fn write_outputs(result: &SweepResult, spec: &OutputSpec, force: bool) -> Result<Vec<PathBuf>> {
    let paths = planned_paths(result, spec);
    if !force {
        if let Some(p) = paths.iter().find(|p| p.exists()) {
            return Err(Error::OutputExists(p.display().to_string()));
        }
    }
    let mut contents = vec![match spec.format {
        OutputFormat::Csv => records_csv(result)?,
        OutputFormat::Json => serde_json::to_string_pretty(result).map_err(|e| Error::Io(e.to_string()))?,
    }];
    contents.push(summary_json(result)?);
    if spec.plot {
        contents.push(svg_plot(result));
    }
    fs::create_dir_all(&spec.dir)?;
    for (p, c) in paths.iter().zip(contents) {
        write_file(p, &c)?;
    }
    Ok(paths)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// x parameter and y statistic drawn for each experiment.
pub fn plot_axes(kind: ExperimentKind) -> (&'static str, &'static str) {
    match kind {
        ExperimentKind::Baiyin => ("n", "deviation"),
        ExperimentKind::Covariance => ("aspect", "deviation"),
        ExperimentKind::TheoremB => ("big_n", "ratio"),
        ExperimentKind::Symmetrization => ("big_n", "lhs"),
        ExperimentKind::TailLemma => ("big_n", "violated"),
        ExperimentKind::OmegaEvents => ("n", "all_hold"),
        ExperimentKind::GammaSandwich => ("set", "ratio"),
        ExperimentKind::WeakLp => ("n", "exceeds"),
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;

/// Median with a 5–95% bar per cell against the experiment's x parameter,
/// plus envelope curves. Log axes when the x range spans a decade.
pub fn svg_plot(result: &SweepResult) -> String {
    let (xname, yname) = plot_axes(result.experiment);
    let xi = result.param_index(xname).unwrap_or(0);
    let yi = result.stat_index(yname).unwrap_or(0);
    let pts: Vec<(f64, f64, f64, f64)> = result
        .cells
        .iter()
        .filter_map(|c| {
            let s = c.stats.get(yi)?;
            let x = *c.params.get(xi)?;
            (s.count > 0).then_some((x, s.median, s.q05, s.q95))
        })
        .collect();
    let env: Vec<(String, f64, f64)> = result
        .envelopes
        .iter()
        .filter_map(|e| {
            let c = result.cells.get(e.cell)?;
            Some((format!("{:?}", e.kind).to_lowercase(), *c.params.get(xi)?, e.value))
        })
        .collect();
    let xs: Vec<f64> = pts.iter().map(|p| p.0).chain(env.iter().map(|e| e.1)).collect();
    let ys: Vec<f64> = pts
        .iter()
        .flat_map(|p| [p.2, p.3])
        .chain(env.iter().map(|e| e.2))
        .filter(|v| v.is_finite())
        .collect();
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let logx = x0 > 0.0 && x1 / x0 >= 10.0;
    let tx = |x: f64| {
        let (a, b, v) = if logx { (x0.ln(), x1.ln(), x.ln()) } else { (x0, x1, x) };
        PAD + (v - a) / (b - a).max(f64::MIN_POSITIVE) * (W - 2.0 * PAD)
    };
    let ty = |y: f64| H - PAD - (y - y0) / (y1 - y0).max(f64::MIN_POSITIVE) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle">{}: median {yname} (5–95% bars)</text>"#,
        W / 2.0,
        result.experiment.name()
    );
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{0}" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    for (v, label) in [(x0, x0), (x1, x1)] {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, tx(v), H - PAD + 18.0, fmt(label));
    }
    for v in [y0, y1] {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, PAD - 6.0, ty(v) + 4.0, fmt(v));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{xname}{}</text>"#,
        W / 2.0,
        H - 14.0,
        if logx { " (log scale)" } else { "" }
    );
    for &(x, m, lo, hi) in &pts {
        let (cx, cy) = (tx(x), ty(m));
        if lo.is_finite() && hi.is_finite() {
            let _ = writeln!(
                s,
                r##"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="#1f77b4"/>"##,
                ty(lo),
                ty(hi)
            );
        }
        if cy.is_finite() {
            let _ = writeln!(s, r##"<circle cx="{cx:.1}" cy="{cy:.1}" r="3.5" fill="#1f77b4"/>"##);
        }
    }
    let palette = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let mut kinds: Vec<&str> = env.iter().map(|e| e.0.as_str()).collect();
    kinds.dedup();
    kinds.sort_unstable();
    kinds.dedup();
    for (k, name) in kinds.iter().enumerate() {
        let mut line: Vec<(f64, f64)> = env.iter().filter(|e| e.0 == *name).map(|e| (e.1, e.2)).collect();
        line.sort_by(|a, b| a.0.total_cmp(&b.0));
        let d: Vec<String> = line.iter().map(|(x, y)| format!("{:.1},{:.1}", tx(*x), ty(*y))).collect();
        let color = palette[k % palette.len()];
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-dasharray="5,3"/>"#,
            d.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{name}</text>"#,
            W - PAD - 80.0,
            PAD + 14.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi <= lo {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn fmt(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}
