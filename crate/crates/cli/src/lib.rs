//! Command implementations behind the `pauli-dyn` binary.

pub mod output;
pub mod spec;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use pauli_dyn_core::generator::{is_cp_divisible, singular_points, DivisibilityVerdict, SingularityReport};
use pauli_dyn_core::mixing::{verify_lemma1, Lemma1Config, Lemma1Report};
use pauli_dyn_core::scenarios::{run_example, ExampleRun, SWEEP_GRID};
use pauli_dyn_core::sim::roundtrip_error_with;
use pauli_dyn_core::Error as CoreError;

use crate::output::{sweep_csv, sweep_is_finite};
use crate::spec::{parse_spec, ChannelSpec, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const ROUNDTRIP_TOLERANCE: f64 = 1e-5;
pub const DIVISIBILITY_GRID: usize = 4001;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Core(e) => match e {
                CoreError::InvalidParameters(_) | CoreError::InvalidWeights(_) => EXIT_USAGE,
                CoreError::LemmaViolation { .. } | CoreError::LemmaBoundViolation { .. } => EXIT_CLAIM_FAILED,
                _ => EXIT_NUMERIC,
            },
            CliError::Io { .. } | CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

/// Result of a command: lines to print and whether its claim held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_CLAIM_FAILED
        }
    }
}

pub fn load_spec(path: &Path) -> Result<ChannelSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            context: format!("creating {}", dir.display()),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

fn write_report<T: Serialize>(out: Option<&Path>, name: &str, report: &T) -> Result<Option<PathBuf>, CliError> {
    let Some(dir) = out else {
        return Ok(None);
    };
    let path = dir.join(format!("{name}.json"));
    let mut json = serde_json::to_string_pretty(report).map_err(|e| CliError::Numeric(e.to_string()))?;
    json.push('\n');
    write_file(&path, &json)?;
    Ok(Some(path))
}

fn check_horizon(h: f64) -> Result<f64, CliError> {
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(CliError::Usage(format!("horizon must be positive, got {h}")))
    }
}

pub fn cmd_eval(spec_path: &Path, out: &Path, horizon: Option<f64>, grid: Option<usize>) -> Result<Outcome, CliError> {
    let spec = load_spec(spec_path)?;
    let horizon = check_horizon(spec.horizon(horizon))?;
    let grid = spec.grid(grid);
    if grid < 2 {
        return Err(CliError::Usage("grid must be at least 2".into()));
    }
    let ch = spec.build(horizon)?;
    if let Some(t) = sweep_is_finite(&ch, horizon, grid) {
        return Err(CliError::Numeric(format!("non-finite eigenvalue at t = {t}")));
    }
    write_file(out, &sweep_csv(&ch, horizon, grid))?;
    Ok(Outcome {
        lines: vec![format!("wrote {grid} rows to {}", out.display())],
        passed: true,
    })
}

#[derive(Debug, Serialize)]
struct SingularitiesReport<'a> {
    channel: &'a str,
    singularities: &'a SingularityReport,
    divisibility: &'a DivisibilityVerdict,
}

pub fn cmd_singularities(spec_path: &Path, horizon: Option<f64>, out: Option<&Path>) -> Result<Outcome, CliError> {
    let spec = load_spec(spec_path)?;
    let horizon = check_horizon(spec.horizon(horizon))?;
    let ch = spec.build(horizon)?;
    let report = singular_points(&ch, horizon);
    let verdict = is_cp_divisible(&ch, horizon, DIVISIBILITY_GRID);
    let mut lines = Vec::new();
    if report.is_empty() {
        lines.push(format!("no singular points on [0, {horizon}]"));
    }
    for p in &report.points {
        let class = match (&p.classification, &p.classification_error) {
            (Some(c), _) => serde_json::to_value(c.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            (None, Some(e)) => format!("unclassified ({e})"),
            (None, None) => "unclassified".into(),
        };
        lines.push(format!(
            "t* = {}  vanishing {:?}  {class}",
            output::fmt_sig(p.time),
            p.vanishing
        ));
    }
    lines.push(divisibility_line(&verdict));
    write_report(
        out,
        "singularities",
        &SingularitiesReport {
            channel: ch.label(),
            singularities: &report,
            divisibility: &verdict,
        },
    )?;
    Ok(Outcome { lines, passed: true })
}

fn divisibility_line(v: &DivisibilityVerdict) -> String {
    if v.cp_divisible {
        "CP-divisible".into()
    } else {
        "CP-indivisible".into()
    }
}

#[derive(Debug, Serialize)]
struct DivisibilityReport<'a> {
    channel: &'a str,
    horizon: f64,
    #[serde(flatten)]
    verdict: &'a DivisibilityVerdict,
}

pub fn cmd_divisibility(
    spec_path: &Path,
    horizon: Option<f64>,
    grid: Option<usize>,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let spec = load_spec(spec_path)?;
    let horizon = check_horizon(spec.horizon(horizon))?;
    let ch = spec.build(horizon)?;
    let verdict = is_cp_divisible(&ch, horizon, grid.unwrap_or(DIVISIBILITY_GRID));
    let mut lines = vec![divisibility_line(&verdict)];
    for i in &verdict.negative_rate_intervals {
        lines.push(format!(
            "gamma{} < 0 on [{}, {}]",
            i.rate_index,
            output::fmt_sig(i.start),
            output::fmt_sig(i.end)
        ));
    }
    write_report(
        out,
        "divisibility",
        &DivisibilityReport {
            channel: ch.label(),
            horizon,
            verdict: &verdict,
        },
    )?;
    Ok(Outcome { lines, passed: true })
}

#[derive(Debug, Serialize)]
struct RoundtripReport<'a> {
    channel: &'a str,
    horizon: f64,
    dt: f64,
    excised: bool,
    error: f64,
    tolerance: f64,
    pass: bool,
}

pub fn cmd_roundtrip(
    spec_path: &Path,
    dt: f64,
    horizon: Option<f64>,
    excise: bool,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(CliError::Usage(format!("dt must be positive, got {dt}")));
    }
    let spec = load_spec(spec_path)?;
    let horizon = check_horizon(spec.horizon(horizon))?;
    let ch = spec.build(horizon)?;
    let error = roundtrip_error_with(&ch, horizon, dt, excise)?;
    let pass = error < ROUNDTRIP_TOLERANCE;
    write_report(
        out,
        "roundtrip",
        &RoundtripReport {
            channel: ch.label(),
            horizon,
            dt,
            excised: excise,
            error,
            tolerance: ROUNDTRIP_TOLERANCE,
            pass,
        },
    )?;
    Ok(Outcome {
        lines: vec![format!(
            "{} roundtrip error {} (tolerance {})",
            if pass { "PASS" } else { "FAIL" },
            output::fmt_sig(error),
            output::fmt_sig(ROUNDTRIP_TOLERANCE)
        )],
        passed: pass,
    })
}

pub fn cmd_example(n: u8, out: Option<&Path>) -> Result<Outcome, CliError> {
    if !(1..=4).contains(&n) {
        return Err(CliError::Usage(format!("example number must be 1..=4, got {n}")));
    }
    let run: ExampleRun = run_example(n)?;
    let mut lines = vec![format!("example {}: {}", run.number, run.title)];
    for c in &run.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            lines.push(format!("{status} {}", c.name));
        } else {
            lines.push(format!("{status} {} ({})", c.name, c.detail));
        }
    }
    if let Some(dir) = out {
        for (name, ch) in &run.channels {
            write_file(
                &dir.join(format!("{name}.csv")),
                &sweep_csv(ch, run.horizon, SWEEP_GRID),
            )?;
        }
        write_report(out, &format!("example{n}"), &run)?;
    }
    lines.push(if run.passed() { "PASS".into() } else { "FAIL".into() });
    Ok(Outcome {
        lines,
        passed: run.passed(),
    })
}

#[derive(Debug, Serialize)]
struct LemmaFailure<'a> {
    config: &'a Lemma1Config,
    error: String,
}

pub fn cmd_lemma1(cfg: &Lemma1Config, out: Option<&Path>) -> Result<Outcome, CliError> {
    if cfg.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    check_horizon(cfg.horizon)?;
    match verify_lemma1(cfg) {
        Ok(report) => {
            write_report(out, "lemma1", &report)?;
            Ok(Outcome {
                lines: lemma_lines(&report),
                passed: report.failures == 0,
            })
        }
        Err(e @ (CoreError::LemmaViolation { .. } | CoreError::LemmaBoundViolation { .. })) => {
            write_report(
                out,
                "lemma1",
                &LemmaFailure {
                    config: cfg,
                    error: e.to_string(),
                },
            )?;
            Ok(Outcome {
                lines: vec![format!("FAIL {e}")],
                passed: false,
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn lemma_lines(r: &Lemma1Report) -> Vec<String> {
    vec![
        format!("{} trials, {} failures", r.config.trials, r.failures),
        format!(
            "global min lambda {} (trial {}, lambda{}, t = {})",
            output::fmt_sig(r.global_min_lambda),
            r.global_min_trial,
            r.global_min_axis,
            output::fmt_sig(r.global_min_time)
        ),
        format!(
            "min margin over 1 - (b + c) bound {}",
            output::fmt_sig(r.min_bound_margin)
        ),
        if r.failures == 0 { "PASS".into() } else { "FAIL".into() },
    ]
}
