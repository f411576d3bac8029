//! Command-line front end for `bubbleforge`.
//!
//! `run` takes the arguments and two writers and returns the exit code:
//! 0 when every check passes, 1 when some check fails, 2 for a bad
//! configuration and 3 for a numerical failure.

pub mod config;
pub mod experiments;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use bubbleforge::grid::GridSpec;
use bubbleforge::Dim;
use clap::Parser;

use config::{Cli, ExperimentConfig, Mode};
use experiments::{execute, Ctx};
use report::{write_report, ReportRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(bubbleforge::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("i/o error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<bubbleforge::Error> for CliError {
    /// Violated preconditions are configuration errors; everything else
    /// happened mid-computation.
    fn from(e: bubbleforge::Error) -> Self {
        use bubbleforge::Error as E;
        match e {
            E::InvalidDimension(_)
            | E::DimensionMismatch { .. }
            | E::NonpositiveScale(_)
            | E::BadRadii { .. }
            | E::BadConfig(_)
            | E::Overlap { .. }
            | E::NoSolution
            | E::KappaTooLarge(_)
            | E::InvalidGeometry(_)
            | E::ProfileViolated { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match ExperimentConfig::resolve(cli).and_then(|cfg| run_config(&cfg, out, err)) {
        Ok(rows) => i32::from(!rows.iter().all(|r| r.pass)),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Run a resolved configuration, write both reports, and return the rows.
pub fn run_config(
    cfg: &ExperimentConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Vec<ReportRow>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {:?} threads: {e}", cfg.threads)))?;
    let rows = pool.install(|| match cfg.mode {
        Mode::Verify => run_one(cfg, cfg.n, &cfg.params),
        Mode::Sweep => sweep(cfg),
    })?;
    for r in &rows {
        writeln!(err, "{}", r.summary())?;
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    writeln!(err, "{passed}/{} checks passed", rows.len())?;
    match &cfg.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            write_report(&rows, cfg.format, &mut f)?;
            f.flush()?;
        }
        None => write_report(&rows, cfg.format, out)?,
    }
    Ok(rows)
}

fn run_one(
    cfg: &ExperimentConfig,
    n: Option<usize>,
    params: &config::Params,
) -> Result<Vec<ReportRow>, CliError> {
    let dim = Dim::new(n.unwrap_or(cfg.kind.default_n()))?;
    let grid = match cfg.grid {
        Some(k) => GridSpec::default().with_per_axis(k),
        None => GridSpec::default(),
    };
    let ctx = Ctx {
        grid,
        seed: cfg.seed,
    };
    let t = Instant::now();
    let found = execute(cfg.kind, dim, params, &ctx)?;
    let seconds = if cfg.timing {
        t.elapsed().as_secs_f64()
    } else {
        0.0
    };
    Ok(found
        .into_iter()
        .map(|m| m.judge(cfg.tol, seconds))
        .collect())
}

/// Every tuple of the Cartesian product of the axes, first axis slowest.
fn tuples(axes: &[config::Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|head| {
                axis.values.iter().map(move |&v| {
                    let mut t = head.clone();
                    t.push(v);
                    t
                })
            })
            .collect()
    })
}

fn sweep(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>, CliError> {
    let mut rows = Vec::new();
    for t in tuples(&cfg.axes) {
        let mut params = cfg.params.clone();
        let mut n = cfg.n;
        for (axis, &v) in cfg.axes.iter().zip(&t) {
            if axis.name == "n" {
                n = Some(v as usize);
            } else {
                params.set(&axis.name, v)?;
            }
        }
        rows.extend(run_one(cfg, n, &params)?);
    }
    Ok(rows)
}
