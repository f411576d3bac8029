//! Flags, the TOML config file, and how they merge.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bubbleforge",
    version,
    about = "Verify the bubble gluing bounds numerically and sweep their parameters"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// Dimension (default 3, or 5 for glue-insert).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Tolerance applied to every check, replacing the per-check defaults.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Coarse grid points per axis for sup scans.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Write the machine report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, env = "BUBBLEFORGE_THREADS")]
    pub threads: Option<usize>,
    /// Seed for the randomized steps (bubble fits).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file with defaults; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report 0 seconds so that reports are byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment.
    Verify {
        kind: Kind,
        #[command(flatten)]
        params: Params,
    },
    /// Run one experiment over the Cartesian product of `--vary` axes.
    Sweep {
        kind: Kind,
        /// `name=lo:hi:count[:log]` or `name=v1,v2,...`; repeat for more axes.
        #[arg(long, value_name = "NAME=RANGE")]
        vary: Vec<String>,
        #[command(flatten)]
        params: Params,
    },
    /// Plant bubbles and recover them by blow-up analysis.
    Blowup {
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ThmA,
    ThmB,
    #[value(name = "example-525")]
    #[serde(rename = "example-525")]
    Example525,
    GlueInsert,
    #[value(name = "lemma-37")]
    #[serde(rename = "lemma-37")]
    Lemma37,
    RepIdentity,
    RepSingular,
    Blowup,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::ThmA => "thm-a",
            Kind::ThmB => "thm-b",
            Kind::Example525 => "example-525",
            Kind::GlueInsert => "glue-insert",
            Kind::Lemma37 => "lemma-37",
            Kind::RepIdentity => "rep-identity",
            Kind::RepSingular => "rep-singular",
            Kind::Blowup => "blowup",
        }
    }

    pub fn default_n(self) -> usize {
        match self {
            Kind::GlueInsert => 5,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Experiment parameters. Each kind reads the ones it needs and falls back
/// to its own defaults for the rest.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long = "R", allow_negative_numbers = true)]
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    /// Radius of the integration ball.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Comma-separated point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub sep: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub exponent: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_target: Option<f64>,
    #[arg(long)]
    pub max_bubbles: Option<usize>,
    /// Planted bubble `scale@x1,x2,...`; repeat for more bubbles.
    #[arg(long, value_name = "SCALE@POINT")]
    #[serde(default)]
    pub plant: Vec<String>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),* $(,)?) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f.clone(); })*
    };
}

impl Params {
    /// `self` with every value set in `top` replaced.
    pub fn overlaid(mut self, top: &Params) -> Params {
        overlay!(self, top; lambda, lambda1, lambda2, rho, big_r, omega, xi, sep, sigma, r1, a,
            delta, alpha, eps, exponent, mu, nu, c1, c2, delta_target, max_bubbles);
        if !top.plant.is_empty() {
            self.plant = top.plant.clone();
        }
        self
    }

    /// Set a scalar parameter by its flag name.
    pub fn set(&mut self, name: &str, v: f64) -> Result<(), CliError> {
        let slot = match name {
            "lambda" => &mut self.lambda,
            "lambda1" => &mut self.lambda1,
            "lambda2" => &mut self.lambda2,
            "rho" => &mut self.rho,
            "R" => &mut self.big_r,
            "omega" => &mut self.omega,
            "sep" => &mut self.sep,
            "sigma" => &mut self.sigma,
            "r1" => &mut self.r1,
            "a" => &mut self.a,
            "delta" => &mut self.delta,
            "alpha" => &mut self.alpha,
            "eps" => &mut self.eps,
            "exponent" => &mut self.exponent,
            "mu" => &mut self.mu,
            "nu" => &mut self.nu,
            "c1" => &mut self.c1,
            "c2" => &mut self.c2,
            "delta_target" => &mut self.delta_target,
            _ => return Err(CliError::Config(format!("cannot sweep over `{name}`"))),
        };
        *slot = Some(v);
        Ok(())
    }

    fn check_finite(&self) -> Result<(), CliError> {
        let scalars = [
            self.lambda,
            self.lambda1,
            self.lambda2,
            self.rho,
            self.big_r,
            self.omega,
            self.sep,
            self.sigma,
            self.r1,
            self.a,
            self.delta,
            self.alpha,
            self.eps,
            self.exponent,
            self.mu,
            self.nu,
            self.c1,
            self.c2,
            self.delta_target,
        ];
        let vector = self.xi.iter().flatten().copied();
        if scalars
            .into_iter()
            .flatten()
            .chain(vector)
            .all(f64::is_finite)
        {
            Ok(())
        } else {
            Err(CliError::Config("parameters must be finite".into()))
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    tol: Option<f64>,
    grid: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    threads: Option<usize>,
    seed: Option<u64>,
    no_timing: Option<bool>,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    #[serde(default)]
    vary: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Sweep,
}

/// One sweep axis: a parameter name and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    /// Parse `name=lo:hi:count[:log|:lin]`, `name=v1,v2,...`, or `name=`
    /// (an empty axis).
    pub fn parse(s: &str) -> Result<Axis, CliError> {
        let bad = |why: &str| CliError::Config(format!("bad sweep axis `{s}`: {why}"));
        let (name, rest) = s
            .split_once('=')
            .ok_or_else(|| bad("expected NAME=RANGE"))?;
        let name = name.trim().to_string();
        let rest = rest.trim();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let values = if rest.is_empty() {
            Vec::new()
        } else if rest.contains(':') {
            let parts: Vec<&str> = rest.split(':').collect();
            if !(3..=4).contains(&parts.len()) {
                return Err(bad("expected lo:hi:count[:log]"));
            }
            let (lo, hi) = (num(parts[0])?, num(parts[1])?);
            let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
            let log = match parts.get(3).map(|t| t.trim()) {
                None | Some("lin") => false,
                Some("log") => true,
                Some(_) => return Err(bad("spacing must be `log` or `lin`")),
            };
            if log && !(lo > 0.0 && hi > 0.0) {
                return Err(bad("log spacing needs positive ends"));
            }
            (0..count)
                .map(|i| {
                    if i == 0 {
                        return lo;
                    }
                    if i == count - 1 {
                        return hi;
                    }
                    let t = i as f64 / (count - 1) as f64;
                    if log {
                        10f64.powf(lo.log10() + t * (hi.log10() - lo.log10()))
                    } else {
                        lo + t * (hi - lo)
                    }
                })
                .collect()
        } else {
            rest.split(',').map(num).collect::<Result<_, _>>()?
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad("values must be finite"));
        }
        if name == "n" && values.iter().any(|v| v.fract() != 0.0 || *v < 3.0) {
            return Err(bad("n takes integers >= 3"));
        }
        Ok(Axis { name, values })
    }
}

/// Everything needed to run, after merging the config file under the flags.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub kind: Kind,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub timing: bool,
    pub params: Params,
    pub axes: Vec<Axis>,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let g = cli.global;
        let file = match &g.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let (mode, kind, flags, vary) = match cli.command {
            Command::Verify { kind, params } => (Mode::Verify, kind, params, Vec::new()),
            Command::Sweep { kind, vary, params } => (Mode::Sweep, kind, params, vary),
            Command::Blowup { params } => (Mode::Verify, Kind::Blowup, params, Vec::new()),
        };
        let vary = if mode == Mode::Sweep && vary.is_empty() {
            file.sweep.vary
        } else {
            vary
        };
        let cfg = ExperimentConfig {
            mode,
            kind,
            n: g.n.or(file.n),
            tol: g.tol.or(file.tol),
            grid: g.grid.or(file.grid),
            out: g.out.or(file.out),
            format: g.format.or(file.format).unwrap_or_default(),
            threads: g.threads.or(file.threads),
            seed: g.seed.or(file.seed),
            timing: !(g.no_timing || file.no_timing.unwrap_or(false)),
            params: file.params.overlaid(&flags),
            axes: vary
                .iter()
                .map(|s| Axis::parse(s))
                .collect::<Result<_, _>>()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Config(m));
        if let Some(n) = self.n {
            if n < 3 {
                return fail(format!("--n must be at least 3, got {n}"));
            }
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return fail(format!("--tol must be a nonnegative number, got {t}"));
            }
        }
        if let Some(k) = self.grid {
            if k < 3 {
                return fail(format!("--grid must be at least 3, got {k}"));
            }
        }
        if self.threads == Some(0) {
            return fail("--threads must be positive".into());
        }
        if self.mode == Mode::Verify && !self.axes.is_empty() {
            return fail("sweep axes given to a single run".into());
        }
        self.params.check_finite()
    }
}
