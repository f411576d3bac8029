use std::io::Write;

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

pub const HEADER: [&str; 6] = [
    "experiment",
    "params",
    "measured",
    "bound",
    "pass",
    "seconds",
];

/// How `measured` is compared against `bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// Lower-bound experiments: `measured >= bound - tol`.
    AtLeast,
    /// `measured <= bound + tol`.
    AtMost,
    /// Identity experiments: `|measured - bound| <= tol max(1, |measured|, |bound|)`.
    /// Absolute for values of order one, relative for large ones.
    Close,
}

impl Check {
    pub fn holds(self, measured: f64, bound: f64, tol: f64) -> bool {
        match self {
            Check::AtLeast => measured >= bound - tol,
            Check::AtMost => measured <= bound + tol,
            Check::Close => {
                let scale = 1f64.max(measured.abs()).max(bound.abs());
                (measured - bound).abs() <= tol * scale
            }
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Check::AtLeast => ">=",
            Check::AtMost => "<=",
            Check::Close => "~",
        }
    }
}

/// A check before its verdict: what an experiment hands back.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub experiment: String,
    pub params: String,
    pub measured: f64,
    pub bound: f64,
    pub check: Check,
    pub tol: f64,
}

impl Measurement {
    pub fn new(experiment: impl Into<String>, params: &str, measured: f64, bound: f64) -> Self {
        Self {
            experiment: experiment.into(),
            params: params.to_string(),
            measured,
            bound,
            check: Check::AtLeast,
            tol: 0.0,
        }
    }

    pub fn at_most(mut self, tol: f64) -> Self {
        self.check = Check::AtMost;
        self.tol = tol;
        self
    }

    pub fn at_least(mut self, tol: f64) -> Self {
        self.check = Check::AtLeast;
        self.tol = tol;
        self
    }

    pub fn close(mut self, tol: f64) -> Self {
        self.check = Check::Close;
        self.tol = tol;
        self
    }

    pub fn judge(self, tol_override: Option<f64>, seconds: f64) -> ReportRow {
        let tol = tol_override.unwrap_or(self.tol);
        ReportRow {
            pass: self.check.holds(self.measured, self.bound, tol),
            experiment: self.experiment,
            params: self.params,
            measured: self.measured,
            bound: self.bound,
            seconds,
            check: self.check,
            tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub params: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    pub seconds: f64,
    #[serde(skip)]
    pub check: Check,
    #[serde(skip)]
    pub tol: f64,
}

impl ReportRow {
    pub fn summary(&self) -> String {
        format!(
            "{} {} [{}]: {} {} {} (tol {:e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.experiment,
            self.params,
            sig12(self.measured),
            self.check.symbol(),
            sig12(self.bound),
            self.tol
        )
    }
}

/// Twelve significant digits in scientific notation.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// `key=value` pairs joined with `;` so that the field never needs quoting.
#[derive(Debug, Default)]
pub struct ParamList(Vec<String>);

impl ParamList {
    pub fn num(mut self, key: &str, v: impl std::fmt::Display) -> Self {
        self.0.push(format!("{key}={v}"));
        self
    }

    pub fn point(mut self, key: &str, v: &[f64]) -> Self {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        self.0.push(format!("{key}=({})", parts.join(" ")));
        self
    }

    pub fn finish(&self) -> String {
        self.0.join(";")
    }
}

pub fn write_report(
    rows: &[ReportRow],
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(HEADER)?;
            for r in rows {
                w.write_record([
                    r.experiment.clone(),
                    r.params.clone(),
                    sig12(r.measured),
                    sig12(r.bound),
                    r.pass.to_string(),
                    sig12(r.seconds),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
