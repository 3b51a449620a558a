//! Command-line interface: `verify`, `gen` and `check`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use codazzi_core::chart::DEFAULT_H;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::generate::{generate, Family, GeneratorSpec};
use crate::report::{Counts, ResidualReport};
use crate::structure::{emit, ingest};
use crate::suites::{file::check_structure, run_suite, Suite, SuiteConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "codazzi",
    version,
    about = "Numerical verification of statistical-structure identities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named suite and write a residual report.
    Verify(VerifyArgs),
    /// Write a generated structure file.
    Gen(GenArgs),
    /// Run a suite's applicable checks on a structure file.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Multiplies every tolerance.
    #[arg(long, env = "CODAZZI_DEFAULT_TOL_SCALE", default_value_t = 1.0)]
    pub tol_scale: f64,
    /// Finite-difference step.
    #[arg(long, default_value_t = DEFAULT_H)]
    pub h: f64,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the checks as CSV, next to the report or to standard output.
    #[arg(long)]
    pub emit_csv: bool,
    /// Exit with status 3 when a check was skipped for an unmet precondition.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// algebraic, differential, simons, bounds, integral or all.
    #[arg(long)]
    pub suite: String,
    /// Number of generator seeds.
    #[arg(long, default_value_t = 3)]
    pub seeds: usize,
    /// Random points per seed and dimension in the algebraic sweep.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Residual-versus-h plot of the convergence studies, as SVG.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// G1..G5 or the full family name.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Family parameter as key=value; the value is read as JSON, else as a string.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Exit with status 3 (instead of 2) for infeasible parameters.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long)]
    pub suite: String,
    /// Sample points on a chart.
    #[arg(long, default_value_t = 3)]
    pub points: usize,
    #[command(flatten)]
    pub common: Common,
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_param(p: &str) -> Result<(String, Value)> {
    let (k, v) = p
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("--param `{p}` is not KEY=VALUE")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

fn summary(r: &ResidualReport) -> String {
    let Counts {
        pass,
        fail,
        skipped,
    } = r.counts();
    let mut s = format!(
        "{}: {pass} pass, {fail} fail, {skipped} precondition-skipped ({:.0} ms)",
        r.suite, r.elapsed_ms
    );
    for c in r.failures() {
        s.push_str(&format!(
            "\n  FAIL {}: residual {:e} > tolerance {:e} at {}",
            c.id,
            c.residual.unwrap_or(f64::NAN),
            c.tolerance,
            c.location
        ));
    }
    s
}

fn deliver(r: &ResidualReport, common: &Common, plot: Option<&Path>) -> Result<i32> {
    match &common.report {
        Some(p) => write(p, &r.to_json())?,
        None => print!("{}", r.to_json()),
    }
    if common.emit_csv {
        match &common.report {
            Some(p) => write(&p.with_extension("csv"), &r.to_csv())?,
            None => print!("{}", r.to_csv()),
        }
    }
    if let Some(p) = plot {
        write(p, &r.to_svg())?;
    }
    eprintln!("{}", summary(r));
    let c = r.counts();
    Ok(if c.fail > 0 {
        EXIT_FAIL
    } else if common.strict && c.skipped > 0 {
        EXIT_INFEASIBLE
    } else {
        EXIT_PASS
    })
}

fn verify(a: &VerifyArgs) -> Result<i32> {
    let suite: Suite = a.suite.parse()?;
    let cfg = SuiteConfig {
        seeds: a.seeds,
        h: a.common.h,
        tol_scale: a.common.tol_scale,
        samples: a.samples,
    };
    let report = run_suite(suite, &cfg)?;
    deliver(&report, &a.common, a.plot.as_deref())
}

fn gen(a: &GenArgs) -> Result<i32> {
    let family: Family = a.family.parse()?;
    let mut spec = GeneratorSpec::new(family, a.n, a.seed);
    for p in &a.params {
        let (k, v) = parse_param(p)?;
        spec = spec.with(&k, v);
    }
    let s = generate(&spec)?;
    write(&a.out, &emit(&s))?;
    Ok(EXIT_PASS)
}

fn check(a: &CheckArgs) -> Result<i32> {
    let suite: Suite = a.suite.parse()?;
    let s = ingest(&a.file)?;
    let cfg = SuiteConfig {
        seeds: a.points,
        h: a.common.h,
        tol_scale: a.common.tol_scale,
        ..Default::default()
    };
    let report = check_structure(&s, suite, &cfg)?;
    deliver(&report, &a.common, None)
}

/// Runs a parsed command and maps the outcome to an exit status.
pub fn run(cli: &Cli) -> i32 {
    let (result, strict) = match &cli.command {
        Command::Verify(a) => (verify(a), a.common.strict),
        Command::Gen(a) => (gen(a), a.strict),
        Command::Check(a) => (check(a), a.common.strict),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if strict && e.is_infeasible() {
                EXIT_INFEASIBLE
            } else {
                EXIT_USAGE
            }
        }
    }
}
