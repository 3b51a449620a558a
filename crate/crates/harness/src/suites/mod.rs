//! Named verification suites.
//!
//! Every suite fans out over independent work items (dimension × seed ×
//! family) and merges their checks in a fixed order, so reports do not
//! depend on the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use codazzi_core::chart::{ChartStructure, Residual, DEFAULT_H};
use codazzi_core::sample::rng;
use codazzi_core::tolerance::{fd_tol, in_convergence_band, CONVERGENCE_BAND};
use rand::Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::generate::{as_chart, generate, Family, GeneratorSpec};
use crate::report::{Checks, Environment, ResidualReport, Series};
use crate::structure::ChartDoc;

pub mod algebraic;
pub mod anchors;
pub mod bounds;
pub mod differential;
pub mod file;
pub mod integral;
pub mod simons;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebraic,
    Differential,
    Simons,
    Bounds,
    Integral,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Algebraic,
        Suite::Differential,
        Suite::Simons,
        Suite::Bounds,
        Suite::Integral,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebraic => "algebraic",
            Suite::Differential => "differential",
            Suite::Simons => "simons",
            Suite::Bounds => "bounds",
            Suite::Integral => "integral",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::Usage(format!("unknown suite `{s}` (expected one of {names:?})"))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Number of generator seeds, `0..seeds`.
    pub seeds: usize,
    /// Finite-difference step.
    pub h: f64,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    /// Random points per seed and dimension in the algebraic sweep.
    pub samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seeds: 3,
            h: DEFAULT_H,
            tol_scale: 1.0,
            samples: 200,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::Usage("--seeds must be at least 1".into()));
        }
        if !(self.h > 0.0 && self.h < 0.1) {
            return Err(Error::Usage(format!(
                "--h must lie in (0, 0.1), got {}",
                self.h
            )));
        }
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(Error::Usage(format!(
                "--tol-scale must be positive, got {}",
                self.tol_scale
            )));
        }
        if self.samples == 0 {
            return Err(Error::Usage("samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).collect()
    }
}

/// What a suite contributes to a report.
#[derive(Debug, Default)]
pub struct Output {
    pub checks: Checks,
    pub convergence: Vec<Series>,
    pub quadrature: BTreeMap<String, Value>,
}

impl Output {
    fn extend(&mut self, other: Output) {
        self.checks.extend(other.checks);
        self.convergence.extend(other.convergence);
        self.quadrature.extend(other.quadrature);
    }
}

pub fn run_output(suite: Suite, cfg: &SuiteConfig) -> Result<Output> {
    cfg.validate()?;
    Ok(match suite {
        Suite::Algebraic => algebraic::run(cfg),
        Suite::Differential => differential::run(cfg)?,
        Suite::Simons => simons::run(cfg)?,
        Suite::Bounds => bounds::run(cfg)?,
        Suite::Integral => integral::run(cfg)?,
        Suite::All => {
            let mut out = Output::default();
            for s in [
                Suite::Algebraic,
                Suite::Differential,
                Suite::Simons,
                Suite::Bounds,
                Suite::Integral,
            ] {
                out.extend(run_output(s, cfg)?);
            }
            out
        }
    })
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<ResidualReport> {
    let start = Instant::now();
    let out = run_output(suite, cfg)?;
    Ok(ResidualReport {
        suite: suite.name().to_string(),
        checks: out.checks.finish(),
        environment: Environment {
            h: cfg.h,
            tol_scale: cfg.tol_scale,
            seeds: cfg.seed_list(),
            quadrature: out.quadrature,
        },
        convergence: out.convergence,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// SplitMix64 over the parts, for per-item seeds.
pub fn mix(parts: &[u64]) -> u64 {
    let mut z = 0x9e37_79b9_7f4a_7c15u64;
    for &p in parts {
        z = z.wrapping_add(p).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

/// `1e-12·(1 + magnitude)·scale`, the tolerance of exact algebra.
pub fn alg_tol(magnitude: f64, scale: f64) -> f64 {
    fd_tol(0.0, 0.0, magnitude, scale)
}

/// How far a signed slack falls below zero; NaN stays NaN.
pub fn violation(slack: f64) -> f64 {
    if slack >= 0.0 {
        0.0
    } else {
        -slack
    }
}

/// Runs `f` on every item in parallel and merges the results in item order.
pub fn fan_out<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> Result<Checks> + Sync + Send,
) -> Result<Checks> {
    let parts: Vec<Result<Checks>> = items.par_iter().map(f).collect();
    let mut checks = Checks::default();
    for part in parts {
        checks.extend(part?);
    }
    Ok(checks)
}

/// Interior points of a chart, away from the non-periodic edges.
pub fn sample_points(cs: &ChartStructure, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            cs.domain()
                .iter()
                .map(|&(lo, hi)| {
                    let pad = 0.1 * (hi - lo);
                    r.random_range(lo + pad..=hi - pad)
                })
                .collect()
        })
        .collect()
}

pub fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// A generated chart at step `h`, or the reason it is infeasible.
pub struct Generated {
    pub doc: ChartDoc,
    pub chart: ChartStructure,
}

pub fn generated_chart(
    spec: &GeneratorSpec,
    h: f64,
) -> Result<std::result::Result<Generated, String>> {
    match generate(spec) {
        Ok(s) => {
            let doc = as_chart(&s);
            let chart = doc.build()?.with_h(h);
            Ok(Ok(Generated { doc, chart }))
        }
        Err(e) if e.is_infeasible() => Ok(Err(e.to_string())),
        Err(e) => Err(e),
    }
}

/// Records that generation of `family` met its predicates (or was
/// infeasible) under the check `generate/<family>`.
pub fn record_generation(
    checks: &mut Checks,
    family: Family,
    outcome: std::result::Result<(), &str>,
    location: &str,
) {
    let id = format!("generate/{}", family.short());
    match outcome {
        Ok(()) => checks.add(id, anchors::GENERATOR, 0.0, 0.0, location),
        Err(reason) => checks.skip(id, anchors::GENERATOR, format!("{location}: {reason}")),
    }
}

pub fn family_location(family: Family, n: usize, seed: u64) -> String {
    format!("{} n={n} seed={seed}", family.short())
}

pub fn residual_check(
    checks: &mut Checks,
    r: &Residual,
    suffix: &str,
    h: f64,
    scale: f64,
    location: &str,
) {
    checks.add(
        format!("{}{suffix}", r.id),
        anchors::of(r.id),
        r.value,
        r.tol(h, scale),
        location,
    );
}

pub fn gap_check(
    checks: &mut Checks,
    g: &codazzi_core::chart::Gap,
    suffix: &str,
    h: f64,
    scale: f64,
    location: &str,
) {
    checks.add(
        format!("{}{suffix}", g.id),
        anchors::of(g.id),
        violation(g.value),
        fd_tol(g.c, h, g.magnitude, scale),
        location,
    );
}

/// Steps of every convergence study.
pub const STEPS: [f64; 3] = [4e-3, 2e-3, 1e-3];

/// Residuals at or below this multiple of `1 + magnitude` are rounding
/// noise and carry no convergence information.
pub const CONVERGENCE_FLOOR: f64 = 1e-9;

/// Adds `convergence/<id><suffix>`: the worst distance of the two halving
/// ratios from 4, against the half-width of the accepted band.
pub fn convergence_check(
    out: &mut Output,
    id: &str,
    suffix: &str,
    rs: &[Residual; 3],
    location: &str,
) {
    if rs
        .iter()
        .any(|r| r.value <= CONVERGENCE_FLOOR * (1.0 + r.magnitude))
    {
        return;
    }
    let ratios = [rs[0].value / rs[1].value, rs[1].value / rs[2].value];
    let (lo, hi) = CONVERGENCE_BAND;
    let centre = 0.5 * (lo + hi);
    let residual = ratios
        .iter()
        .map(|q| (q - centre).abs())
        .fold(0.0, f64::max);
    debug_assert_eq!(
        residual <= 0.5 * (hi - lo),
        ratios.iter().all(|&q| in_convergence_band(q)) || residual.is_nan()
    );
    let loc = format!("{location} ratios {:.4} {:.4}", ratios[0], ratios[1]);
    out.checks.add(
        format!("convergence/{id}{suffix}"),
        anchors::CONVERGENCE,
        residual,
        0.5 * (hi - lo),
        loc,
    );
    out.convergence.push(Series {
        id: format!("{id}{suffix}"),
        points: STEPS.iter().zip(rs).map(|(&h, r)| (h, r.value)).collect(),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("bogus".parse::<Suite>(), Err(Error::Usage(_))));
    }

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        for bad in [
            SuiteConfig {
                seeds: 0,
                ..Default::default()
            },
            SuiteConfig {
                h: 0.0,
                ..Default::default()
            },
            SuiteConfig {
                tol_scale: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Usage(_))));
        }
    }

    #[test]
    fn violations() {
        assert_eq!(violation(1.0), 0.0);
        assert_eq!(violation(-2.0), 2.0);
        assert!(violation(f64::NAN).is_nan());
        assert_ne!(mix(&[1, 2]), mix(&[2, 1]));
    }
}
