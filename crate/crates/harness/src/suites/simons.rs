//! Simons-type, Ricci and Weitzenböck identities, with halving studies.

use codazzi_core::chart::{
    cubic_simons_residuals, ricci_identity_residual, simons_residual, sym2_simons_residual,
    weitzenbock_residual, ChartStructure, Residual, TensorField,
};
use codazzi_core::Error as CoreError;
use rayon::prelude::*;

use super::{
    convergence_check, family_location, fan_out, fmt_point, gap_check, generated_chart, mix,
    record_generation, residual_check, sample_points, Generated, Output, SuiteConfig, STEPS,
};
use crate::error::{Error, Result};
use crate::generate::{Family, GeneratorSpec};
use crate::report::Checks;
use crate::structure::ChartDoc;

const TAG: u64 = 0x5130_0045;

pub fn run(cfg: &SuiteConfig) -> Result<Output> {
    let mut items = Vec::new();
    for f in Family::ALL {
        for &n in super::differential::dims(f) {
            for s in cfg.seed_list() {
                items.push((f, n, s));
            }
        }
    }
    let checks = fan_out(&items, |&(f, n, s)| unit(f, n, s, cfg))?;
    let mut out = Output {
        checks,
        ..Default::default()
    };
    out.extend(convergence(
        &[
            Family::RandomSmooth,
            Family::HessianPotential,
            Family::PeriodicTrig,
        ],
        &[2, 3],
    )?);
    Ok(out)
}

fn unit(family: Family, n: usize, seed: u64, cfg: &SuiteConfig) -> Result<Checks> {
    let mut checks = Checks::default();
    let loc0 = family_location(family, n, seed);
    let g = match generated_chart(&GeneratorSpec::new(family, n, seed), cfg.h)? {
        Ok(g) => g,
        Err(reason) => {
            record_generation(&mut checks, family, Err(&reason), &loc0);
            return Ok(checks);
        }
    };
    record_generation(&mut checks, family, Ok(()), &loc0);
    let x = sample_points(&g.chart, 1, mix(&[TAG, family as u64, n as u64, seed])).remove(0);
    let loc = format!("{loc0} x={}", fmt_point(&x));
    point_checks(
        &mut checks,
        &g,
        &x,
        &format!("/{}", family.short()),
        cfg.tol_scale,
        &loc,
    )?;
    Ok(checks)
}

fn field(doc: &ChartDoc, name: &str) -> Result<Option<impl TensorField>> {
    if doc.fields.contains_key(name) {
        doc.field(name).map(Some)
    } else {
        Ok(None)
    }
}

fn precondition(e: Error) -> Result<String> {
    match e {
        Error::Core(CoreError::Precondition(m)) => Ok(m),
        other => Err(other),
    }
}

/// Every Simons-type identity whose field is present and whose hypotheses
/// hold at `x`.
pub fn point_checks(
    checks: &mut Checks,
    g: &Generated,
    x: &[f64],
    suffix: &str,
    scale: f64,
    loc: &str,
) -> Result<()> {
    let cs = &g.chart;
    let h = cs.h();
    for name in ["s", "tau", "beta"] {
        if let Some(f) = field(&g.doc, name)? {
            let s = format!("/{name}{suffix}");
            residual_check(checks, &simons_residual(cs, &f, x)?, &s, h, scale, loc);
            residual_check(
                checks,
                &ricci_identity_residual(cs, &f, x)?,
                &s,
                h,
                scale,
                loc,
            );
        }
    }
    if let Some(tau) = field(&g.doc, "tau")? {
        let w = weitzenbock_residual(cs, &tau, x)?;
        residual_check(checks, &w.vector, suffix, h, scale, loc);
        residual_check(checks, &w.scalar, suffix, h, scale, loc);
    }
    if let Some(beta) = field(&g.doc, "beta")? {
        match sym2_simons_residual(cs, &beta, x).map_err(Error::from) {
            Ok(r) => residual_check(checks, &r.residual, suffix, h, scale, loc),
            Err(e) => {
                let why = precondition(e)?;
                checks.skip(
                    format!("sym2-simons{suffix}"),
                    super::anchors::of("sym2-simons"),
                    format!("{loc}: {why}"),
                );
            }
        }
    }
    match cubic_simons_residuals(cs, x) {
        Ok(c) => {
            for r in c.residuals.iter().chain(&c.specializations) {
                residual_check(checks, r, suffix, h, scale, loc);
            }
            for gap in &c.gaps {
                gap_check(checks, gap, suffix, h, scale, loc);
            }
        }
        // not conjugate symmetric: the formula does not apply
        Err(CoreError::Precondition(_)) => {}
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

/// Residuals studied under halving of `h` for `family`.
fn studied(
    family: Family,
    doc: &ChartDoc,
    cs: &ChartStructure,
    x: &[f64],
) -> Result<Vec<Residual>> {
    let mut rs = Vec::new();
    match family {
        Family::RandomSmooth => {
            let s = doc.field("s")?;
            rs.push(simons_residual(cs, &s, x)?);
            rs.push(ricci_identity_residual(cs, &s, x)?);
            let w = weitzenbock_residual(cs, &doc.field("tau")?, x)?;
            rs.push(w.vector);
            rs.push(w.scalar);
            rs.push(sym2_simons_residual(cs, &doc.field("beta")?, x)?.residual);
        }
        _ => rs.extend(cubic_simons_residuals(cs, x)?.residuals),
    }
    Ok(rs)
}

/// Halving studies at seed 0 of each family and dimension.
pub fn convergence(families: &[Family], dims: &[usize]) -> Result<Output> {
    let items: Vec<(Family, usize)> = families
        .iter()
        .flat_map(|&f| dims.iter().map(move |&n| (f, n)))
        .collect();
    let parts: Vec<Result<Output>> = items
        .par_iter()
        .map(|&(family, n)| {
            let mut out = Output::default();
            let Ok(g) = generated_chart(&GeneratorSpec::new(family, n, 0), STEPS[0])? else {
                return Ok(out);
            };
            let x =
                sample_points(&g.chart, 1, mix(&[TAG, 0xc0, family as u64, n as u64])).remove(0);
            let per_h = STEPS
                .iter()
                .map(|&h| studied(family, &g.doc, &g.chart.with_h(h), &x))
                .collect::<Result<Vec<_>>>()?;
            let loc = format!("{} x={}", family_location(family, n, 0), fmt_point(&x));
            for (i, r) in per_h[0].iter().enumerate() {
                let rs = [r.clone(), per_h[1][i].clone(), per_h[2][i].clone()];
                convergence_check(
                    &mut out,
                    r.id,
                    &format!("/{}/n{n}", family.short()),
                    &rs,
                    &loc,
                );
            }
            Ok(out)
        })
        .collect();
    let mut out = Output::default();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
