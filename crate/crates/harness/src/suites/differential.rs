//! Connection and curvature identities on every generator family.

use std::collections::BTreeMap;

use codazzi_core::chart::{
    metricity_residual, ricci_decomposition_residuals, sectional_nabla, statistical_connections,
    ChartStructure, Residual,
};
use codazzi_core::point::{constant_curvature_residual, rho_k, ric_k, ric_k_direct};
use codazzi_core::sample::{random_unit, rng};
use codazzi_core::tolerance::{conjugate_threshold, fd_tol, C_CONNECTION, C_CURVATURE};

use super::anchors as an;
use super::{
    alg_tol, convergence_check, family_location, fan_out, fmt_point, gap_check, generated_chart,
    mix, record_generation, residual_check, sample_points, Output, SuiteConfig, STEPS,
};
use crate::error::Result;
use crate::generate::{Family, GeneratorSpec};
use crate::report::Checks;

const TAG: u64 = 0xd1ff_0001;

/// Sample points per generated chart.
pub const POINTS: usize = 2;

pub fn dims(family: Family) -> &'static [usize] {
    match family {
        Family::ConstantCurvature2d => &[2],
        _ => &[2, 3],
    }
}

pub fn run(cfg: &SuiteConfig) -> Result<Output> {
    let mut out = Output {
        checks: cross_checks(cfg, &Family::ALL)?,
        ..Default::default()
    };
    for n in [2, 3] {
        convergence_study(&mut out, Family::RandomSmooth, n)?;
    }
    Ok(out)
}

/// The per-point identities on `families` over every seed.
pub fn cross_checks(cfg: &SuiteConfig, families: &[Family]) -> Result<Checks> {
    let mut items = Vec::new();
    for &f in families {
        for &n in dims(f) {
            for s in cfg.seed_list() {
                items.push((f, n, s));
            }
        }
    }
    fan_out(&items, |&(f, n, s)| unit(f, n, s, cfg))
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
    let points = sample_points(&g.chart, POINTS, mix(&[TAG, family as u64, n as u64, seed]));
    for (i, x) in points.iter().enumerate() {
        let loc = format!("{loc0} x={}", fmt_point(x));
        chart_point_checks(
            &mut checks,
            Some(family),
            &g.chart,
            x,
            cfg.tol_scale,
            i == 0,
            &loc,
        )?;
    }
    Ok(checks)
}

/// Every differential identity at `x`; `family` selects the family
/// predicate and the id suffix.
pub fn chart_point_checks(
    checks: &mut Checks,
    family: Option<Family>,
    cs: &ChartStructure,
    x: &[f64],
    scale: f64,
    sectional: bool,
    loc: &str,
) -> Result<()> {
    let h = cs.h();
    let suffix = family
        .map(|f| format!("/{}", f.short()))
        .unwrap_or_default();
    let sc = statistical_connections(cs, x)?;
    for r in &sc.residuals {
        residual_check(checks, r, &suffix, h, scale, loc);
    }
    let rd = ricci_decomposition_residuals(cs, x)?;
    for r in &rd.residuals {
        residual_check(checks, r, &suffix, h, scale, loc);
    }
    for gap in &rd.gaps {
        gap_check(checks, gap, &suffix, h, scale, loc);
    }

    let gamma_mag = sc.gamma_hat.coeffs().max_abs();
    let g = cs.metric(x)?;
    let metricity = metricity_residual(cs, x)?;
    let tol = fd_tol(C_CONNECTION, h, gamma_mag * g.components().max_abs(), scale);
    checks.add(
        format!("metricity{suffix}"),
        an::METRICITY,
        metricity,
        tol,
        loc,
    );
    let torsion = sc
        .gamma_hat
        .torsion()
        .max(sc.gamma.torsion())
        .max(sc.gamma_bar.torsion());
    checks.add(
        format!("torsion-free{suffix}"),
        an::TORSION,
        torsion,
        alg_tol(sc.gamma.coeffs().max_abs(), scale),
        loc,
    );

    if sectional {
        let mut r = rng(mix(&[TAG, x.len() as u64, x[0].to_bits()]));
        let (u, v) = (random_unit(x.len(), &mut r), random_unit(x.len(), &mut r));
        if let Ok(s) = sectional_nabla(cs, x, &u, &v) {
            residual_check(checks, &s.residual, &suffix, h, scale, loc);
        }
    }

    let sp = cs.stat_point(x)?;
    let rk = ric_k(&sp);
    let direct = ric_k_direct(&sp);
    let mag = rk.max_abs().max(direct.max_abs());
    let defect = rk.sub(&direct)?.max_abs();
    checks.add(
        format!("ric-k-direct-trace{suffix}"),
        an::RIC_K,
        defect,
        alg_tol(mag, scale),
        loc,
    );
    let rho = rho_k(&sp);
    let mag = rho.via_trace.abs().max(sp.norm_a_sq());
    checks.add(
        format!("rho-k-norms{suffix}"),
        an::RHO_K,
        (rho.via_trace - rho.via_norms).abs(),
        alg_tol(mag, scale),
        loc,
    );

    match family {
        Some(Family::HessianPotential) => {
            let r = sc.r.tensor().max_abs();
            let tol = fd_tol(C_CURVATURE, h, sc.r_hat.tensor().max_abs(), scale);
            checks.add(
                format!("hessian-flatness{suffix}"),
                an::HESSIAN_FLAT,
                r,
                tol,
                loc,
            );
        }
        Some(Family::ConstantCurvature2d) => {
            let a = sp.cubic();
            let hh = -2.0 * (a.get(0, 0, 0).powi(2) + a.get(1, 1, 1).powi(2));
            let r = constant_curvature_residual(&sc.r, &g, hh)?;
            checks.add(
                format!("g3-constant-curvature{suffix}"),
                an::G3_CONSTANT,
                r,
                1e-10 * scale,
                loc,
            );
        }
        Some(Family::PeriodicTrig) => {
            let asym = sc.criteria.asym_nabla_a;
            checks.add(
                format!("conjugate-symmetric{suffix}"),
                an::CONJUGATE_SYMMETRIC,
                asym,
                conjugate_threshold(h, scale),
                loc,
            );
        }
        _ => {}
    }
    Ok(())
}

/// Halving studies of every connection and Ricci residual of `family` at
/// seed 0.
fn convergence_study(out: &mut Output, family: Family, n: usize) -> Result<()> {
    let Ok(g) = generated_chart(&GeneratorSpec::new(family, n, 0), STEPS[0])? else {
        return Ok(());
    };
    let x = sample_points(&g.chart, 1, mix(&[TAG, 0xc0, n as u64]))[0].clone();
    let mut by_id: BTreeMap<&'static str, Vec<Residual>> = BTreeMap::new();
    let mut order = Vec::new();
    for &h in &STEPS {
        let cs = g.chart.with_h(h);
        let sc = statistical_connections(&cs, &x)?;
        let rd = ricci_decomposition_residuals(&cs, &x)?;
        for r in sc.residuals.into_iter().chain(rd.residuals) {
            if !by_id.contains_key(r.id) {
                order.push(r.id);
            }
            by_id.entry(r.id).or_default().push(r);
        }
    }
    let loc = format!("{} x={}", family_location(family, n, 0), fmt_point(&x));
    for id in order {
        if let Ok(rs) = <[Residual; 3]>::try_from(by_id.remove(id).unwrap_or_default()) {
            convergence_check(out, id, &format!("/{}/n{n}", family.short()), &rs, &loc);
        }
    }
    Ok(())
}
