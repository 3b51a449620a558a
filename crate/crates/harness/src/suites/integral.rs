//! Sphere fiber identities and the integral formulas over the unit sphere
//! bundle of periodic charts.

use codazzi_core::chart::TensorField;
use codazzi_core::sample::{random_metric, rng};
use codazzi_core::sphere::{
    fiber_identity_residual, integrate_sphere, ros_cubic_functional, ros_refinement,
    sphere_codiff_residual, SphereQuadrature,
};
use codazzi_core::tolerance::{fd_tol, C_CONNECTION};
use codazzi_core::{MetricPoint, Tensor};
use rand::Rng;
use serde_json::json;

use super::anchors as an;
use super::{
    family_location, fan_out, generated_chart, mix, record_generation, Output, SuiteConfig,
};
use crate::error::Result;
use crate::generate::{Family, GeneratorSpec};
use crate::report::Checks;

const TAG: u64 = 0x1e_6ea1;

/// Gauss nodes per angular factor of the product rule.
pub const FIBER_NODES: usize = 8;
/// Random tensors per seed, dimension and degree in the fiber checks.
pub const FIBER_TENSORS: usize = 20;
pub const MC_NODES: usize = 100_000;
/// Great-circle step of the sphere codifferential.
pub const CODIFF_STEP: f64 = 1e-4;
/// Coarse lattice of the Ros refinement (the fine one doubles it).
pub const ROS_LATTICE: usize = 64;
/// Lattices of the cubic bundle functional in dimensions 2 and 3.
pub const CUBIC_LATTICE: [usize; 2] = [32, 10];
/// Absolute tolerances of the two bundle integrals.
pub const ROS_TOL: f64 = 1e-6;
pub const ROS_CUBIC_TOL: f64 = 1e-5;
pub const FIBER_TOL: f64 = 1e-9;
/// The cubic bundle functional uses `h / CUBIC_STEP_DIVISOR`: its sum is
/// dominated by second-order truncation of the nested derivatives.
pub const CUBIC_STEP_DIVISOR: f64 = 4.0;
/// Allowed shortfall of the refinement ratio below 4, a tenth of a percent:
/// the ratio of two second-order errors carries rounding in its third digit.
pub const ROS_SHRINK_TOL: f64 = 4e-3;
/// Relative size below which a bundle integral is rounding noise.
pub const ROS_FLOOR: f64 = 1e-10;

pub fn run(cfg: &SuiteConfig) -> Result<Output> {
    let seeds = cfg.seed_list();
    let mut checks = fan_out(&seeds, |&s| Ok(fiber_checks(s, cfg.tol_scale)))?;
    checks.extend(fan_out(&seeds, |&s| ros_checks(s, cfg))?);
    checks.extend(fan_out(&seeds, |&s| cubic_functional_checks(s, cfg))?);
    let mut out = Output {
        checks,
        ..Default::default()
    };
    out.quadrature
        .insert("method".into(), json!("product-gauss"));
    out.quadrature
        .insert("fiber_nodes".into(), json!(FIBER_NODES));
    out.quadrature
        .insert("lattice".into(), json!([ROS_LATTICE, 2 * ROS_LATTICE]));
    out.quadrature
        .insert("cubic_lattice".into(), json!(CUBIC_LATTICE));
    out.quadrature
        .insert("monte_carlo_nodes".into(), json!(MC_NODES));
    out.quadrature
        .insert("cubic_step".into(), json!(cfg.h / CUBIC_STEP_DIVISOR));
    Ok(out)
}

fn random_tensor(n: usize, k: usize, r: &mut impl Rng) -> Tensor {
    Tensor::from_fn(n, k, 0, |_| r.random_range(-1.0..=1.0))
}

pub fn fiber_checks(seed: u64, scale: f64) -> Checks {
    let mut checks = Checks::default();
    for n in 2..=3 {
        let q = SphereQuadrature::product_gauss(n, FIBER_NODES).expect("n ≥ 2");
        for k in 2..=4 {
            let mut r = rng(mix(&[TAG, seed, n as u64, k as u64]));
            for t in 0..FIBER_TENSORS {
                let g = if t % 2 == 0 {
                    MetricPoint::identity(n).expect("n ≥ 1")
                } else {
                    random_metric(n, &mut r).expect("random metrics are SPD")
                };
                let s = random_tensor(n, k, &mut r);
                let i0 = t % k;
                let loc = format!("seed={seed} n={n} k={k} tensor={t} i0={i0}");
                let res = fiber_identity_residual(&g, &s, i0, &q).expect("shapes agree");
                checks.add(
                    format!("fiber-identity/n{n}"),
                    an::FIBER,
                    res,
                    FIBER_TOL * scale,
                    &loc,
                );

                let cd = sphere_codiff_residual(&s, i0, &q, CODIFF_STEP).expect("shapes agree");
                let mag = (n + k) as f64 * s.max_abs() * (k * n) as f64;
                let tol = fd_tol(C_CONNECTION, CODIFF_STEP, mag, scale);
                checks.add(
                    format!("sphere-codifferential/n{n}"),
                    an::CODIFF,
                    cd.max_pointwise,
                    tol,
                    &loc,
                );
                checks.add(
                    format!("sphere-codifferential-integral/n{n}"),
                    an::CODIFF_INTEGRAL,
                    cd.integral.abs(),
                    tol,
                    &loc,
                );
            }
        }
    }
    let n = 3;
    let mut r = rng(mix(&[TAG, seed, 0x3c]));
    let s = random_tensor(n, 4, &mut r);
    let f = |v: &[f64]| Ok(s.eval(&[v, v, v, v]));
    let exact = integrate_sphere(
        &SphereQuadrature::product_gauss(n, FIBER_NODES).expect("n ≥ 2"),
        &f,
    )
    .expect("pure");
    let mc = integrate_sphere(
        &SphereQuadrature::monte_carlo(n, MC_NODES, mix(&[TAG, seed])).expect("n ≥ 2"),
        &f,
    )
    .expect("pure");
    let loc = format!(
        "seed={seed} n={n} k=4 mc={:.6}±{:.2e}",
        mc.value, mc.std_error
    );
    checks.add(
        "sphere-quadrature-monte-carlo",
        an::FIBER_MC,
        (mc.value - exact.value).abs(),
        5.0 * mc.std_error,
        loc,
    );
    checks
}

fn periodic(
    seed: u64,
    n: usize,
    cfg: &SuiteConfig,
    checks: &mut Checks,
) -> Result<Option<super::Generated>> {
    let family = Family::PeriodicTrig;
    match generated_chart(&GeneratorSpec::new(family, n, seed), cfg.h)? {
        Ok(g) => Ok(Some(g)),
        Err(reason) => {
            record_generation(
                checks,
                family,
                Err(&reason),
                &family_location(family, n, seed),
            );
            Ok(None)
        }
    }
}

/// The Ros formula for the degree-3 field and the cubic form of the
/// periodic family, with the refinement study.
pub fn ros_checks(seed: u64, cfg: &SuiteConfig) -> Result<Checks> {
    let mut checks = Checks::default();
    let Some(g) = periodic(seed, 2, cfg, &mut checks)? else {
        return Ok(checks);
    };
    let cs = &g.chart;
    let q = SphereQuadrature::exact_for_degree(2, 2)?;
    let s = g.doc.field("s")?;
    let a = |y: &[f64]| cs.cubic(y).map(|c| c.to_tensor());
    let fields: [(&str, &dyn TensorField); 2] = [("s", &s), ("A", &a)];
    for (name, f) in fields {
        let rf = ros_refinement(cs, f, ROS_LATTICE, &q)?;
        let loc = format!(
            "{} field={name} coarse={:.3e} fine={:.3e} magnitude={:.3e}",
            family_location(Family::PeriodicTrig, 2, seed),
            rf.coarse.value,
            rf.fine.value,
            rf.coarse.magnitude
        );
        let scale = cfg.tol_scale;
        checks.add(
            format!("ros/{name}"),
            an::ROS,
            rf.coarse.value.abs(),
            ROS_TOL * scale,
            &loc,
        );
        checks.add(
            format!("ros-refined/{name}"),
            an::ROS,
            rf.fine.value.abs(),
            ROS_TOL * scale,
            &loc,
        );
        let floor = ROS_FLOOR * (1.0 + rf.coarse.magnitude);
        let shortfall = if rf.coarse.value.abs() <= floor {
            0.0
        } else {
            super::violation(rf.ratio() - 4.0)
        };
        checks.add(
            format!("ros-shrink/{name}"),
            an::ROS_SHRINK,
            shortfall,
            ROS_SHRINK_TOL * scale,
            format!("{loc} ratio={:.4}", rf.ratio()),
        );
    }
    Ok(checks)
}

pub fn cubic_functional_checks(seed: u64, cfg: &SuiteConfig) -> Result<Checks> {
    let mut checks = Checks::default();
    for (n, m) in [(2, CUBIC_LATTICE[0]), (3, CUBIC_LATTICE[1])] {
        let Some(g) = periodic(seed, n, cfg, &mut checks)? else {
            continue;
        };
        let q = SphereQuadrature::exact_for_degree(n, 6)?;
        let t = ros_cubic_functional(&g.chart.with_h(cfg.h / CUBIC_STEP_DIVISOR), m, &q)?;
        let loc = format!(
            "{} lattice={m} terms=({:.3e}, {:.3e}, {:.3e})",
            family_location(Family::PeriodicTrig, n, seed),
            t.term_nabla_k,
            t.term_curvature,
            t.term_tau
        );
        let tol = ROS_CUBIC_TOL * cfg.tol_scale;
        if t.hypotheses_hold {
            checks.add(
                format!("ros-cubic-functional/n{n}"),
                an::ROS_CUBIC,
                t.sum.abs(),
                tol,
                &loc,
            );
        } else {
            checks.skip(
                format!("ros-cubic-functional/n{n}"),
                an::ROS_CUBIC,
                format!("{loc}: hypotheses fail"),
            );
        }
        if t.conjugate_symmetric {
            checks.add(
                format!("ros-cubic-functional-full/n{n}"),
                an::ROS_CUBIC_FULL,
                t.full_sum.abs(),
                tol,
                &loc,
            );
        }
    }
    Ok(checks)
}
