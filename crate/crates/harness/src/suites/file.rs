//! Suites applied to a single ingested structure.

use std::time::Instant;

use codazzi_core::bounds::discrete_max_probe;
use codazzi_core::sphere::{ros_cubic_functional, ros_residual, SphereQuadrature};
use codazzi_core::tolerance::{fd_tol, C_CURVATURE};
use serde_json::json;

use super::anchors as an;
use super::integral::{CUBIC_LATTICE, CUBIC_STEP_DIVISOR, ROS_CUBIC_TOL, ROS_LATTICE, ROS_TOL};
use super::{
    algebraic, differential, fmt_point, mix, sample_points, simons, violation, Generated, Suite,
    SuiteConfig,
};
use crate::error::Result;
use crate::generate::as_chart;
use crate::report::{Checks, Environment, ResidualReport};
use crate::structure::Structure;

const TAG: u64 = 0xf11e;

/// Runs the checks of `suite` that apply to `s`. Points enter the chart
/// suites as constant fields on the flat torus; `cfg.seeds` chart points
/// are sampled.
pub fn check_structure(s: &Structure, suite: Suite, cfg: &SuiteConfig) -> Result<ResidualReport> {
    cfg.validate()?;
    let start = Instant::now();
    let doc = as_chart(s);
    let g = Generated {
        chart: doc.build()?.with_h(cfg.h),
        doc,
    };
    let points = match s {
        Structure::Point(_) => vec![vec![1.0; g.doc.n]],
        Structure::Chart(_) => sample_points(&g.chart, cfg.seeds, mix(&[TAG, g.doc.n as u64])),
    };
    let mut checks = Checks::default();
    let mut quadrature = std::collections::BTreeMap::new();
    let wants = |x: Suite| suite == x || suite == Suite::All;
    for (i, x) in points.iter().enumerate() {
        let loc = format!("x={}", fmt_point(x));
        if wants(Suite::Algebraic) {
            let sp = g.chart.stat_point(x)?;
            algebraic::general_point_checks(
                &mut checks,
                &sp,
                mix(&[TAG, i as u64]),
                cfg.tol_scale,
                &loc,
            );
            algebraic::trace_free_checks(
                &mut checks,
                &sp,
                &sp.trace_free_part()?,
                cfg.tol_scale,
                &loc,
            );
        }
        if wants(Suite::Differential) {
            differential::chart_point_checks(
                &mut checks,
                None,
                &g.chart,
                x,
                cfg.tol_scale,
                true,
                &loc,
            )?;
        }
        if wants(Suite::Simons) {
            simons::point_checks(&mut checks, &g, x, "", cfg.tol_scale, &loc)?;
        }
    }
    let periodic = g.chart.periodic().iter().all(|&p| p);
    if wants(Suite::Bounds) {
        if periodic {
            let cs = &g.chart;
            let u = |x: &[f64]| cs.stat_point(x).map(|sp| sp.norm_a_sq());
            let p = discrete_max_probe(cs, &u, super::bounds::PROBE_LATTICE)?;
            let tol = fd_tol(C_CURVATURE, cs.h(), p.magnitude, cfg.tol_scale);
            checks.add(
                "max-probe/u",
                an::MAX_PROBE,
                violation(-p.laplacian),
                tol,
                format!("argmax={}", fmt_point(&p.argmax)),
            );
        } else {
            checks.skip("max-probe/u", an::MAX_PROBE, "chart is not periodic");
        }
    }
    if wants(Suite::Integral) {
        if periodic && g.doc.n <= 3 {
            let n = g.doc.n;
            let m = if n == 2 {
                ROS_LATTICE
            } else {
                CUBIC_LATTICE[1]
            };
            for (name, f) in &g.doc.fields {
                if f.degree < 2 {
                    continue;
                }
                let field = g.doc.field(name)?;
                let q = SphereQuadrature::exact_for_degree(n, f.degree - 1)?;
                let r = ros_residual(&g.chart, &field, m, &q)?;
                let loc = format!("field={name} lattice={m} magnitude={:.3e}", r.magnitude);
                checks.add(
                    format!("ros/{name}"),
                    an::ROS,
                    r.value.abs(),
                    ROS_TOL * cfg.tol_scale,
                    loc,
                );
            }
            let m = CUBIC_LATTICE[n - 2];
            let fine = g.chart.with_h(cfg.h / CUBIC_STEP_DIVISOR);
            let t = ros_cubic_functional(&fine, m, &SphereQuadrature::exact_for_degree(n, 6)?)?;
            let loc = format!("lattice={m}");
            let tol = ROS_CUBIC_TOL * cfg.tol_scale;
            if t.hypotheses_hold {
                checks.add(
                    "ros-cubic-functional",
                    an::ROS_CUBIC,
                    t.sum.abs(),
                    tol,
                    &loc,
                );
            } else {
                checks.skip(
                    "ros-cubic-functional",
                    an::ROS_CUBIC,
                    format!("{loc}: hypotheses fail"),
                );
            }
            if t.conjugate_symmetric {
                checks.add(
                    "ros-cubic-functional-full",
                    an::ROS_CUBIC_FULL,
                    t.full_sum.abs(),
                    tol,
                    &loc,
                );
            }
            quadrature.insert("method".to_string(), json!("product-gauss"));
            quadrature.insert("lattice".to_string(), json!([ROS_LATTICE, m]));
        } else {
            checks.skip(
                "ros-cubic-functional",
                an::ROS_CUBIC,
                "needs a periodic chart of dimension 2 or 3",
            );
        }
    }
    Ok(ResidualReport {
        suite: suite.name().to_string(),
        checks: checks.finish(),
        environment: Environment {
            h: cfg.h,
            tol_scale: cfg.tol_scale,
            seeds: cfg.seed_list(),
            quadrature,
        },
        convergence: Vec::new(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
