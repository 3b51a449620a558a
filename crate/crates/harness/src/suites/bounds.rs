//! The constant-curvature family against the bound formulas, the formulas'
//! internal consistency, and the discrete maximum probe.

use codazzi_core::bounds::{
    calabi_sup_bound, discrete_max_probe, inf_u_dichotomy, parallel_a_band, simons_sandwich_check,
    sup_u_interval, surface_bounds, Interval, ParallelBand,
};
use codazzi_core::chart::statistical_connections;
use codazzi_core::point::constant_curvature_residual;
use codazzi_core::sample::rng;
use codazzi_core::tolerance::{fd_tol, C_CURVATURE, C_SIMONS};
use rand::Rng;

use super::anchors as an;
use super::{
    alg_tol, family_location, fan_out, fmt_point, generated_chart, mix, record_generation, Output,
    SuiteConfig,
};
use crate::error::Result;
use crate::generate::{Family, GeneratorSpec};
use crate::report::Checks;

const TAG: u64 = 0xb0_0d5;

/// Random `H < 0` per seed in the formula checks.
pub const FORMULA_SAMPLES: usize = 100;

/// Lattice of the maximum probe.
pub const PROBE_LATTICE: usize = 16;

pub fn run(cfg: &SuiteConfig) -> Result<Output> {
    let seeds = cfg.seed_list();
    let mut checks = fan_out(&seeds, |&s| constant_curvature_checks(s, cfg))?;
    checks.extend(fan_out(&seeds, |&s| Ok(formula_checks(s, cfg.tol_scale)))?);
    checks.extend(fan_out(&seeds, |&s| max_probe_checks(s, cfg))?);
    Ok(Output {
        checks,
        ..Default::default()
    })
}

/// Distance of `x` from `[lo, hi]`.
fn outside(i: Interval, x: f64) -> f64 {
    (i.lo - x).max(x - i.hi).max(0.0)
}

/// Parameters of the constant-curvature family at `seed`.
pub fn g3_params(seed: u64) -> (f64, f64) {
    let mut r = rng(mix(&[TAG, seed]));
    (r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0))
}

pub fn constant_curvature_checks(seed: u64, cfg: &SuiteConfig) -> Result<Checks> {
    let mut checks = Checks::default();
    let scale = cfg.tol_scale;
    let (a, b) = g3_params(seed);
    let family = Family::ConstantCurvature2d;
    let loc = format!("{} a={a:.6} b={b:.6}", family_location(family, 2, seed));
    let spec = GeneratorSpec::new(family, 2, seed)
        .with("a", a)
        .with("b", b)
        .with("chart", true);
    let g = match generated_chart(&spec, cfg.h)? {
        Ok(g) => g,
        Err(reason) => {
            record_generation(&mut checks, family, Err(&reason), &loc);
            return Ok(checks);
        }
    };
    let cs = &g.chart;
    let x = vec![1.0, 2.0];
    let loc = format!("{loc} x={}", fmt_point(&x));
    let hh = -2.0 * (a * a + b * b);
    let n = 2;

    let sc = statistical_connections(cs, &x)?;
    let met = cs.metric(&x)?;
    let r = constant_curvature_residual(&sc.r, &met, hh)?;
    checks.add(
        "g3-constant-curvature",
        an::G3_CONSTANT,
        r,
        1e-10 * scale,
        &loc,
    );

    let u = cs.stat_point(&x)?.norm_a_sq();
    let calabi = calabi_sup_bound(n, hh)?;
    checks.add(
        "g3-calabi-equality",
        an::CALABI_EQUALITY,
        (u - calabi).abs(),
        alg_tol(u, scale),
        &loc,
    );

    match parallel_a_band(n, hh) {
        ParallelBand::Band(band) => {
            let r = (band.lo - u).abs().max((band.hi - u).abs());
            checks.add(
                "g3-parallel-band",
                an::PARALLEL_BAND,
                r,
                alg_tol(u, scale),
                &loc,
            );
        }
        ParallelBand::Trivial => checks.skip(
            "g3-parallel-band",
            an::PARALLEL_BAND,
            format!("{loc}: H = {hh} is not negative"),
        ),
    }

    // ∇̂A = 0, so both infimum and supremum of ‖∇̂A‖² vanish
    let d = inf_u_dichotomy(n, hh, 0.0)?;
    let miss = if d.feasible {
        (d.branch_hi - u).max(0.0).min((u - d.branch_lo).max(0.0))
    } else {
        0.0
    };
    checks.add(
        "g3-inf-dichotomy",
        an::INF_DICHOTOMY,
        miss,
        alg_tol(u, scale),
        &loc,
    );
    let s = sup_u_interval(n, hh, 0.0)?;
    let miss = s.sup_u.map_or(f64::INFINITY, |i| outside(i, u));
    checks.add(
        "g3-sup-interval",
        an::SUP_INTERVAL,
        miss,
        alg_tol(u, scale),
        &loc,
    );
    let sb = surface_bounds(hh, hh, 0.0, 0.0)?;
    let sup_miss = sb.sup_u.map_or(f64::INFINITY, |i| outside(i, u));
    let inf_miss = sb.inf_u.map_or(f64::INFINITY, |d| {
        if d.admits(u, alg_tol(u, scale)) {
            0.0
        } else {
            f64::INFINITY
        }
    });
    checks.add(
        "g3-surface-bounds",
        an::SURFACE_BOUNDS,
        sup_miss.max(inf_miss),
        alg_tol(u, scale),
        &loc,
    );

    let sw = simons_sandwich_check(cs, &x, hh)?;
    let worst = sw.lower.value.abs().max(sw.upper.value.abs());
    let tol = fd_tol(C_SIMONS, cs.h(), sw.lower.magnitude, scale);
    checks.add(
        "g3-simons-sandwich-equality",
        an::of("simons-sandwich-lower"),
        worst,
        tol,
        &loc,
    );
    Ok(checks)
}

/// Closed-form relations between the bound formulas at random `H < 0`.
pub fn formula_checks(seed: u64, scale: f64) -> Checks {
    let mut checks = Checks::default();
    let mut r = rng(mix(&[TAG, 0xf0, seed]));
    for i in 0..FORMULA_SAMPLES {
        let hh = -r.random_range(1e-3..=10.0);
        let n = r.random_range(2..=6usize);
        let loc = format!("seed={seed} sample={i} H={hh:.6} n={n}");
        let h2 = hh * hh;

        let s = sup_u_interval(2, hh, 0.0).expect("H < 0");
        checks.add(
            "nabla-bound-dimension-two",
            an::NABLA_BOUND_N2,
            (s.nabla_bound - 1.5 * h2).abs(),
            alg_tol(h2, scale),
            &loc,
        );

        // same operation order as the threshold test, so the boundary is hit exactly
        let threshold = 1.5 * hh * hh;
        let sb = surface_bounds(hh, hh, threshold, threshold).expect("H₂ ≤ H₁ < 0");
        let width = sb
            .sup_u
            .map_or(f64::INFINITY, |i| i.width().abs().max((i.lo + hh).abs()));
        checks.add(
            "surface-sup-threshold",
            an::SURFACE_THRESHOLD,
            width,
            alg_tol(h2, scale),
            &loc,
        );

        let m = n as f64 + 1.0;
        let d = inf_u_dichotomy(n, hh, h2 * m * m / 6.0).expect("H < 0");
        let target = m * -hh / 3.0;
        let r0 = (d.branch_hi - d.branch_lo)
            .abs()
            .max((d.branch_lo - target).abs());
        checks.add(
            "dichotomy-boundary",
            an::DICHOTOMY_BOUNDARY,
            r0,
            alg_tol(target, scale),
            &loc,
        );
        // just inside the boundary the branches approach each other
        let inner = inf_u_dichotomy(n, hh, h2 * m * m / 6.0 * (1.0 - 1e-12)).expect("H < 0");
        let gap = if inner.feasible {
            (inner.branch_hi - inner.branch_lo).abs()
        } else {
            f64::INFINITY
        };
        checks.add(
            "dichotomy-boundary-limit",
            an::DICHOTOMY_BOUNDARY,
            gap,
            1e-5 * (1.0 + target) * scale,
            &loc,
        );

        let nb = sup_u_interval(n, hh, 0.0).expect("H < 0").nabla_bound;
        let at = sup_u_interval(n, hh, nb).expect("H < 0");
        let width = at.sup_u.map_or(f64::INFINITY, |i| i.width());
        let c = n as f64 * (n as f64 - 1.0) * -hh;
        checks.add(
            "sup-interval-boundary",
            an::SUP_BOUNDARY,
            width,
            1e-6 * (1.0 + c) * scale,
            &loc,
        );

        let band = match parallel_a_band(n, hh) {
            ParallelBand::Band(b) => b.hi,
            ParallelBand::Trivial => f64::NAN,
        };
        let calabi = calabi_sup_bound(n, hh).expect("H < 0");
        checks.add(
            "calabi-band-endpoint",
            an::CALABI_BAND,
            (band - calabi).abs(),
            alg_tol(calabi, scale),
            &loc,
        );
    }
    checks
}

/// `Δf ≤ tol` at lattice maxima of scalars on the periodic family.
pub fn max_probe_checks(seed: u64, cfg: &SuiteConfig) -> Result<Checks> {
    let mut checks = Checks::default();
    let family = Family::PeriodicTrig;
    let loc0 = family_location(family, 2, seed);
    let g = match generated_chart(&GeneratorSpec::new(family, 2, seed), cfg.h)? {
        Ok(g) => g,
        Err(reason) => {
            record_generation(&mut checks, family, Err(&reason), &loc0);
            return Ok(checks);
        }
    };
    let cs = &g.chart;
    let u = |x: &[f64]| cs.stat_point(x).map(|sp| sp.norm_a_sq());
    let log_det = |x: &[f64]| cs.metric(x).map(|m| m.det().ln());
    let probes: [(&str, &dyn Fn(&[f64]) -> codazzi_core::Result<f64>); 2] =
        [("u", &u), ("log-det-g", &log_det)];
    for (name, f) in probes {
        let p = discrete_max_probe(cs, f, PROBE_LATTICE)?;
        let loc = format!("{loc0} argmax={}", fmt_point(&p.argmax));
        let tol = fd_tol(C_CURVATURE, cs.h(), p.magnitude, cfg.tol_scale);
        checks.add(
            format!("max-probe/{name}/{}", family.short()),
            an::MAX_PROBE,
            super::violation(-p.laplacian),
            tol,
            loc,
        );
    }
    Ok(checks)
}
