//! Pointwise identities and inequalities on seeded random points, plus the
//! shipped two-dimensional example.

use codazzi_core::point::{
    bracket_kk, check_ineq_eighth, check_ineq_n2over3, check_ineq_quarter, eigenvalues_rel, lpq,
    n2over3_residual, null_direction, rho_k, ric_k, ric_k_direct, scalar_gap_bounds, sectional_k,
    CERT_TOL,
};
use codazzi_core::sample::{random_stat_point, random_unit, rng};
use codazzi_core::tensor::{inner, lower_last, orthonormal_frame, raise_last, to_frame};
use codazzi_core::{CurvTensor, Error as CoreError, StatPoint, Tensor, MAX_DIM};
use rand::Rng;

use super::anchors as an;
use super::{alg_tol, fan_out, mix, violation, Output, SuiteConfig};
use crate::report::Checks;
use crate::structure::{ingest_str, Structure};

/// The two-dimensional example with `K(e₂,e₂) = 3e₂`, as shipped.
pub const EQUALITY_EXAMPLE: &str = include_str!("../../examples/equality-example.json");

/// Dimensions of the random sweep.
pub const DIMS: std::ops::RangeInclusive<usize> = 2..=6;

const TAG: u64 = 0xa19e_b7a1;

pub fn run(cfg: &SuiteConfig) -> Output {
    let mut checks = example_checks(cfg.tol_scale);
    debug_assert!(*DIMS.end() <= MAX_DIM);
    let items: Vec<(usize, u64)> = DIMS
        .flat_map(|n| cfg.seed_list().into_iter().map(move |s| (n, s)))
        .collect();
    let sweep = fan_out(&items, |&(n, seed)| Ok(sweep_unit(n, seed, cfg)))
        .expect("the sweep has no fallible steps");
    checks.extend(sweep);
    Output {
        checks,
        ..Default::default()
    }
}

pub fn example_point() -> StatPoint {
    match ingest_str(EQUALITY_EXAMPLE).expect("shipped example parses") {
        Structure::Point(p) => p.stat_point().expect("shipped example is a valid point"),
        Structure::Chart(_) => unreachable!("the example is a point"),
    }
}

/// Checks on the shipped example, the file the first acceptance criterion reads.
pub fn example_checks(scale: f64) -> Checks {
    let mut checks = Checks::default();
    point_example_checks(&mut checks, &example_point(), scale);
    checks
}

pub fn point_example_checks(checks: &mut Checks, sp: &StatPoint, scale: f64) {
    let loc = "equality-example";
    let k = sp.k();
    let expected = [
        ((0, 0), [0.0, 1.0]),
        ((0, 1), [1.0, 0.0]),
        ((1, 1), [0.0, 3.0]),
    ];
    let mut defect: f64 = 0.0;
    for ((i, j), v) in expected {
        for (m, want) in v.iter().enumerate() {
            defect = defect.max((k.get(&[i, j, m]) - want).abs());
        }
    }
    checks.add(
        "equality-example/difference-tensor",
        an::EXAMPLE_K,
        defect,
        alg_tol(3.0, scale),
        loc,
    );

    match check_ineq_eighth(sp, &[1.0, 0.0]) {
        Ok(c) => {
            let r = (c.lhs - 2.0).abs().max((c.rhs - 2.0).abs());
            checks.add(
                "equality-example/eighth-equality",
                an::EXAMPLE_EIGHTH,
                r,
                alg_tol(2.0, scale),
                loc,
            );
        }
        Err(e) => checks.skip(
            "equality-example/eighth-equality",
            an::EXAMPLE_EIGHTH,
            e.to_string(),
        ),
    }
    let c = check_ineq_n2over3(sp);
    checks.add(
        "equality-example/n2over3-equality",
        an::EXAMPLE_N2OVER3,
        c.residual.abs(),
        alg_tol(sp.norm_a_sq(), scale),
        loc,
    );
    checks.add(
        "equality-example/n2over3-certificate",
        an::EXAMPLE_CERTIFICATE,
        c.certificate.max_residual(),
        CERT_TOL * scale,
        loc,
    );
}

fn random_tensor(n: usize, deg: usize, r: &mut impl Rng) -> Tensor {
    let len = n.pow(deg as u32);
    Tensor::from_data(
        n,
        deg,
        0,
        (0..len).map(|_| r.random_range(-1.0..=1.0)).collect(),
    )
    .expect("nᵈ entries")
}

fn sweep_unit(n: usize, seed: u64, cfg: &SuiteConfig) -> Checks {
    let mut checks = Checks::default();
    let scale = cfg.tol_scale;
    for i in 0..cfg.samples {
        let s = mix(&[TAG, n as u64, seed, i as u64]);
        let loc = format!("n={n} seed={seed} sample={i}");
        let sp = random_stat_point(n, s, true, false).expect("random points are valid");
        general_point_checks(&mut checks, &sp, s, scale, &loc);
        let tf = sp.trace_free_part().expect("projection of a valid point");
        trace_free_checks(&mut checks, &sp, &tf, scale, &loc);
    }
    checks
}

/// Every check that holds at an arbitrary point.
pub fn general_point_checks(checks: &mut Checks, sp: &StatPoint, seed: u64, scale: f64, loc: &str) {
    let n = sp.dim();
    let g = sp.metric();
    let mut r = rng(seed ^ 0x5151);

    let rk = ric_k(sp);
    let direct = ric_k_direct(sp);
    let mag = rk.max_abs().max(direct.max_abs());
    checks.add(
        "ric-k-direct-trace",
        an::RIC_K,
        rk.sub(&direct).expect("same shape").max_abs(),
        alg_tol(mag, scale),
        loc,
    );
    let rho = rho_k(sp);
    let mag = rho.via_trace.abs().max(sp.norm_a_sq());
    checks.add(
        "rho-k-norms",
        an::RHO_K,
        (rho.via_trace - rho.via_norms).abs(),
        alg_tol(mag, scale),
        loc,
    );

    for _ in 0..3 {
        let u = random_unit(n, &mut r);
        let c = check_ineq_quarter(sp, &u).expect("unit vector");
        let mag = c.lhs.abs().max(c.rhs.abs());
        checks.add(
            "quarter-inequality",
            an::QUARTER,
            violation(c.slack()),
            alg_tol(mag, scale),
            loc,
        );
    }

    let u = null_direction(sp, seed ^ 0xe1e1);
    match check_ineq_eighth(sp, &u) {
        Ok(c) => {
            let mag = c.lhs.abs().max(c.rhs.abs());
            checks.add(
                "eighth-inequality",
                an::EIGHTH,
                violation(c.slack()),
                alg_tol(mag, scale),
                loc,
            );
        }
        Err(CoreError::Precondition(reason)) => {
            checks.skip("eighth-inequality", an::EIGHTH, format!("{loc}: {reason}"))
        }
        Err(e) => panic!("unexpected error from the null direction: {e}"),
    }

    let mag = sp.norm_e_sq().max(sp.norm_a_sq());
    checks.add(
        "n2over3-inequality",
        an::N2OVER3,
        violation(n2over3_residual(sp)),
        alg_tol(mag, scale),
        loc,
    );

    let gap = scalar_gap_bounds(sp);
    let slack = (gap.gap - gap.lower_13).min(gap.gap - gap.lower_n2);
    let mag = sp.norm_a_sq().max(sp.norm_e_sq());
    checks.add(
        "scalar-gap-bounds",
        an::SCALAR_GAP,
        violation(slack),
        alg_tol(mag, scale),
        loc,
    );

    let x = random_unit(n, &mut r);
    let y = random_unit(n, &mut r);
    let (c0, c1, c2, c3) = (1.3, -0.4, 0.7, 2.1);
    let u: Vec<f64> = x.iter().zip(&y).map(|(a, b)| c0 * a + c1 * b).collect();
    let v: Vec<f64> = x.iter().zip(&y).map(|(a, b)| c2 * a + c3 * b).collect();
    if let (Ok(k1), Ok(k2)) = (sectional_k(sp, &x, &y), sectional_k(sp, &u, &v)) {
        // the Gram–Schmidt step loses digits when x, y are nearly parallel
        checks.add(
            "sectional-k-plane",
            an::SECTIONAL_K,
            (k1 - k2).abs(),
            1e-10 * (1.0 + k1.abs()) * scale,
            loc,
        );
    }

    let deg = 1 + (seed % 4) as usize;
    let t = random_tensor(n, deg, &mut r);
    let s = random_tensor(n, deg, &mut r);
    let b = orthonormal_frame(g);
    let naive: f64 = to_frame(&t, &b)
        .data()
        .iter()
        .zip(to_frame(&s, &b).data())
        .map(|(p, q)| p * q)
        .sum();
    let ip = inner(g, &t, &s).expect("same shape");
    // frame entries grow with the condition number of g
    checks.add(
        "frame-invariance",
        an::FRAME_INVARIANCE,
        (ip - naive).abs(),
        1e-11 * (1.0 + naive.abs()) * scale,
        loc,
    );

    let k = raise_last(g, sp.cubic()).expect("matching dimension");
    let back = lower_last(g, &k).expect("matching dimension");
    let a = sp.cubic().to_tensor();
    checks.add(
        "raise-lower",
        an::RAISE_LOWER,
        back.sub(&a).expect("same shape").max_abs(),
        alg_tol(a.max_abs(), scale),
        loc,
    );

    let mut sym: f64 = 0.0;
    let mut mag: f64 = 0.0;
    for c in [bracket_kk(sp), CurvTensor::r0(g)] {
        mag = mag.max(c.tensor().max_abs());
        sym = sym
            .max(c.antisymmetry_defect())
            .max(c.skew_kl_defect())
            .max(c.bianchi_defect());
    }
    checks.add(
        "bracket-symmetries",
        an::BRACKET_SYMMETRIES,
        sym,
        alg_tol(mag, scale),
        loc,
    );
}

/// Checks on the trace-free projection `tf` of `sp`.
pub fn trace_free_checks(
    checks: &mut Checks,
    sp: &StatPoint,
    tf: &StatPoint,
    scale: f64,
    loc: &str,
) {
    let n = tf.dim();
    let e = tf.norm_e_sq().max(0.0).sqrt();
    checks.add(
        "trace-free-projection",
        an::TRACE_FREE_PROJECTION,
        e,
        alg_tol(sp.norm_e_sq().sqrt(), scale),
        loc,
    );

    let l = lpq(tf);
    let sum = l.sum();
    let mag = sum.abs().max(l.u * l.u).max(l.pairing.abs());
    checks.add(
        "lpq-pairing",
        an::LPQ_PAIRING,
        (sum + l.pairing).abs(),
        alg_tol(mag, scale),
        loc,
    );
    checks.add(
        "lpq-calabi-lower",
        an::LPQ_CALABI,
        violation(sum - l.calabi_lower(n)),
        alg_tol(mag, scale),
        loc,
    );
    checks.add(
        "lpq-li-upper",
        an::LPQ_LI,
        violation(l.li_upper() - sum),
        alg_tol(mag, scale),
        loc,
    );
    if n == 2 {
        checks.add(
            "lpq-dimension-two-equality",
            an::LPQ_N2,
            (sum - l.li_upper()).abs(),
            1e-10 * (1.0 + mag) * scale,
            loc,
        );
    }

    let ev = eigenvalues_rel(tf.metric(), &ric_k(tf)).expect("degree 2");
    let top = ev.last().copied().unwrap_or(0.0);
    let mag = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    checks.add(
        "trace-free-ric-k-negative",
        an::RIC_K_TRACE_FREE,
        violation(-top),
        alg_tol(mag, scale),
        loc,
    );
}
