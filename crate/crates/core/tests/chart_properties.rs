//! Property tests of the chart calculus at random points of the fixture
//! charts.

mod common;

use codazzi_core::chart::{
    conjugate_coeffs, cubic_simons_residuals, curvature_hat, find, ricci_decomposition_residuals,
    statistical_connections, ChartStructure,
};
use codazzi_core::point::lagrangian_gauss_residual;
use codazzi_core::sample::{random_cubic, random_metric, rng};
use codazzi_core::tolerance::{fd_tol, C_CURVATURE};
use codazzi_core::{CurvTensor, Tensor};
use common::*;
use proptest::prelude::*;
use rand::Rng;

/// Interior point of the chart from unit-cube coordinates.
fn at(cs: &ChartStructure, t: &[f64]) -> Vec<f64> {
    cs.domain()
        .iter()
        .zip(t)
        .map(|(&(lo, hi), &t)| {
            let pad = 0.05 * (hi - lo);
            lo + pad + t * (hi - lo - 2.0 * pad)
        })
        .collect()
}

fn unit3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 3)
}

fn constant_chart(n: usize, seed: u64) -> ChartStructure {
    let mut r = rng(seed);
    let g = random_metric(n, &mut r).unwrap().components().clone();
    let a = random_cubic(n, &mut r).unwrap();
    chart(
        n,
        vec![(0.0, TAU); n],
        true,
        move |_| g.clone(),
        move |_| a.clone(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn levi_civita_curvature_has_curvature_symmetries(n in 2usize..=3, t in unit3()) {
        let cs = generic(n);
        let r = curvature_hat(&cs, &at(&cs, &t[..n])).unwrap();
        let m = 1.0 + r.tensor().max_abs();
        prop_assert_eq!(r.antisymmetry_defect(), 0.0);
        prop_assert!(r.bianchi_defect() < 1e-10 * m, "{}", r.bianchi_defect());
    }

    #[test]
    fn ricci_chain_is_positive_semidefinite(n in 2usize..=3, t in unit3(), which in 0usize..3) {
        let cs = match which {
            0 => generic(n),
            1 => hessian(n),
            _ => constant_chart(n, t[0].to_bits()),
        };
        let rd = ricci_decomposition_residuals(&cs, &at(&cs, &t[..n])).unwrap();
        let gap = rd.gaps.iter().find(|g| g.id == "ricci-chain").unwrap();
        prop_assert!(gap.value >= -1e-8, "{gap:?}");
    }

    #[test]
    fn conjugate_symmetry_criteria_vanish_together(n in 2usize..=3, t in unit3()) {
        let criteria = |cs: &ChartStructure| {
            let x = at(cs, &t[..n]);
            let sc = statistical_connections(cs, &x).unwrap();
            let tol = fd_tol(C_CURVATURE, cs.h(), sc.r.tensor().max_abs(), 1.0);
            (sc.criteria, sc.conjugate_symmetric, tol)
        };
        let mut symmetric = vec![hessian(n)];
        if n == 2 {
            symmetric.push(conformal_torus());
        }
        for cs in &symmetric {
            let (c, flag, tol) = criteria(cs);
            prop_assert!(flag);
            prop_assert!(c.r_minus_rbar < tol && c.asym_nabla_a < tol && c.skew_kl < tol, "{c:?} {tol}");
        }
        let (c, flag, tol) = criteria(&generic(n));
        prop_assert!(!flag);
        prop_assert!(
            c.r_minus_rbar > 10.0 * tol && c.asym_nabla_a > 10.0 * tol && c.skew_kl > 10.0 * tol,
            "{c:?} {tol}"
        );
    }

    #[test]
    fn conjugation_is_an_involution(n in 2usize..=5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_metric(n, &mut r).unwrap();
        let mut dg = Tensor::covariant(n, 3);
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    let v = r.random_range(-1.0..=1.0);
                    dg.set(&[i, j, k], v);
                    dg.set(&[i, k, j], v);
                }
            }
        }
        let gamma = Tensor::from_fn(n, 2, 1, |_| r.random_range(-1.0..=1.0));
        let twice = conjugate_coeffs(&g, &dg, &conjugate_coeffs(&g, &dg, &gamma));
        prop_assert!(twice.sub(&gamma).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn constant_fields_meet_the_bracket_and_lagrangian_specializations(seed in any::<u64>()) {
        let cs = constant_chart(2, seed);
        let x = [0.3, 1.7];
        let simons = cubic_simons_residuals(&cs, &x).unwrap();
        let h = cs.h();
        for id in ["bracket-constant-curvature", "lagrangian"] {
            let r = find(&simons.specializations, id);
            prop_assert!(r.is_some(), "{id} not applicable");
            let r = r.unwrap();
            prop_assert!(r.passes(h, 1.0), "{r:?}");
        }
        let t = &simons.terms;
        let kappa = fit_r0(&t.g, &t.bracket);
        let lg = lagrangian_gauss_residual(&t.sp, &t.r_hat, -kappa).unwrap();
        prop_assert!(lg.tensor < 1e-8 && lg.scalar.abs() < 1e-8, "{lg:?}");
    }
}

/// Least-squares `κ` in `T ≈ κR₀`; on a flat chart `R̂ − [K,K] = −κR₀`.
fn fit_r0(g: &codazzi_core::MetricPoint, t: &CurvTensor) -> f64 {
    let r0 = CurvTensor::r0(g);
    let num: f64 = t
        .tensor()
        .data()
        .iter()
        .zip(r0.tensor().data())
        .map(|(a, b)| a * b)
        .sum();
    let den: f64 = r0.tensor().data().iter().map(|b| b * b).sum();
    num / den
}

#[test]
fn constant_curvature_family_meets_every_specialization() {
    let cs = g3(0.8, -0.3);
    let simons = cubic_simons_residuals(&cs, &[1.0, 2.0]).unwrap();
    for id in [
        "bracket-constant-curvature",
        "trace-free",
        "trace-free-constant-curvature",
        "lagrangian",
    ] {
        let r = find(&simons.specializations, id).unwrap_or_else(|| panic!("{id} not applicable"));
        assert!(r.value < 1e-9, "{r:?}");
    }
}

#[test]
fn curved_lagrangian_example() {
    let cs = conformal_torus();
    for x in [[0.4, 0.9], [2.0, 5.0], [4.4, 3.1]] {
        let simons = cubic_simons_residuals(&cs, &x).unwrap();
        let r = find(&simons.specializations, "lagrangian").unwrap();
        assert!(r.passes(cs.h(), 1.0), "{r:?}");
    }
}
