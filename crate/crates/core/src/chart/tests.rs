use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::expr::Expr;
use crate::linalg::Mat;
use crate::tensor::{CubicForm, CurvTensor, Tensor};

fn chart(
    n: usize,
    domain: Vec<(f64, f64)>,
    g: impl Fn(&[f64]) -> Mat + Send + Sync + 'static,
    a: impl Fn(&[f64]) -> CubicForm + Send + Sync + 'static,
) -> ChartStructure {
    ChartStructure::new(
        Arc::new(FnFields::new(n, g, a)),
        domain,
        vec![false; n],
        DEFAULT_H,
    )
    .unwrap()
}

fn zero_a(n: usize) -> impl Fn(&[f64]) -> CubicForm + Send + Sync + 'static {
    move |_| CubicForm::zeros(n).unwrap()
}

fn flat(n: usize) -> ChartStructure {
    chart(
        n,
        vec![(-1.0, 1.0); n],
        move |_| Mat::identity(n),
        zero_a(n),
    )
}

fn poincare() -> ChartStructure {
    chart(
        2,
        vec![(-1.0, 1.0), (0.5, 2.0)],
        |x| Mat::identity(2).scale(1.0 / (x[1] * x[1])),
        zero_a(2),
    )
}

/// Unit round sphere in stereographic coordinates.
fn sphere(n: usize) -> ChartStructure {
    chart(
        n,
        vec![(-1.0, 1.0); n],
        move |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Mat::identity(n).scale(4.0 / ((1.0 + r2) * (1.0 + r2)))
        },
        zero_a(n),
    )
}

fn g3_flat(a: f64, b: f64) -> ChartStructure {
    chart(
        2,
        vec![(-1.0, 1.0); 2],
        |_| Mat::identity(2),
        move |_| {
            let mut c = CubicForm::zeros(2).unwrap();
            c.set(0, 0, 0, a);
            c.set(0, 1, 1, -a);
            c.set(1, 1, 1, b);
            c.set(0, 0, 1, -b);
            c
        },
    )
}

fn hessian_xy() -> ChartStructure {
    let phi = Expr::parse("x1^2*x2^2/2 + (x1^2 + x2^2)/2").unwrap();
    hessian_from_potential(&phi, 2, vec![(-0.5, 0.5); 2], DEFAULT_H).unwrap()
}

#[test]
fn christoffel_examples() {
    let g = christoffel(&flat(3), &[0.1, 0.2, 0.3]).unwrap();
    assert!(g.coeffs().max_abs() < 1e-12);

    let cs = chart(
        2,
        vec![(-2.0, 2.0); 2],
        |x| Mat::diag(&[x[0] * x[0] + 1.0, x[1] * x[1] + 1.0]),
        zero_a(2),
    );
    let g = christoffel(&cs, &[1.0, 0.0]).unwrap();
    let mut want = Tensor::zeros(2, 2, 1);
    want.set(&[0, 0, 0], 0.5);
    assert!(g.coeffs().sub(&want).unwrap().max_abs() < 1e-6);
    assert_eq!(g.torsion(), 0.0);
    assert!(metricity_residual(&cs, &[1.0, 0.0]).unwrap() < 1e-6);

    let g = christoffel(&poincare(), &[0.0, 1.0]).unwrap();
    let mut want = Tensor::zeros(2, 2, 1);
    want.set(&[0, 1, 0], -1.0);
    want.set(&[1, 0, 0], -1.0);
    want.set(&[0, 0, 1], 1.0);
    want.set(&[1, 1, 1], -1.0);
    assert!(g.coeffs().sub(&want).unwrap().max_abs() < 1e-5);
}

#[test]
fn boundary_margin_is_enforced() {
    let cs = flat(2);
    assert!(matches!(
        christoffel(&cs, &[1.0 - 1e-3, 0.0]),
        Err(Error::BoundaryMargin { axis: 0, .. })
    ));
    assert!(christoffel(&cs, &[1.0 - 2.5e-3, 0.0]).is_ok());
    let torus = ChartStructure::new(
        Arc::new(FnFields::new(2, |_| Mat::identity(2), zero_a(2))),
        vec![(0.0, 1.0); 2],
        vec![true; 2],
        DEFAULT_H,
    )
    .unwrap();
    assert!(christoffel(&torus, &[0.0, 1.0]).is_ok());
}

#[test]
fn non_spd_metric_rejected_at_construction() {
    let r = ChartStructure::new(
        Arc::new(FnFields::new(2, |x| Mat::diag(&[x[0], 1.0]), zero_a(2))),
        vec![(-1.0, 1.0); 2],
        vec![false; 2],
        DEFAULT_H,
    );
    assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
}

#[test]
fn curvature_of_model_spaces() {
    let r = curvature_hat(&flat(3), &[0.1, 0.0, -0.2]).unwrap();
    assert!(r.tensor().max_abs() < 1e-8);

    // The O(h²) error of the sectional curvature is about 3e-6 at h = 1e-3.
    let p = poincare().with_h(5e-4);
    for x in [[0.0, 1.0], [0.3, 1.2], [-0.5, 1.5]] {
        let k = sectional_hat(&p, &x, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((k + 1.0).abs() < 1e-6, "{k}");
        let r = curvature_hat(&p, &x).unwrap();
        let g = p.metric(&x).unwrap();
        assert!(r.antisymmetry_defect() < 1e-8);
        assert!(r.pair_symmetry_defect() < 1e-6);
        assert!(constant_curvature_residual_of(&r, &g, -1.0) < 2e-6);
    }

    for n in [2, 3] {
        let s = sphere(n);
        let x: Vec<f64> = (0..n).map(|i| 0.1 * (i as f64 + 1.0)).collect();
        let rho = rho_hat(&s, &x).unwrap();
        assert!((rho - (n * (n - 1)) as f64).abs() < 1e-5, "{rho}");
        let ric = ric_hat(&s, &x).unwrap();
        assert!(ric.swap_defect(0, 1).unwrap().max_abs() < 1e-8);
    }
}

fn constant_curvature_residual_of(r: &CurvTensor, g: &crate::tensor::MetricPoint, h: f64) -> f64 {
    crate::point::constant_curvature_residual(r, g, h).unwrap()
}

#[test]
fn derivative_operators_on_flat_space() {
    let cs = flat(2);
    let c = |_: &[f64]| Ok(Tensor::from_covector(&[1.0, 2.0]));
    assert!(nabla_hat(&cs, &c, &[0.2, 0.1]).unwrap().max_abs() < 1e-12);

    let f = |x: &[f64]| Ok(Tensor::scalar(x[0] * x[0] + x[1] * x[1]));
    let lap = laplacian(&cs, &f, &[0.3, -0.4]).unwrap().data()[0];
    assert!((lap - 4.0).abs() < 1e-6);
    let lap2 = scalar_laplacian(
        &cs,
        &|x: &[f64]| Ok(x[0] * x[0] + x[1] * x[1]),
        &[0.3, -0.4],
    )
    .unwrap();
    assert!((lap2 - 4.0).abs() < 1e-6);

    let torus = ChartStructure::new(
        Arc::new(FnFields::new(2, |_| Mat::identity(2), zero_a(2))),
        vec![(0.0, 6.0); 2],
        vec![true; 2],
        DEFAULT_H,
    )
    .unwrap();
    let tau = |x: &[f64]| Ok(Tensor::from_covector(&[x[1], -x[0]]));
    let x = [1.0, 2.0];
    assert!(codifferential(&torus, &tau, &x).unwrap().data()[0].abs() < 1e-9);
    let d = exterior_d(&torus, &tau, &x).unwrap();
    assert!((d.get(&[0, 1]) + 2.0).abs() < 1e-9);
    assert!((d.get(&[1, 0]) - 2.0).abs() < 1e-9);
}

#[test]
fn codifferential_sign_is_plus_trace() {
    let cs = flat(2);
    let w = |x: &[f64]| Ok(Tensor::from_covector(&[x[0], 0.0]));
    let d = codifferential(&cs, &w, &[0.1, 0.1]).unwrap().data()[0];
    assert!((d - 1.0).abs() < 1e-9);
}

#[test]
fn hessian_potential_example() {
    let phi = Expr::parse("(x1^4 + x2^4)/12 + (x1^2 + x2^2)/2").unwrap();
    let cs = hessian_from_potential(&phi, 2, vec![(-2.0, 2.0); 2], DEFAULT_H).unwrap();
    let g = cs.metric(&[1.0, 0.0]).unwrap();
    assert_eq!(g.components(), &Mat::diag(&[2.0, 1.0]));
    let a = cs.cubic(&[1.0, 0.0]).unwrap();
    let mut want = CubicForm::zeros(2).unwrap();
    want.set(0, 0, 0, -1.0);
    assert_eq!(a, want);

    let trivial = hessian_from_potential(
        &Expr::parse("(x1^2 + x2^2)/2").unwrap(),
        2,
        vec![(-1.0, 1.0); 2],
        DEFAULT_H,
    )
    .unwrap();
    assert_eq!(trivial.cubic(&[0.3, 0.2]).unwrap().max_abs(), 0.0);

    let concave = hessian_from_potential(
        &Expr::parse("x1^3 + x2^2").unwrap(),
        2,
        vec![(-1.0, 1.0); 2],
        DEFAULT_H,
    );
    assert!(matches!(concave, Err(Error::Precondition(_))));
}

#[test]
fn hessian_structure_is_flat_and_conjugate_symmetric() {
    let cs = hessian_xy();
    for x in [[0.0, 0.0], [0.1, -0.2], [0.3, 0.25]] {
        let sc = statistical_connections(&cs, &x).unwrap();
        let g = cs.metric(&x).unwrap();
        assert!(gnorm(&g, sc.r.tensor()).unwrap() < 1e-6);
        assert!(sc.criteria.asym_nabla_a < 1e-6);
        assert!(sc.conjugate_symmetric);
        for r in &sc.residuals {
            assert!(r.passes(cs.h(), 1.0), "{r:?}");
        }
        let rd = ricci_decomposition_residuals(&cs, &x).unwrap();
        assert!(find(&rd.residuals, "hessian-ricci").is_some());
        for r in &rd.residuals {
            assert!(r.passes(cs.h(), 1.0), "{r:?}");
        }
        for gp in &rd.gaps {
            assert!(gp.passes(cs.h(), 1.0), "{gp:?}");
        }
        let sn = sectional_nabla(&cs, &x, &[1.0, 0.3], &[0.2, 1.0]).unwrap();
        assert!(sn.residual.passes(cs.h(), 1.0));
        let simons = cubic_simons_residuals(&cs, &x).unwrap();
        for r in simons.residuals.iter().chain(&simons.specializations) {
            assert!(r.value < 1e-4, "{r:?}");
        }
    }
}

#[test]
fn zero_cubic_form_gives_levi_civita_curvatures() {
    let s = sphere(2);
    let sc = statistical_connections(&s, &[0.2, 0.1]).unwrap();
    let g = s.metric(&[0.2, 0.1]).unwrap();
    let d = gnorm(&g, sc.r.sub(&sc.r_hat).unwrap().tensor()).unwrap();
    let mag = gnorm(&g, sc.r_hat.tensor()).unwrap();
    assert!(
        d < crate::tolerance::fd_tol(crate::tolerance::C_CURVATURE, s.h(), mag, 1.0),
        "{d}"
    );
    assert_eq!(sc.r, sc.r_bar);
}

#[test]
fn g3_constant_fields() {
    let (a, b) = (0.7, -0.4);
    let cs = g3_flat(a, b);
    let x = [0.1, 0.2];
    let sc = statistical_connections(&cs, &x).unwrap();
    let g = cs.metric(&x).unwrap();
    let want = CurvTensor::r0(&g).scale(-2.0 * (a * a + b * b));
    assert!(sc.r.sub(&want).unwrap().tensor().max_abs() < 1e-8);
    let sn = sectional_nabla(&cs, &x, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
    assert!(sn.k_hat.abs() < 1e-8);
    assert!((sn.k + 2.0 * (a * a + b * b)).abs() < 1e-8);

    let simons = cubic_simons_residuals(&cs, &x).unwrap();
    for r in simons.residuals.iter().chain(&simons.specializations) {
        assert!(r.value < 1e-8, "{r:?}");
    }
    let ids: Vec<&str> = simons.specializations.iter().map(|r| r.id).collect();
    for id in [
        "bracket-constant-curvature",
        "trace-free",
        "trace-free-constant-curvature",
        "lagrangian",
    ] {
        assert!(ids.contains(&id), "{id} missing from {ids:?}");
    }
}

#[test]
fn constant_cubic_form_on_flat_chart() {
    let cs = chart(
        3,
        vec![(-1.0, 1.0); 3],
        |_| Mat::identity(3),
        |_| CubicForm::from_fn(3, |i, j, k| 0.1 * (i + 2 * j + 3 * k) as f64 - 0.4).unwrap(),
    );
    let simons = cubic_simons_residuals(&cs, &[0.0, 0.1, 0.2]).unwrap();
    for r in &simons.residuals {
        assert!(r.value < 1e-8, "{r:?}");
    }
}

#[test]
fn non_conjugate_symmetric_input_is_rejected() {
    let cs = chart(
        2,
        vec![(-1.0, 1.0); 2],
        |_| Mat::identity(2),
        |x| {
            let mut c = CubicForm::zeros(2).unwrap();
            c.set(0, 0, 0, x[1]);
            c
        },
    );
    let sc = statistical_connections(&cs, &[0.1, 0.1]).unwrap();
    assert!(!sc.conjugate_symmetric);
    assert!(find(&sc.residuals, "conjugate-symmetric-curvature").is_none());
    assert!(sc.criteria.r_minus_rbar > 0.1);
    assert!(sc.criteria.skew_kl > 0.1);
    assert!(matches!(
        cubic_simons_residuals(&cs, &[0.1, 0.1]),
        Err(Error::Precondition(_))
    ));
    for r in &sc.residuals {
        assert!(r.passes(cs.h(), 1.0), "{r:?}");
    }
}

#[test]
fn unconditional_identities_on_curved_charts() {
    let p = poincare();
    let x = [0.1, 1.1];
    let s = |y: &[f64]| {
        Ok(Tensor::from_fn(2, 2, 0, |i| match (i[0], i[1]) {
            (0, 0) => y[0] * y[1],
            (0, 1) => y[1] * y[1],
            (1, 0) => 1.0 + y[0],
            _ => (y[0] - y[1]).sin(),
        }))
    };
    let ri = ricci_identity_residual(&p, &s, &x).unwrap();
    assert!(ri.passes(p.h(), 1.0), "{ri:?}");
    let si = simons_residual(&p, &s, &x).unwrap();
    assert!(si.passes(p.h(), 1.0), "{si:?}");

    let tau = |y: &[f64]| Ok(Tensor::from_covector(&[1.0, 0.0 * y[0]]));
    let w = weitzenbock_residual(&p, &tau, &x).unwrap();
    assert!(w.vector.value < 1e-4 && w.scalar.value < 1e-4, "{w:?}");

    let sp = sphere(3);
    let tau = |y: &[f64]| {
        Ok(Tensor::from_covector(&[
            y[1] * y[2],
            y[0].cos(),
            y[0] - y[2] * y[2],
        ]))
    };
    let w = weitzenbock_residual(&sp, &tau, &[0.1, -0.2, 0.3]).unwrap();
    assert!(w.vector.value < 1e-4 && w.scalar.value < 1e-4, "{w:?}");
}

#[test]
fn weitzenbock_on_flat_exact_form() {
    let cs = flat(2);
    let tau = |y: &[f64]| {
        Ok(Tensor::from_covector(&[
            2.0 * y[0] * y[1],
            y[0] * y[0] + 3.0 * y[1] * y[1],
        ]))
    };
    let w = weitzenbock_residual(&cs, &tau, &[0.2, 0.3]).unwrap();
    assert!(w.vector.value < 1e-6, "{w:?}");
    assert!(w.scalar.passes(cs.h(), 1.0), "{w:?}");
}

#[test]
fn simons_converges_at_second_order() {
    let cs = hessian_xy();
    let s = |y: &[f64]| a_tensor(&cs, y);
    let x = [0.2, -0.1];
    let r1 = simons_residual(&cs.with_h(2e-3), &s, &x).unwrap().value;
    let r2 = simons_residual(&cs.with_h(1e-3), &s, &x).unwrap().value;
    assert!(r2 < 1e-4);
    let ratio = r1 / r2;
    assert!(
        crate::tolerance::in_convergence_band(ratio),
        "{r1} {r2} {ratio}"
    );
}

#[test]
fn sym2_simons_examples() {
    let cs = flat(2);
    let g = |y: &[f64]| Ok(Tensor::from_mat(&Mat::identity(y.len())));
    let r = sym2_simons_residual(&cs, &g, &[0.1, 0.2]).unwrap();
    assert!(r.residual.value < 1e-10 && r.eigen_term.abs() < 1e-12);

    let hess = |y: &[f64]| Ok(Tensor::from_mat(&Mat::diag(&[6.0 * y[0], 6.0 * y[1]])));
    let r = sym2_simons_residual(&cs, &hess, &[0.3, -0.2]).unwrap();
    assert!(r.residual.value < 1e-4, "{r:?}");

    let s = sphere(2);
    let cg = |y: &[f64]| Ok(Tensor::from_mat(s.metric(y)?.components()).scale(2.5));
    let r = sym2_simons_residual(&s, &cg, &[0.1, 0.3]).unwrap();
    assert!(
        r.residual.value < 1e-6 && r.eigen_term.abs() < 1e-9,
        "{r:?}"
    );

    let bad = |y: &[f64]| Ok(Tensor::from_mat(&Mat::diag(&[y[1], 0.0])));
    assert!(matches!(
        sym2_simons_residual(&cs, &bad, &[0.1, 0.1]),
        Err(Error::Precondition(_))
    ));
}
