use super::*;
use crate::chart::FnFields;
use crate::linalg::Mat;
use crate::sample::{random_cubic, random_metric};
use crate::tensor::CubicForm;
use alloc::sync::Arc;
use core::f64::consts::PI;
use rand::Rng;

fn random_tensor(n: usize, k: usize, seed: u64) -> Tensor {
    let mut r = rng(seed);
    Tensor::from_fn(n, k, 0, |_| r.random_range(-1.0..=1.0))
}

fn torus(
    n: usize,
    g: impl Fn(&[f64]) -> Mat + Send + Sync + 'static,
    a: impl Fn(&[f64]) -> CubicForm + Send + Sync + 'static,
    h: f64,
) -> ChartStructure {
    ChartStructure::new(
        Arc::new(FnFields::new(n, g, a)),
        vec![(0.0, 2.0 * PI); n],
        vec![true; n],
        h,
    )
    .unwrap()
}

/// Non-conformal periodic metric.
fn wavy_metric(x: &[f64]) -> Mat {
    let (s, c) = (0.3 * (x[0] + x[1]).cos(), 0.2 * x[0].sin() * x[1].cos());
    Mat::from_rows(&[&[1.5 + c, s], &[s, 1.5 + 0.4 * x[1].sin()]]).unwrap()
}

fn trig_cubic(x: &[f64]) -> CubicForm {
    let (p, q) = (x[0], x[1]);
    CubicForm::from_fn(2, |i, j, k| match i + j + k {
        0 => 0.4 * p.sin() + 0.1,
        1 => 0.3 * (p - q).cos(),
        2 => -0.2 * q.sin() * p.cos(),
        _ => 0.25 * (2.0 * q).cos(),
    })
    .unwrap()
}

#[test]
fn weights_and_nodes() {
    for n in 2..=6 {
        for m in [2, 5] {
            let q = SphereQuadrature::product_gauss(n, m).unwrap();
            let total: f64 = q.weights().iter().sum();
            assert!((total / sphere_area(n) - 1.0).abs() < 1e-10, "n={n} m={m}");
            assert!(q
                .nodes()
                .iter()
                .all(|v| (crate::math::norm2(v) - 1.0).abs() < 1e-14));
        }
    }
    assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
    assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    assert!(SphereQuadrature::product_gauss(1, 3).is_err());
}

#[test]
fn integrate_examples() {
    let q2 = SphereQuadrature::product_gauss(2, 4).unwrap();
    let v = integrate_sphere(&q2, &|_| Ok(1.0)).unwrap().value;
    assert!((v - 2.0 * PI).abs() < 1e-12);
    let q3 = SphereQuadrature::product_gauss(3, 4).unwrap();
    let v = integrate_sphere(&q3, &|x| Ok(x[0] * x[0])).unwrap().value;
    assert!((v - 4.0 * PI / 3.0).abs() < 1e-10);
    for q in [&q2, &q3] {
        assert!(integrate_sphere(q, &|x| Ok(x[0])).unwrap().value.abs() < 1e-12);
    }
}

#[test]
fn polynomial_exactness() {
    // ∫ V₁⁴ = 3ω/(n(n+2)) and ∫ V₁²V₂² = ω/(n(n+2)).
    for n in 2..=6 {
        let q = SphereQuadrature::exact_for_degree(n, 4).unwrap();
        let w = sphere_area(n);
        let d = (n * (n + 2)) as f64;
        let f4 = integrate_sphere(&q, &|x| Ok(x[0].powi(4))).unwrap().value;
        let f22 = integrate_sphere(&q, &|x| Ok(x[0] * x[0] * x[n - 1] * x[n - 1]))
            .unwrap()
            .value;
        assert!((f4 - 3.0 * w / d).abs() < 1e-12, "n={n}");
        assert!((f22 - w / d).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn odd_monomials_vanish() {
    for n in 2..=4 {
        let q = SphereQuadrature::exact_for_degree(n, 5).unwrap();
        for f in [
            |x: &[f64]| x[0].powi(3),
            |x: &[f64]| x[0] * x[1] * x[1],
            |x: &[f64]| x[1].powi(5),
        ] {
            assert!(integrate_sphere(&q, &|x| Ok(f(x))).unwrap().value.abs() < 1e-11);
        }
    }
}

#[test]
fn monte_carlo_agrees_with_product_rule() {
    let n = 3;
    let t = random_tensor(n, 4, 9);
    let f = |x: &[f64]| Ok(t.eval(&[x, x, x, x]) + x[0] * x[0]);
    let exact = integrate_sphere(&SphereQuadrature::exact_for_degree(n, 4).unwrap(), &f)
        .unwrap()
        .value;
    let mc =
        integrate_sphere(&SphereQuadrature::monte_carlo(n, 1_000_000, 3).unwrap(), &f).unwrap();
    assert!(mc.std_error > 0.0);
    assert!(
        (mc.value - exact).abs() < 4.0 * mc.std_error,
        "{mc:?} vs {exact}"
    );
}

#[test]
fn fiber_identity_examples() {
    for n in 2..=3 {
        let g = MetricPoint::identity(n).unwrap();
        let q = SphereQuadrature::exact_for_degree(n, 4).unwrap();
        assert!(fiber_identity_residual(&g, &g.as_tensor(), 0, &q).unwrap() < 1e-12);
        let a = random_cubic(n, &mut rng(1)).unwrap().to_tensor();
        assert!(fiber_identity_residual(&g, &a, 1, &q).unwrap() < 1e-11);
    }
    let g = MetricPoint::identity(3).unwrap();
    let q = SphereQuadrature::exact_for_degree(3, 4).unwrap();
    let s = random_tensor(3, 4, 5);
    assert!(fiber_identity_residual(&g, &s, 2, &q).unwrap() < 1e-9);
}

#[test]
fn fiber_identity_random_tensors_any_slot() {
    for n in 2..=3 {
        let q = SphereQuadrature::exact_for_degree(n, 4).unwrap();
        for seed in 0..20u64 {
            let g = random_metric(n, &mut rng(100 + seed)).unwrap();
            for k in 2..=4 {
                let s = random_tensor(n, k, seed * 7 + k as u64);
                for i0 in 0..k {
                    let r = fiber_identity_residual(&g, &s, i0, &q).unwrap();
                    assert!(r < 1e-9, "n={n} k={k} i0={i0} r={r}");
                }
            }
        }
    }
}

#[test]
fn fiber_identity_monte_carlo_oracle() {
    // With Monte Carlo nodes both sides carry sampling error but still agree.
    let g = MetricPoint::identity(3).unwrap();
    let q = SphereQuadrature::monte_carlo(3, 400_000, 11).unwrap();
    let s = random_tensor(3, 4, 5);
    let r = fiber_identity_residual(&g, &s, 0, &q).unwrap();
    assert!(r < 0.1, "{r}");
}

#[test]
fn fiber_identity_errors() {
    let g = MetricPoint::identity(2).unwrap();
    let q = SphereQuadrature::product_gauss(2, 3).unwrap();
    assert_eq!(
        fiber_identity_residual(&g, &random_tensor(2, 5, 1), 0, &q),
        Err(Error::UnsupportedDegree(5))
    );
    assert_eq!(
        fiber_identity_residual(&g, &random_tensor(2, 1, 1), 0, &q),
        Err(Error::UnsupportedDegree(1))
    );
    assert!(matches!(
        fiber_identity_residual(&g, &random_tensor(2, 3, 1), 3, &q),
        Err(Error::SlotOutOfRange { .. })
    ));
    let q3 = SphereQuadrature::product_gauss(3, 3).unwrap();
    assert!(fiber_identity_residual(&g, &g.as_tensor(), 0, &q3).is_err());
}

#[test]
fn codifferential_examples() {
    let q = SphereQuadrature::exact_for_degree(3, 4).unwrap();
    let g = MetricPoint::identity(3).unwrap();
    let r = sphere_codiff_residual(&g.as_tensor(), 0, &q, 1e-4).unwrap();
    assert!(r.max_pointwise < 1e-6 && r.integral.abs() < 1e-6, "{r:?}");
    // Alternating s: s(V, V) = 0, only the trace terms remain.
    let mut w = Tensor::covariant(3, 2);
    w.set(&[0, 1], 1.0);
    w.set(&[1, 0], -1.0);
    w.set(&[1, 2], 0.5);
    w.set(&[2, 1], -0.5);
    assert!(
        sphere_codiff_residual(&w, 1, &q, 1e-4)
            .unwrap()
            .max_pointwise
            < 1e-6
    );
    for (n, k, seed) in [(3, 3, 1u64), (2, 3, 2), (3, 4, 3), (2, 2, 4)] {
        let s = random_tensor(n, k, seed);
        let q = SphereQuadrature::exact_for_degree(n, 4).unwrap();
        for i0 in 0..k {
            let r = sphere_codiff_residual(&s, i0, &q, 1e-4).unwrap();
            assert!(r.max_pointwise < 1e-5, "n={n} k={k} i0={i0} {r:?}");
            assert!(r.integral.abs() < 1e-5, "n={n} k={k} i0={i0} {r:?}");
        }
    }
}

#[test]
fn codifferential_converges_quadratically() {
    let s = random_tensor(3, 3, 8);
    let q = SphereQuadrature::product_gauss(3, 3).unwrap();
    let coarse = sphere_codiff_residual(&s, 0, &q, 4e-3)
        .unwrap()
        .max_pointwise;
    let fine = sphere_codiff_residual(&s, 0, &q, 2e-3)
        .unwrap()
        .max_pointwise;
    let ratio = coarse / fine;
    assert!(crate::tolerance::in_convergence_band(ratio), "{ratio}");
}

#[test]
fn ros_hessian_on_flat_torus() {
    let cs = torus(
        2,
        |_| Mat::identity(2),
        |_| CubicForm::zeros(2).unwrap(),
        1e-3,
    );
    // Hess f for f = sin x cos 2y, entered in closed form.
    let hess = |x: &[f64]| -> Result<Tensor> {
        let (s, c) = (x[0].sin(), x[0].cos());
        let (s2, c2) = ((2.0 * x[1]).sin(), (2.0 * x[1]).cos());
        Ok(Tensor::from_mat(&Mat::from_rows(&[
            &[-s * c2, -2.0 * c * s2],
            &[-2.0 * c * s2, -4.0 * s * c2],
        ])?))
    };
    let q = SphereQuadrature::exact_for_degree(2, 2).unwrap();
    let r = ros_residual(&cs, &hess, 32, &q).unwrap();
    assert!(r.value.abs() < 1e-8, "{r:?}");
    assert!(r.magnitude > 1.0);
}

#[test]
fn ros_constant_tensor_on_curved_torus() {
    let cs = torus(2, wavy_metric, |_| CubicForm::zeros(2).unwrap(), 1e-3);
    let s = random_tensor(2, 3, 4);
    let field = move |_x: &[f64]| Ok(s.clone());
    let q = SphereQuadrature::exact_for_degree(2, 2).unwrap();
    let r = ros_residual(&cs, &field, 32, &q).unwrap();
    assert!(
        r.value.abs() <= fd_tol(crate::tolerance::C_CONNECTION, cs.h(), r.magnitude, 1.0),
        "{r:?}"
    );
}

#[test]
fn ros_requires_torus() {
    let cs = ChartStructure::new(
        Arc::new(FnFields::new(
            2,
            |_| Mat::identity(2),
            |_| CubicForm::zeros(2).unwrap(),
        )),
        vec![(0.0, 1.0); 2],
        vec![true, false],
        1e-3,
    )
    .unwrap();
    let q = SphereQuadrature::product_gauss(2, 2).unwrap();
    let f = |_x: &[f64]| Ok(Tensor::covariant(2, 2));
    assert_eq!(ros_residual(&cs, &f, 4, &q), Err(Error::NotPeriodic));
    assert_eq!(ros_cubic_functional(&cs, 4, &q), Err(Error::NotPeriodic));
}

#[test]
fn ros_trig_cubic_small_lattice() {
    let cs = torus(2, wavy_metric, trig_cubic, 1e-3);
    let a_field = |x: &[f64]| Ok(trig_cubic(x).to_tensor());
    let q = SphereQuadrature::exact_for_degree(2, 2).unwrap();
    let r = ros_residual(&cs, &a_field, 16, &q).unwrap();
    assert!(r.value.abs() < 1e-6 * (1.0 + r.magnitude), "{r:?}");
}

#[test]
fn functional_vanishes_for_constant_fields() {
    let a = random_cubic(2, &mut rng(3)).unwrap();
    let cs = torus(2, |_| Mat::identity(2), move |_| a.clone(), 1e-3);
    let q = SphereQuadrature::exact_for_degree(2, 6).unwrap();
    let t = ros_cubic_functional(&cs, 8, &q).unwrap();
    assert!(t.hypotheses_hold);
    assert!(
        t.term_nabla_k.abs() < 1e-12 && t.term_curvature.abs() < 1e-12 && t.term_tau.abs() < 1e-12,
        "{t:?}"
    );
}

#[test]
fn functional_on_conformal_torus() {
    // Constant trace-free A with a conformal periodic metric: conjugate
    // symmetric, τ = 0, and both displayed terms nonzero.
    let cs = torus(
        2,
        |x| Mat::identity(2).scale((0.3 * x[0].sin() * x[1].cos()).exp()),
        |_| CubicForm::from_fn(2, |i, j, k| [0.5, -0.2, -0.5, 0.2][i + j + k]).unwrap(),
        1e-3,
    );
    let q = SphereQuadrature::exact_for_degree(2, 6).unwrap();
    let t = ros_cubic_functional(&cs, 24, &q).unwrap();
    assert!(t.hypotheses_hold, "{t:?}");
    assert!(t.term_nabla_k > 1e-3 && t.term_curvature < -1e-3, "{t:?}");
    assert!(t.sum.abs() < 1e-5 * (1.0 + t.magnitude), "{t:?}");
}

#[test]
fn functional_flat_hessian_type_needs_tau_term() {
    // A = ∂³ψ on the flat torus: conjugate symmetric, R̂ = 0, ∇̂²τ ≠ 0.
    let cs = torus(
        2,
        |_| Mat::identity(2),
        |x| {
            let (p, q) = (x[0], x[1]);
            // ψ = 0.2 sin p sin q + 0.1 cos 2p
            let d = |a: usize, b: usize| -> f64 {
                match (a, b) {
                    (3, 0) => -0.2 * p.cos() * q.sin() + 0.8 * (2.0 * p).sin(),
                    (2, 1) => -0.2 * p.sin() * q.cos(),
                    (1, 2) => -0.2 * p.cos() * q.sin(),
                    _ => -0.2 * p.sin() * q.cos(),
                }
            };
            CubicForm::from_fn(2, |i, j, k| {
                let b = i + j + k;
                d(3 - b, b)
            })
            .unwrap()
        },
        1e-3,
    );
    let q = SphereQuadrature::exact_for_degree(2, 6).unwrap();
    let t = ros_cubic_functional(&cs, 24, &q).unwrap();
    assert!(t.conjugate_symmetric && !t.hypotheses_hold, "{t:?}");
    assert!(
        t.term_curvature.abs() < 1e-9 && t.term_nabla_k > 1e-2,
        "{t:?}"
    );
    assert!(t.full_sum.abs() < 1e-5 * (1.0 + t.magnitude), "{t:?}");
}
