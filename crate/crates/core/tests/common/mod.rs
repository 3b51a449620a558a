#![allow(dead_code)]

use std::sync::Arc;

use codazzi_core::chart::{hessian_from_potential, ChartStructure, FnFields, DEFAULT_H};
use codazzi_core::expr::Expr;
use codazzi_core::linalg::Mat;
use codazzi_core::{CubicForm, Tensor};

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

pub fn chart(
    n: usize,
    domain: Vec<(f64, f64)>,
    periodic: bool,
    g: impl Fn(&[f64]) -> Mat + Send + Sync + 'static,
    a: impl Fn(&[f64]) -> CubicForm + Send + Sync + 'static,
) -> ChartStructure {
    ChartStructure::new(
        Arc::new(FnFields::new(n, g, a)),
        domain,
        vec![periodic; n],
        DEFAULT_H,
    )
    .unwrap()
}

/// `f(x) = Σ_r c_r sin(k_r·x + φ_r)` with its gradient and Hessian.
#[derive(Clone)]
pub struct Waves {
    terms: Vec<(f64, Vec<f64>, f64)>,
}

impl Waves {
    pub fn new(n: usize) -> Self {
        let terms = (0..n + 1)
            .map(|r| {
                let k = (0..n)
                    .map(|i| [1.0, -1.0, 2.0, 0.0][(r + 2 * i) % 4])
                    .collect();
                (0.25 / (1.0 + r as f64), k, 0.3 * r as f64 + 0.2)
            })
            .collect();
        Waves { terms }
    }

    fn phase(&self, r: usize, x: &[f64]) -> f64 {
        let (_, k, p) = &self.terms[r];
        k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>() + p
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (0..self.terms.len())
            .map(|r| self.terms[r].0 * self.phase(r, x).sin())
            .sum()
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for r in 0..self.terms.len() {
            let (c, k, _) = &self.terms[r];
            let w = c * self.phase(r, x).cos();
            for (o, k) in out.iter_mut().zip(k) {
                *o += w * k;
            }
        }
        out
    }

    pub fn hessian(&self, x: &[f64]) -> Mat {
        let n = x.len();
        let mut out = Mat::zeros(n);
        for r in 0..self.terms.len() {
            let (c, k, _) = &self.terms[r];
            let w = -c * self.phase(r, x).sin();
            out = out.add(
                &Mat::from_row_major(n, (0..n * n).map(|t| w * k[t / n] * k[t % n]).collect())
                    .unwrap(),
            );
        }
        out
    }
}

/// Induced metric `I + ∇f∇fᵀ` of the graph of `f`.
pub fn graph_metric(w: &Waves, x: &[f64]) -> Mat {
    let d = w.grad(x);
    let n = d.len();
    Mat::identity(n)
        .add(&Mat::from_row_major(n, (0..n * n).map(|t| d[t / n] * d[t % n]).collect()).unwrap())
}

/// Second fundamental form of the graph of `f`; a Codazzi tensor for
/// [`graph_metric`].
pub fn graph_second_form(w: &Waves, x: &[f64]) -> Tensor {
    let d = w.grad(x);
    let s = 1.0 / (1.0 + d.iter().map(|v| v * v).sum::<f64>()).sqrt();
    Tensor::from_mat(&w.hessian(x).scale(s))
}

/// A smooth, non-conjugate-symmetric cubic form.
pub fn trig_cubic(n: usize, x: &[f64]) -> CubicForm {
    CubicForm::from_fn(n, |i, j, k| {
        let p = x[i] + 0.5 * x[(j + 1) % n] - 0.3 * x[k];
        0.3 * (p + (i + 2 * j + k) as f64).sin() + 0.1 * (i + j + k) as f64 - 0.2
    })
    .unwrap()
}

/// Graph metric with a trig cubic form on the box `[-1, 1]ⁿ`; satisfies no
/// special hypotheses.
pub fn generic(n: usize) -> ChartStructure {
    let w = Waves::new(n);
    chart(
        n,
        vec![(-1.0, 1.0); n],
        false,
        move |x| graph_metric(&w, x),
        move |x| trig_cubic(n, x),
    )
}

pub fn hessian(n: usize) -> ChartStructure {
    let src = match n {
        2 => "x1^2*x2^2/2 + (x1^2 + x2^2)/2".to_string(),
        _ => {
            let quad: Vec<String> = (1..=n).map(|i| format!("x{i}^2")).collect();
            format!(
                "({})/2 + x1^2*x2^2/2 + exp(x1 - x{n})/4 + sin(x2)*x1/5",
                quad.join(" + ")
            )
        }
    };
    hessian_from_potential(
        &Expr::parse(&src).unwrap(),
        n,
        vec![(-0.5, 0.5); n],
        DEFAULT_H,
    )
    .unwrap()
}

pub fn g3_cubic(a: f64, b: f64) -> CubicForm {
    let mut c = CubicForm::zeros(2).unwrap();
    c.set(0, 0, 0, a);
    c.set(0, 1, 1, -a);
    c.set(1, 1, 1, b);
    c.set(0, 0, 1, -b);
    c
}

/// Flat torus with the constant cubic form of the constant-curvature family.
pub fn g3(a: f64, b: f64) -> ChartStructure {
    chart(
        2,
        vec![(0.0, TAU); 2],
        true,
        |_| Mat::identity(2),
        move |_| g3_cubic(a, b),
    )
}

/// `g = e^{2f}·I` on the torus with a constant trace-free cubic form;
/// conjugate symmetric with `τ = 0`.
pub fn conformal_torus() -> ChartStructure {
    chart(
        2,
        vec![(0.0, TAU); 2],
        true,
        |x| Mat::identity(2).scale((0.3 * x[0].sin() * x[1].cos()).exp()),
        |_| g3_cubic(0.5, -0.2),
    )
}
