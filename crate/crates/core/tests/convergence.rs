//! Second-order convergence of the finite-difference identity residuals:
//! the residual must shrink by a factor in the convergence band each time
//! `h` halves over `4e-3, 2e-3, 1e-3`.

mod common;

use codazzi_core::chart::{
    cubic_simons_residuals, ricci_decomposition_residuals, ricci_identity_residual,
    simons_residual, statistical_connections, sym2_simons_residual, weitzenbock_residual,
    ChartStructure, Residual,
};
use codazzi_core::tolerance::in_convergence_band;
use codazzi_core::{Result, Tensor};
use common::*;

const STEPS: [f64; 3] = [4e-3, 2e-3, 1e-3];

fn point(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.21 - 0.13 * i as f64).collect()
}

fn assert_converges(
    label: &str,
    cs: &ChartStructure,
    eval: impl Fn(&ChartStructure) -> Result<Residual>,
) {
    let r: Vec<f64> = STEPS
        .iter()
        .map(|&h| eval(&cs.with_h(h)).unwrap().value)
        .collect();
    for w in r.windows(2) {
        let ratio = w[0] / w[1];
        println!("{label}: {:.3e} -> {:.3e}  ratio {ratio:.4}", w[0], w[1]);
        assert!(in_convergence_band(ratio), "{label}: residuals {r:?}");
    }
}

fn s2(y: &[f64]) -> Result<Tensor> {
    let n = y.len();
    Ok(Tensor::from_fn(n, 2, 0, |i| {
        (y[i[0]] + 2.0 * y[i[1]]).sin() + 0.3 * (i[0] * n + i[1]) as f64
    }))
}

fn tau1(y: &[f64]) -> Result<Tensor> {
    let n = y.len();
    Ok(Tensor::from_fn(n, 1, 0, |i| {
        (y[(i[0] + 1) % n] - 0.5 * y[i[0]]).cos() + 0.2 * y[i[0]]
    }))
}

#[test]
fn unconditional_identities_converge() {
    for n in [2, 3] {
        let cs = generic(n);
        let x = point(n);
        assert_converges(&format!("simons n={n}"), &cs, |c| {
            simons_residual(c, &s2, &x)
        });
        assert_converges(&format!("ricci-identity n={n}"), &cs, |c| {
            ricci_identity_residual(c, &s2, &x)
        });
        assert_converges(&format!("weitzenbock n={n}"), &cs, |c| {
            Ok(weitzenbock_residual(c, &tau1, &x)?.vector)
        });
        assert_converges(&format!("weitzenbock-norm n={n}"), &cs, |c| {
            Ok(weitzenbock_residual(c, &tau1, &x)?.scalar)
        });

        let w = Waves::new(n);
        let beta = move |y: &[f64]| Ok(graph_second_form(&w, y));
        assert_converges(&format!("sym2-simons n={n}"), &cs, |c| {
            Ok(sym2_simons_residual(c, &beta, &x)?.residual)
        });
    }
}

#[test]
fn cubic_simons_converges_on_hessian_structures() {
    for n in [2, 3] {
        let cs = hessian(n);
        let x = point(n);
        for id in [
            "cubic-simons",
            "cubic-simons-curvature",
            "cubic-simons-ricci",
        ] {
            assert_converges(&format!("{id} n={n}"), &cs, |c| {
                let r = cubic_simons_residuals(c, &x)?;
                Ok(r.residuals.into_iter().find(|r| r.id == id).unwrap())
            });
        }
    }
}

#[test]
fn cubic_simons_converges_on_conformal_torus() {
    let cs = conformal_torus();
    let x = [0.7, 1.9];
    for id in [
        "cubic-simons",
        "cubic-simons-curvature",
        "cubic-simons-ricci",
    ] {
        assert_converges(id, &cs, |c| {
            let r = cubic_simons_residuals(c, &x)?;
            Ok(r.residuals.into_iter().find(|r| r.id == id).unwrap())
        });
    }
}

#[test]
fn connection_identities_converge() {
    for n in [2, 3] {
        let cs = generic(n);
        let x = point(n);
        let sc = statistical_connections(&cs, &x).unwrap();
        for r in &sc.residuals {
            let id = r.id;
            if r.value < 1e-12 {
                continue;
            }
            assert_converges(&format!("{id} n={n}"), &cs, |c| {
                Ok(statistical_connections(c, &x)?
                    .residuals
                    .into_iter()
                    .find(|r| r.id == id)
                    .unwrap())
            });
        }
        let rd = ricci_decomposition_residuals(&cs, &x).unwrap();
        for r in &rd.residuals {
            let id = r.id;
            if r.value < 1e-12 {
                continue;
            }
            assert_converges(&format!("{id} n={n}"), &cs, |c| {
                Ok(ricci_decomposition_residuals(c, &x)?
                    .residuals
                    .into_iter()
                    .find(|r| r.id == id)
                    .unwrap())
            });
        }
    }
}
