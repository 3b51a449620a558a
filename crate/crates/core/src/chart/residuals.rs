use alloc::vec;
use alloc::vec::Vec;

use super::ops::{
    a_tensor, bar_raw, christoffel_raw, covariant_from, curvature_hat_raw, curvature_raw,
    dmetric_raw, k_raw, nabla_hat_raw, nabla_raw, tau_raw,
};
use super::{gnorm, ChartStructure, ConnectionAt, Gap, Residual};
use crate::error::Result;
use crate::math::{abs, sqrt};
use crate::point::{bracket_kk, gram_schmidt, ric_k, ricci_chain_gap, StatPoint};
use crate::tensor::{inner, norm_sq, trace_g, CurvTensor, MetricPoint, Tensor};
use crate::tolerance::{conjugate_threshold, fd_tol, C_CONNECTION, C_CURVATURE, TRACE_FREE_FIELD};

/// The three connections at a point, their curvatures and the residuals of
/// the identities relating them.
#[derive(Debug, Clone)]
pub struct StatConnections {
    pub gamma_hat: ConnectionAt,
    pub gamma: ConnectionAt,
    pub gamma_bar: ConnectionAt,
    pub r_hat: CurvTensor,
    pub r: CurvTensor,
    pub r_bar: CurvTensor,
    pub bracket: CurvTensor,
    /// `∇̂A` at `[x, y, z, w] = (∇̂_x A)(y, z, w)`.
    pub nabla_a: Tensor,
    pub criteria: ConjugateCriteria,
    pub conjugate_symmetric: bool,
    pub residuals: Vec<Residual>,
}

/// The three quantities that vanish together exactly when the structure is
/// conjugate symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateCriteria {
    /// `‖R − R̄‖`.
    pub r_minus_rbar: f64,
    /// `‖asym ∇̂A‖ / (1 + ‖∇̂A‖)` over the derivative slot and the first
    /// slot of `A`.
    pub asym_nabla_a: f64,
    /// `‖R_{ijkl} + R_{ijlk}‖`.
    pub skew_kl: f64,
}

pub(crate) fn nabla_a_raw(cs: &ChartStructure, x: &[f64]) -> Result<Tensor> {
    nabla_hat_raw(cs, &|y: &[f64]| a_tensor(cs, y), x)
}

pub(crate) fn asymmetry(g: &MetricPoint, nabla_a: &Tensor) -> Result<f64> {
    let d = nabla_a.swap_defect(0, 1)?;
    Ok(gnorm(g, &d)? / (1.0 + gnorm(g, nabla_a)?))
}

/// Scale-free asymmetry of `∇̂A` and whether it is below the threshold.
pub fn conjugate_symmetry(cs: &ChartStructure, x: &[f64]) -> Result<(f64, bool)> {
    cs.check_point(x)?;
    let asym = asymmetry(&cs.metric(x)?, &nabla_a_raw(cs, x)?)?;
    Ok((asym, asym < conjugate_threshold(cs.h(), 1.0)))
}

fn curv_norm(g: &MetricPoint, r: &CurvTensor) -> Result<f64> {
    gnorm(g, r.tensor())
}

pub fn statistical_connections(cs: &ChartStructure, x: &[f64]) -> Result<StatConnections> {
    cs.check_point(x)?;
    let h = cs.h();
    let g = cs.metric(x)?;
    let sp = StatPoint::new(g.clone(), cs.cubic(x)?)?;
    let dg = dmetric_raw(cs, x)?;
    let gamma_hat = christoffel_raw(cs, x)?;
    let k = k_raw(cs, x)?;
    let gamma = gamma_hat.add(&k)?;
    let gamma_bar = gamma_hat.sub(&k)?;

    // R̂ from the compact jet of g; R and R̄ directly from the coefficient
    // fields of ∇ and ∇̄.
    let r_hat = curvature_hat_raw(cs, x)?;
    let r = CurvTensor::from_mixed(&g, &curvature_raw(h, &|y: &[f64]| nabla_raw(cs, y), x)?)?;
    let r_bar = CurvTensor::from_mixed(&g, &curvature_raw(h, &|y: &[f64]| bar_raw(cs, y), x)?)?;
    let bracket = bracket_kk(&sp);
    let nabla_a = nabla_a_raw(cs, x)?;

    let mut residuals = Vec::new();

    let dual = super::ops::conjugate_coeffs(&g, &dg, &gamma);
    residuals.push(Residual::new(
        "conjugate-connection",
        dual.sub(&gamma_bar)?.max_abs(),
        gamma.max_abs().max(gamma_bar.max_abs()),
        C_CONNECTION,
    ));
    let back = super::ops::conjugate_coeffs(&g, &dg, &dual);
    residuals.push(Residual::new(
        "duality-involution",
        back.sub(&gamma)?.max_abs(),
        gamma.max_abs(),
        0.0,
    ));

    let mag = curv_norm(&g, &r)?
        .max(curv_norm(&g, &r_bar)?)
        .max(curv_norm(&g, &r_hat)?);
    let r_bar_swapped = r_bar.tensor().permute(&[0, 1, 3, 2])?;
    residuals.push(Residual::new(
        "curvature-duality",
        gnorm(&g, &r.tensor().add(&r_bar_swapped)?)?,
        mag,
        C_CURVATURE,
    ));

    let via = r_hat
        .tensor()
        .add(&nabla_a)?
        .sub(&nabla_a.permute(&[1, 0, 2, 3])?)?
        .add(bracket.tensor())?;
    residuals.push(Residual::new(
        "curvature-decomposition",
        gnorm(&g, &r.tensor().sub(&via)?)?,
        mag.max(gnorm(&g, &nabla_a)?),
        C_CURVATURE,
    ));

    let sum = r
        .add(&r_bar)?
        .sub(&r_hat.scale(2.0))?
        .sub(&bracket.scale(2.0))?;
    residuals.push(Residual::new(
        "curvature-sum",
        curv_norm(&g, &sum)?,
        mag,
        C_CURVATURE,
    ));

    let asym = asymmetry(&g, &nabla_a)?;
    let conjugate_symmetric = asym < conjugate_threshold(h, 1.0);
    if conjugate_symmetric {
        let d = r.sub(&r_hat)?.sub(&bracket)?;
        residuals.push(Residual::new(
            "conjugate-symmetric-curvature",
            curv_norm(&g, &d)?,
            mag,
            C_CURVATURE,
        ));
    }

    let skew = r.tensor().add(&r.tensor().permute(&[0, 1, 3, 2])?)?;
    let criteria = ConjugateCriteria {
        r_minus_rbar: curv_norm(&g, &r.sub(&r_bar)?)?,
        asym_nabla_a: asym,
        skew_kl: gnorm(&g, &skew)?,
    };

    Ok(StatConnections {
        gamma_hat: ConnectionAt::from_coeffs(gamma_hat),
        gamma: ConnectionAt::from_coeffs(gamma),
        gamma_bar: ConnectionAt::from_coeffs(gamma_bar),
        r_hat,
        r,
        r_bar,
        bracket,
        nabla_a,
        criteria,
        conjugate_symmetric,
        residuals,
    })
}

/// `τ(K(Y, Z))`.
pub(crate) fn tau_circ_k(k: &Tensor, tau: &[f64]) -> Tensor {
    let n = k.dim();
    Tensor::from_fn(n, 2, 0, |x| {
        (0..n).map(|m| tau[m] * k.get(&[x[0], x[1], m])).sum()
    })
}

/// `g(K_Y, K_Z) = tr(K_Y K_Z)`.
pub(crate) fn g_kk(k: &Tensor) -> Tensor {
    let n = k.dim();
    Tensor::from_fn(n, 2, 0, |x| {
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += k.get(&[x[0], b, a]) * k.get(&[x[1], a, b]);
            }
        }
        acc
    })
}

pub(crate) fn scalar_trace(g: &MetricPoint, t: &Tensor) -> Result<f64> {
    Ok(trace_g(g, t, 0, 1)?.data()[0])
}

#[derive(Debug, Clone)]
pub struct RicciDecomposition {
    pub ric: Tensor,
    pub ric_bar: Tensor,
    pub ric_hat: Tensor,
    pub residuals: Vec<Residual>,
    pub gaps: Vec<Gap>,
}

pub fn ricci_decomposition_residuals(cs: &ChartStructure, x: &[f64]) -> Result<RicciDecomposition> {
    let sc = statistical_connections(cs, x)?;
    let h = cs.h();
    let g = cs.metric(x)?;
    let sp = StatPoint::new(g.clone(), cs.cubic(x)?)?;
    let k = sp.k().clone();
    let tau = sp.tau().to_vec();
    let ric = sc.r.ricci(&g);
    let ric_bar = sc.r_bar.ricci(&g);
    let ric_hat = sc.r_hat.ricci(&g);
    let div_k = trace_g(&g, &sc.nabla_a, 0, 3)?;
    let tau_field = |y: &[f64]| tau_raw(cs, y);
    let nabla_tau = nabla_hat_raw(cs, &tau_field, x)?;
    let ric_kk = ric_k(&sp);
    let tk = tau_circ_k(&k, &tau);
    let gkk = g_kk(&k);

    let mag2 = [&ric, &ric_bar, &ric_hat, &div_k, &nabla_tau, &ric_kk]
        .iter()
        .map(|t| gnorm(&g, t))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;

    let mut residuals = Vec::new();
    let decomposition = ric.sub(&ric_hat.add(&div_k)?.sub(&nabla_tau)?.add(&ric_kk)?)?;
    residuals.push(Residual::new(
        "ricci-decomposition",
        gnorm(&g, &decomposition)?,
        mag2,
        C_CURVATURE,
    ));

    let sum = ric
        .add(&ric_bar)?
        .sub(&ric_hat.scale(2.0))?
        .sub(&tk.scale(2.0))?
        .add(&gkk.scale(2.0))?;
    residuals.push(Residual::new(
        "ricci-sum",
        gnorm(&g, &sum)?,
        mag2,
        C_CURVATURE,
    ));

    let rho = scalar_trace(&g, &ric)?;
    let rho_hat = scalar_trace(&g, &ric_hat)?;
    let a2 = sp.norm_a_sq();
    let e2 = sp.norm_e_sq();
    residuals.push(Residual::new(
        "scalar-curvature",
        abs(rho_hat - rho - a2 + e2),
        abs(rho).max(abs(rho_hat)).max(a2),
        C_CURVATURE,
    ));

    let gamma = sc.gamma.coeffs();
    let beta = covariant_from(
        gamma,
        &super::ops::partial_raw(h, &tau_field, x)?,
        &Tensor::from_covector(&tau),
    )?;
    let beta_via = nabla_tau.sub(&tk)?;
    let mag_beta = gnorm(&g, &beta)?.max(gnorm(&g, &nabla_tau)?);
    residuals.push(Residual::new(
        "tau-hessian",
        gnorm(&g, &beta.sub(&beta_via)?)?,
        mag_beta,
        C_CONNECTION,
    ));
    let delta_tau = scalar_trace(&g, &nabla_tau)?;
    let tr_beta = scalar_trace(&g, &beta)?;
    let tau_sq = norm_sq(&g, &Tensor::from_covector(&tau))?;
    residuals.push(Residual::new(
        "tau-hessian-trace",
        abs(tr_beta - (delta_tau - tau_sq)),
        mag_beta.max(tau_sq),
        C_CONNECTION,
    ));

    let r_norm = gnorm(&g, sc.r.tensor())?;
    if r_norm <= fd_tol(C_CURVATURE, h, gnorm(&g, sc.r_hat.tensor())?, 1.0) {
        let d = ric_hat.sub(&gkk.sub(&tk)?)?;
        residuals.push(Residual::new(
            "hessian-ricci",
            gnorm(&g, &d)?,
            mag2,
            C_CURVATURE,
        ));
    }

    let mut gaps = vec![Gap {
        id: "ricci-chain",
        value: ricci_chain_gap(&g, &ric_hat, &ric, &ric_bar, &tau)?,
        magnitude: mag2,
        c: C_CURVATURE,
    }];
    if sqrt(tau_sq.max(0.0)) <= TRACE_FREE_FIELD * (1.0 + sqrt(a2)) {
        let form = ric_hat.scale(2.0).sub(&ric)?.sub(&ric_bar)?;
        let value = crate::point::eigenvalues_rel(&g, &form)?
            .first()
            .copied()
            .unwrap_or(0.0);
        gaps.push(Gap {
            id: "trace-free-ricci-chain",
            value,
            magnitude: mag2,
            c: C_CURVATURE,
        });
    }
    Ok(RicciDecomposition {
        ric,
        ric_bar,
        ric_hat,
        residuals,
        gaps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionalNabla {
    /// `½ g((R + R̄)(e₁, e₂)e₂, e₁)`.
    pub k: f64,
    pub k_hat: f64,
    pub k_k: f64,
    pub residual: Residual,
}

pub fn sectional_nabla(
    cs: &ChartStructure,
    x: &[f64],
    u: &[f64],
    v: &[f64],
) -> Result<SectionalNabla> {
    let sc = statistical_connections(cs, x)?;
    let g = cs.metric(x)?;
    let (e1, e2) = gram_schmidt(&g, u, v)?;
    let sum = sc.r.add(&sc.r_bar)?;
    let k = 0.5 * sum.tensor().eval(&[&e1, &e2, &e2, &e1]);
    let k_hat = sc.r_hat.tensor().eval(&[&e1, &e2, &e2, &e1]);
    let k_k = sc.bracket.tensor().eval(&[&e1, &e2, &e2, &e1]);
    let residual = Residual::new(
        "sectional-sum",
        abs(k - k_hat - k_k),
        abs(k).max(abs(k_hat)).max(abs(k_k)),
        C_CURVATURE,
    );
    Ok(SectionalNabla {
        k,
        k_hat,
        k_k,
        residual,
    })
}

pub(crate) fn curv_inner(g: &MetricPoint, a: &CurvTensor, b: &CurvTensor) -> Result<f64> {
    inner(g, a.tensor(), b.tensor())
}
