use alloc::format;
use alloc::vec::Vec;

use super::ops::{
    a_tensor, christoffel_raw, codifferential_raw, curvature_raw, exterior_d_raw, nabla_hat2_raw,
    nabla_hat_raw, partial_raw, scalar_laplacian_raw, tau_raw,
};
use super::residuals::{
    asymmetry, curv_inner, g_kk, scalar_trace, statistical_connections, tau_circ_k,
};
use super::{gnorm, ChartStructure, Gap, Residual, TensorField};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::math::{abs, sqrt};
use crate::point::StatPoint;
use crate::tensor::{
    for_each_index, inner, norm_sq, orthonormal_frame, to_frame, trace_g, CurvTensor, MetricPoint,
    Tensor,
};
use crate::tolerance::{conjugate_threshold, fd_tol, C_CURVATURE, C_SIMONS, TRACE_FREE_FIELD};

fn max_mag(vals: &[f64]) -> f64 {
    vals.iter().fold(0.0f64, |m, v| m.max(abs(*v)))
}

/// Half the Laplacian of `y ↦ ‖s(y)‖²` (compact stencil).
fn half_lap_norm_sq(cs: &ChartStructure, s: &dyn TensorField, x: &[f64]) -> Result<f64> {
    let u =
        |y: &[f64]| -> Result<Tensor> { Ok(Tensor::scalar(norm_sq(&cs.metric(y)?, &s.eval(y)?)?)) };
    Ok(0.5 * scalar_laplacian_raw(cs, &u, x)?)
}

fn require_covariant(t: &Tensor) -> Result<()> {
    if t.upper() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: t.upper(),
        });
    }
    if t.degree() > 4 {
        return Err(Error::UnsupportedDegree(t.degree()));
    }
    Ok(())
}

/// `R̂^m_{ija}` at `[i, j, a, m]`.
fn r_hat_mixed(cs: &ChartStructure, x: &[f64]) -> Result<Tensor> {
    curvature_raw(cs.h(), &|y: &[f64]| christoffel_raw(cs, y), x)
}

/// `‖∇̂²s(X,Y,…) − ∇̂²s(Y,X,…) − (R̂(X,Y)·s)(…)‖` where the curvature acts
/// as a derivation: `(R̂(X,Y)·s)(Z₁,…) = −Σ s(…, R̂(X,Y)Z_a, …)`.
pub fn ricci_identity_residual(
    cs: &ChartStructure,
    s: &dyn TensorField,
    x: &[f64],
) -> Result<Residual> {
    cs.check_point(x)?;
    let s0 = s.eval(x)?;
    require_covariant(&s0)?;
    let g = cs.metric(x)?;
    let n = g.dim();
    let p = s0.degree();
    let n2 = nabla_hat2_raw(cs, s, x)?;
    let rm = r_hat_mixed(cs, x)?;
    let commutator = n2.swap_defect(0, 1)?;
    let mut action = Tensor::covariant(n, p + 2);
    let mut src = alloc::vec![0usize; p];
    let mut pos = 0;
    for_each_index(n, p + 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = 0.0;
        for slot in 0..p {
            src.copy_from_slice(&idx[2..]);
            let a = idx[2 + slot];
            for m in 0..n {
                src[slot] = m;
                acc -= rm.get(&[i, j, a, m]) * s0.get(&src);
            }
        }
        action.data_mut()[pos] = acc;
        pos += 1;
    });
    let d = commutator.sub(&action)?;
    let mag = gnorm(&g, &commutator)?.max(gnorm(&g, &n2)?);
    Ok(Residual::new(
        "ricci-identity",
        gnorm(&g, &d)?,
        mag,
        C_SIMONS,
    ))
}

/// `½Δ‖s‖² − g(Δs, s) − ‖∇̂s‖²`.
pub fn simons_residual(cs: &ChartStructure, s: &dyn TensorField, x: &[f64]) -> Result<Residual> {
    cs.check_point(x)?;
    let s0 = s.eval(x)?;
    require_covariant(&s0)?;
    let g = cs.metric(x)?;
    let lhs = half_lap_norm_sq(cs, s, x)?;
    let lap = trace_g(&g, &nabla_hat2_raw(cs, s, x)?, 0, 1)?;
    let t1 = inner(&g, &lap, &s0)?;
    let t2 = norm_sq(&g, &nabla_hat_raw(cs, s, x)?)?;
    Ok(Residual::new(
        "simons",
        abs(lhs - t1 - t2),
        max_mag(&[lhs, t1, t2]),
        C_SIMONS,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Weitzenbock {
    /// `tr_g ∇̂²τ − (dδ + δd)τ − Riĉ(·, E)`.
    pub vector: Residual,
    /// `½Δ‖τ‖² − g((dδ + δd)τ, τ) − Riĉ(E, E) − ‖∇̂τ‖²`.
    pub scalar: Residual,
}

pub fn weitzenbock_residual(
    cs: &ChartStructure,
    tau: &dyn TensorField,
    x: &[f64],
) -> Result<Weitzenbock> {
    cs.check_point(x)?;
    let h = cs.h();
    let t0 = tau.eval(x)?;
    if t0.degree() != 1 || t0.upper() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: t0.degree(),
        });
    }
    let g = cs.metric(x)?;
    let lap = trace_g(&g, &nabla_hat2_raw(cs, tau, x)?, 0, 1)?;
    let delta = |y: &[f64]| codifferential_raw(cs, tau, y);
    let d_delta = partial_raw(h, &delta, x)?;
    let d_tau = |y: &[f64]| exterior_d_raw(h, tau, y);
    let delta_d = codifferential_raw(cs, &d_tau, x)?;
    let hodge = d_delta.add(&delta_d)?;
    let ric_hat = super::ops::curvature_hat_raw(cs, x)?.ricci(&g);
    let e = g.sharp(t0.data());
    let n = g.dim();
    let ric_e = Tensor::from_fn(n, 1, 0, |i| {
        (0..n).map(|b| ric_hat.get(&[i[0], b]) * e[b]).sum()
    });
    let d = lap.sub(&hodge)?.sub(&ric_e)?;
    let mag = [&lap, &hodge, &ric_e]
        .iter()
        .map(|t| gnorm(&g, t))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    let vector = Residual::new("weitzenbock", gnorm(&g, &d)?, mag, C_SIMONS);

    let lhs = half_lap_norm_sq(cs, tau, x)?;
    let s1 = inner(&g, &hodge, &t0)?;
    let s2: f64 = ric_e.data().iter().zip(&e).map(|(a, b)| a * b).sum();
    let s3 = norm_sq(&g, &nabla_hat_raw(cs, tau, x)?)?;
    let scalar = Residual::new(
        "weitzenbock-norm",
        abs(lhs - s1 - s2 - s3),
        max_mag(&[lhs, s1, s2, s3]),
        C_SIMONS,
    );
    Ok(Weitzenbock { vector, scalar })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sym2Simons {
    pub residual: Residual,
    /// `Σ_{i<k} k̂(eᵢ ∧ e_k)(λᵢ − λ_k)²`.
    pub eigen_term: f64,
    /// Eigenvalues of `β` relative to `g`, ascending.
    pub eigenvalues: Vec<f64>,
}

/// `½Δ‖β‖² = ‖∇̂β‖² + Σ ∇̂²β(e_j, e_k, eᵢ, eᵢ) β_{jk} + Σ_{i<k} k̂(eᵢ∧e_k)(λᵢ − λ_k)²`
/// for a symmetric 2-form with symmetric `∇̂β`.
pub fn sym2_simons_residual(
    cs: &ChartStructure,
    beta: &dyn TensorField,
    x: &[f64],
) -> Result<Sym2Simons> {
    cs.check_point(x)?;
    let b0 = beta.eval(x)?;
    if b0.degree() != 2 || b0.upper() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: b0.degree(),
        });
    }
    let g = cs.metric(x)?;
    let n = g.dim();
    let nb = nabla_hat_raw(cs, beta, x)?;
    let asym = asymmetry(&g, &nb)?;
    if !(asym < conjugate_threshold(cs.h(), 1.0)) {
        return Err(Error::Precondition(format!(
            "covariant derivative of beta is not symmetric (asymmetry {asym:.3e})"
        )));
    }
    let lhs = half_lap_norm_sq(cs, beta, x)?;
    let t1 = norm_sq(&g, &nb)?;
    let hess_trace = trace_g(&g, &nabla_hat2_raw(cs, beta, x)?, 2, 3)?;
    let t2 = inner(&g, &hess_trace, &b0)?;

    let frame = orthonormal_frame(&g);
    let bf = to_frame(&b0, &frame);
    let m = Mat::from_row_major(n, bf.data().to_vec())?;
    let (lambda, u) = m.add(&m.transpose()).scale(0.5).symmetric_eigen();
    let vecs: Vec<Vec<f64>> = (0..n)
        .map(|c| frame.matvec(&(0..n).map(|r| u[(r, c)]).collect::<Vec<_>>()))
        .collect();
    let r_hat = super::ops::curvature_hat_raw(cs, x)?;
    let mut eigen_term = 0.0;
    for i in 0..n {
        for k in i + 1..n {
            let kh = r_hat
                .tensor()
                .eval(&[&vecs[i], &vecs[k], &vecs[k], &vecs[i]]);
            eigen_term += kh * (lambda[i] - lambda[k]) * (lambda[i] - lambda[k]);
        }
    }
    let residual = Residual::new(
        "sym2-simons",
        abs(lhs - t1 - t2 - eigen_term),
        max_mag(&[lhs, t1, t2, eigen_term]),
        C_SIMONS,
    );
    Ok(Sym2Simons {
        residual,
        eigen_term,
        eigenvalues: lambda,
    })
}

/// Terms of the Simons-type formula for `u = ‖A‖²` at one point.
#[derive(Debug, Clone)]
pub struct CubicSimonsTerms {
    pub g: MetricPoint,
    pub sp: StatPoint,
    /// `½Δu`.
    pub half_lap_u: f64,
    pub u: f64,
    /// `‖∇̂A‖²`.
    pub nabla_a_sq: f64,
    /// `‖∇̂τ‖`.
    pub nabla_tau_norm: f64,
    /// `g(∇̂²τ, A)`.
    pub tau_hess_a: f64,
    pub tau_hess_norm: f64,
    pub r_hat: CurvTensor,
    pub r: CurvTensor,
    pub bracket: CurvTensor,
    pub ric: Tensor,
    pub ric_hat: Tensor,
    /// `g(K·, K·)`.
    pub gkk: Tensor,
    /// `τ∘K`.
    pub tau_k: Tensor,
    pub rho_hat: f64,
    pub asymmetry: f64,
}

/// Computes every term; fails with the asymmetry norm unless the structure
/// is conjugate symmetric at `x`.
pub fn cubic_simons_terms(cs: &ChartStructure, x: &[f64]) -> Result<CubicSimonsTerms> {
    let sc = statistical_connections(cs, x)?;
    if !sc.conjugate_symmetric {
        return Err(Error::Precondition(format!(
            "structure is not conjugate symmetric (asymmetry {:.3e})",
            sc.criteria.asym_nabla_a
        )));
    }
    let g = cs.metric(x)?;
    let sp = StatPoint::new(g.clone(), cs.cubic(x)?)?;
    let a_field = |y: &[f64]| a_tensor(cs, y);
    let half_lap_u = half_lap_norm_sq(cs, &a_field, x)?;
    let tau_field = |y: &[f64]| tau_raw(cs, y);
    let nabla_tau = nabla_hat_raw(cs, &tau_field, x)?;
    let tau_hess = nabla_hat2_raw(cs, &tau_field, x)?;
    let a = sp.cubic().to_tensor();
    let ric = sc.r.ricci(&g);
    let ric_hat = sc.r_hat.ricci(&g);
    let rho_hat = scalar_trace(&g, &ric_hat)?;
    Ok(CubicSimonsTerms {
        half_lap_u,
        u: sp.norm_a_sq(),
        nabla_a_sq: norm_sq(&g, &sc.nabla_a)?,
        nabla_tau_norm: gnorm(&g, &nabla_tau)?,
        tau_hess_a: inner(&g, &tau_hess, &a)?,
        tau_hess_norm: gnorm(&g, &tau_hess)?,
        gkk: g_kk(sp.k()),
        tau_k: tau_circ_k(sp.k(), sp.tau()),
        r_hat: sc.r_hat,
        r: sc.r,
        bracket: sc.bracket,
        ric,
        ric_hat,
        rho_hat,
        asymmetry: sc.criteria.asym_nabla_a,
        g,
        sp,
    })
}

#[derive(Debug, Clone)]
pub struct CubicSimons {
    pub terms: CubicSimonsTerms,
    /// The general formula in its three equivalent forms.
    pub residuals: Vec<Residual>,
    /// Specializations whose hypotheses hold at the point.
    pub specializations: Vec<Residual>,
    pub gaps: Vec<Gap>,
}

/// Best `c` in `T ≈ c·R₀` and the misfit `‖T − c·R₀‖`.
pub(crate) fn fit_r0(g: &MetricPoint, t: &CurvTensor) -> Result<(f64, f64)> {
    let r0 = CurvTensor::r0(g);
    let nn = curv_inner(g, &r0, &r0)?;
    let c = curv_inner(g, t, &r0)? / nn;
    let misfit = gnorm(g, t.sub(&r0.scale(c))?.tensor())?;
    Ok((c, misfit))
}

pub fn cubic_simons_residuals(cs: &ChartStructure, x: &[f64]) -> Result<CubicSimons> {
    let t = cubic_simons_terms(cs, x)?;
    let h = cs.h();
    let g = &t.g;
    let n = g.dim() as f64;
    let lhs = t.half_lap_u;
    let base = t.nabla_a_sq + t.tau_hess_a;
    let kk_rhat = curv_inner(g, &t.bracket, &t.r_hat)?;
    let ric_gkk = inner(g, &t.ric_hat, &t.gkk)?;
    let rhat_sq = curv_inner(g, &t.r_hat, &t.r_hat)?;
    let r_rhat = curv_inner(g, &t.r, &t.r_hat)?;
    let rich_sq = norm_sq(g, &t.ric_hat)?;
    let ric_rich = inner(g, &t.ric, &t.ric_hat)?;
    let ric_tk = inner(g, &t.ric_hat, &t.tau_k)?;
    let mag = max_mag(&[
        lhs,
        t.nabla_a_sq,
        t.tau_hess_a,
        kk_rhat,
        ric_gkk,
        rhat_sq,
        r_rhat,
        rich_sq,
        ric_rich,
        ric_tk,
    ]);
    let res = |id, rhs: f64| Residual::new(id, abs(lhs - rhs), mag.max(abs(rhs)), C_SIMONS);

    let residuals = alloc::vec![
        res("cubic-simons", base - kk_rhat + ric_gkk),
        res("cubic-simons-curvature", base + rhat_sq - r_rhat + ric_gkk),
        res(
            "cubic-simons-ricci",
            base + rhat_sq + rich_sq - r_rhat - ric_rich + ric_tk
        ),
    ];

    let mut specializations = Vec::new();
    let mut gaps = Vec::new();
    let curv_tol = |m: f64| fd_tol(C_CURVATURE, h, m, 1.0);
    let rnorm = gnorm(g, t.r.tensor())?;
    let rhat_norm = sqrt(rhat_sq.max(0.0));

    let (kappa, kk_misfit) = fit_r0(g, &t.bracket)?;
    if kk_misfit <= 1e-9 * (1.0 + gnorm(g, t.bracket.tensor())?) {
        specializations.push(res(
            "bracket-constant-curvature",
            base - 2.0 * kappa * t.rho_hat + ric_gkk,
        ));
    }
    let (hh, r_misfit) = fit_r0(g, &t.r)?;
    let constant_r = r_misfit <= curv_tol(rnorm.max(rhat_norm));
    let tau_norm = sqrt(t.sp.norm_e_sq().max(0.0));
    let trace_free = tau_norm <= TRACE_FREE_FIELD * (1.0 + sqrt(t.u))
        && t.tau_hess_norm <= fd_tol(C_SIMONS, h, sqrt(t.nabla_a_sq), 1.0);
    if trace_free {
        specializations.push(res(
            "trace-free",
            t.nabla_a_sq + rhat_sq + rich_sq - r_rhat - ric_rich,
        ));
        if constant_r {
            specializations.push(res(
                "trace-free-constant-curvature",
                t.nabla_a_sq + rhat_sq + rich_sq - (n + 1.0) * hh * t.rho_hat,
            ));
        }
    }
    let parallel_tau = t.nabla_tau_norm <= fd_tol(C_SIMONS, h, sqrt(t.nabla_a_sq), 1.0);
    if constant_r && parallel_tau {
        specializations.push(res(
            "parallel-tau-constant-curvature",
            t.nabla_a_sq + rhat_sq - 2.0 * hh * t.rho_hat + ric_gkk,
        ));
    }
    let gauss = t.r_hat.sub(&t.bracket)?;
    let (c, gauss_misfit) = fit_r0(g, &gauss)?;
    if gauss_misfit <= curv_tol(rhat_norm.max(gnorm(g, t.bracket.tensor())?)) {
        specializations.push(res(
            "lagrangian",
            base - rhat_sq + 2.0 * c * t.rho_hat + ric_gkk,
        ));
    }
    let (k_hat, hat_misfit) = fit_r0(g, &t.r_hat)?;
    if hat_misfit <= curv_tol(rhat_norm) {
        let e2 = t.sp.norm_e_sq();
        specializations.push(res(
            "hat-constant-curvature",
            base + k_hat * (2.0 * (t.u - e2) + (n - 1.0) * t.u),
        ));
        if k_hat >= 0.0 {
            gaps.push(Gap {
                id: "hat-constant-curvature-lower",
                value: lhs - (base + (n - 1.0) / 3.0 * k_hat * t.u),
                magnitude: mag,
                c: C_SIMONS,
            });
        }
    }
    Ok(CubicSimons {
        terms: t,
        residuals,
        specializations,
        gaps,
    })
}
