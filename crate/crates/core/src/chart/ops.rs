use alloc::vec;
use alloc::vec::Vec;

use super::{offset, stack, ChartStructure, TensorField};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::tensor::{for_each_index, raise_last, trace_g, CurvTensor, MetricPoint, Tensor};

/// Central difference: derivative slot prepended as covariant slot 0.
pub(crate) fn partial_raw(h: f64, f: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    let n = x.len();
    let mut parts = Vec::with_capacity(n);
    for i in 0..n {
        let p = f.eval(&offset(x, i, h))?;
        let m = f.eval(&offset(x, i, -h))?;
        parts.push(p.sub(&m)?.scale(0.5 / h));
    }
    stack(n, parts)
}

pub fn partial(cs: &ChartStructure, f: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    cs.check_point(x)?;
    partial_raw(cs.h(), f, x)
}

/// Connection coefficients `Γ^k_{ij}` at `[i, j, k]`. These are not the
/// components of a tensor; only differences of connections are.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionAt {
    coeffs: Tensor,
}

impl ConnectionAt {
    pub(crate) fn from_coeffs(coeffs: Tensor) -> Self {
        ConnectionAt { coeffs }
    }

    pub fn coeffs(&self) -> &Tensor {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Tensor {
        self.coeffs
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeffs.get(&[i, j, k])
    }

    /// Largest `|Γ^k_{ij} − Γ^k_{ji}|`.
    pub fn torsion(&self) -> f64 {
        self.coeffs
            .swap_defect(0, 1)
            .map(|t| t.max_abs())
            .unwrap_or(f64::INFINITY)
    }
}

pub(crate) fn metric_tensor(cs: &ChartStructure, y: &[f64]) -> Result<Tensor> {
    Ok(Tensor::from_mat(cs.metric(y)?.components()))
}

/// `∂_l g_{ij}` at `[l, i, j]`.
pub(crate) fn dmetric_raw(cs: &ChartStructure, x: &[f64]) -> Result<Tensor> {
    partial_raw(cs.h(), &|y: &[f64]| metric_tensor(cs, y), x)
}

pub(crate) fn levi_civita(g: &MetricPoint, dg: &Tensor) -> Tensor {
    let n = g.dim();
    let inv = g.inverse();
    Tensor::from_fn(n, 2, 1, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let mut acc = 0.0;
        for l in 0..n {
            acc += inv[(k, l)] * (dg.get(&[i, j, l]) + dg.get(&[j, i, l]) - dg.get(&[l, i, j]));
        }
        0.5 * acc
    })
}

pub(crate) fn christoffel_raw(cs: &ChartStructure, x: &[f64]) -> Result<Tensor> {
    let g = cs.metric(x)?;
    Ok(levi_civita(&g, &dmetric_raw(cs, x)?))
}

pub fn christoffel(cs: &ChartStructure, x: &[f64]) -> Result<ConnectionAt> {
    cs.check_point(x)?;
    Ok(ConnectionAt {
        coeffs: christoffel_raw(cs, x)?,
    })
}

/// Largest component of `∇̂g`.
pub fn metricity_residual(cs: &ChartStructure, x: &[f64]) -> Result<f64> {
    cs.check_point(x)?;
    let gam = christoffel_raw(cs, x)?;
    let gt = metric_tensor(cs, x)?;
    Ok(covariant_from(&gam, &dmetric_raw(cs, x)?, &gt)?.max_abs())
}

/// `K^k_{ij}` field value at `y`.
pub(crate) fn k_raw(cs: &ChartStructure, y: &[f64]) -> Result<Tensor> {
    raise_last(&cs.metric(y)?, &cs.cubic(y)?)
}

pub(crate) fn a_tensor(cs: &ChartStructure, y: &[f64]) -> Result<Tensor> {
    Ok(cs.cubic(y)?.to_tensor())
}

/// `τ_k = g^{ij} A_{ijk}`.
pub(crate) fn tau_raw(cs: &ChartStructure, y: &[f64]) -> Result<Tensor> {
    trace_g(&cs.metric(y)?, &a_tensor(cs, y)?, 0, 1)
}

/// Coefficients of `∇ = ∇̂ + K`.
pub fn connection_nabla(cs: &ChartStructure, x: &[f64]) -> Result<ConnectionAt> {
    cs.check_point(x)?;
    Ok(ConnectionAt {
        coeffs: nabla_raw(cs, x)?,
    })
}

/// Coefficients of `∇̄ = ∇̂ − K`.
pub fn connection_bar(cs: &ChartStructure, x: &[f64]) -> Result<ConnectionAt> {
    cs.check_point(x)?;
    Ok(ConnectionAt {
        coeffs: bar_raw(cs, x)?,
    })
}

pub(crate) fn nabla_raw(cs: &ChartStructure, y: &[f64]) -> Result<Tensor> {
    christoffel_raw(cs, y)?.add(&k_raw(cs, y)?)
}

pub(crate) fn bar_raw(cs: &ChartStructure, y: &[f64]) -> Result<Tensor> {
    christoffel_raw(cs, y)?.sub(&k_raw(cs, y)?)
}

/// Conjugate of `Γ` with respect to `g`:
/// `Γ̄^m_{ik} = g^{mj}(∂_i g_{jk} − g_{kl} Γ^l_{ij})`.
pub fn conjugate_coeffs(g: &MetricPoint, dg: &Tensor, gamma: &Tensor) -> Tensor {
    let n = g.dim();
    let inv = g.inverse();
    Tensor::from_fn(n, 2, 1, |idx| {
        let (i, k, m) = (idx[0], idx[1], idx[2]);
        let mut acc = 0.0;
        for j in 0..n {
            let mut t = dg.get(&[i, j, k]);
            for l in 0..n {
                t -= g.get(k, l) * gamma.get(&[i, j, l]);
            }
            acc += inv[(m, j)] * t;
        }
        acc
    })
}

/// `∇s` from the coefficients, the stacked partials and the value of `s`.
/// Covariant slots pick up `−Γ^m_{i a} s(…m…)`, contravariant ones
/// `+Γ^b_{i m} s(…m…)`.
pub fn covariant_from(gamma: &Tensor, ds: &Tensor, s: &Tensor) -> Result<Tensor> {
    let n = s.dim();
    let (p, q) = (s.lower(), s.upper());
    let d = p + q;
    if ds.lower() != p + 1 || ds.upper() != q {
        return Err(Error::DegreeMismatch {
            expected: d + 1,
            found: ds.degree(),
        });
    }
    let mut out = ds.clone();
    let mut src = vec![0usize; d];
    let mut pos = 0;
    for_each_index(n, d + 1, |idx| {
        let i = idx[0];
        let mut acc = 0.0;
        for slot in 0..d {
            src.copy_from_slice(&idx[1..]);
            let a = idx[1 + slot];
            for m in 0..n {
                src[slot] = m;
                let v = s.get(&src);
                if v == 0.0 {
                    continue;
                }
                if slot < p {
                    acc -= gamma.get(&[i, a, m]) * v;
                } else {
                    acc += gamma.get(&[i, m, a]) * v;
                }
            }
        }
        out.data_mut()[pos] += acc;
        pos += 1;
    });
    Ok(out)
}

pub(crate) fn nabla_hat_raw(cs: &ChartStructure, s: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    let gam = christoffel_raw(cs, x)?;
    covariant_from(&gam, &partial_raw(cs.h(), s, x)?, &s.eval(x)?)
}

pub(crate) fn nabla_hat2_raw(
    cs: &ChartStructure,
    s: &dyn TensorField,
    x: &[f64],
) -> Result<Tensor> {
    let ds = |y: &[f64]| nabla_hat_raw(cs, s, y);
    nabla_hat_raw(cs, &ds, x)
}

/// `R^l_{ijk}` at `[i, j, k, l]` for a connection given by its coefficient
/// field.
pub(crate) fn curvature_raw(h: f64, conn: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    Ok(curvature_from_jet(
        &conn.eval(x)?,
        &partial_raw(h, conn, x)?,
    ))
}

/// Lowered curvature of an arbitrary connection coefficient field.
pub fn curvature_of(cs: &ChartStructure, conn: &dyn TensorField, x: &[f64]) -> Result<CurvTensor> {
    cs.check_point(x)?;
    CurvTensor::from_mixed(&cs.metric(x)?, &curvature_raw(cs.h(), conn, x)?)
}

/// `Γ̂` and its partials `∂ᵢΓ̂^l_{jk}` at `[i, j, k, l]` from compact first
/// and second partials of `g`:
/// `∂ᵢΓ̂^l_{jk} = g^{lm} ∂ᵢΓ̂_{jk,m} − g^{la} ∂ᵢg_{ab} Γ̂^b_{jk}`.
pub(crate) fn christoffel_jet_raw(
    cs: &ChartStructure,
    x: &[f64],
) -> Result<(MetricPoint, Tensor, Tensor)> {
    let (gt, dg, d2g) = partials2_raw(cs.h(), &|y: &[f64]| metric_tensor(cs, y), x)?;
    let g = MetricPoint::symmetrized(&Mat::from_row_major(cs.dim(), gt.data().to_vec())?)?;
    let n = g.dim();
    let inv = g.inverse();
    let gam = levi_civita(&g, &dg);
    let first_kind = |i: usize, j: usize, k: usize, m: usize| {
        0.5 * (d2g.get(&[i, j, k, m]) + d2g.get(&[i, k, j, m]) - d2g.get(&[i, m, j, k]))
    };
    let dgam = Tensor::from_fn(n, 3, 1, |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = 0.0;
        for m in 0..n {
            acc += inv[(l, m)] * first_kind(i, j, k, m);
        }
        for a in 0..n {
            for b in 0..n {
                acc -= inv[(l, a)] * dg.get(&[i, a, b]) * gam.get(&[j, k, b]);
            }
        }
        acc
    });
    Ok((g, gam, dgam))
}

/// `R^l_{ijk}` from coefficients and their partials `[i, j, k, l]`.
pub(crate) fn curvature_from_jet(gam: &Tensor, dgam: &Tensor) -> Tensor {
    let n = gam.dim();
    Tensor::from_fn(n, 3, 1, |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = dgam.get(&[i, j, k, l]) - dgam.get(&[j, i, k, l]);
        for m in 0..n {
            acc += gam.get(&[i, m, l]) * gam.get(&[j, k, m])
                - gam.get(&[j, m, l]) * gam.get(&[i, k, m]);
        }
        acc
    })
}

pub(crate) fn curvature_hat_raw(cs: &ChartStructure, x: &[f64]) -> Result<CurvTensor> {
    let (g, gam, dgam) = christoffel_jet_raw(cs, x)?;
    CurvTensor::from_mixed(&g, &curvature_from_jet(&gam, &dgam))
}

pub fn curvature_hat(cs: &ChartStructure, x: &[f64]) -> Result<CurvTensor> {
    cs.check_point(x)?;
    curvature_hat_raw(cs, x)
}

pub fn ric_hat(cs: &ChartStructure, x: &[f64]) -> Result<Tensor> {
    Ok(curvature_hat(cs, x)?.ricci(&cs.metric(x)?))
}

pub fn rho_hat(cs: &ChartStructure, x: &[f64]) -> Result<f64> {
    let g = cs.metric(x)?;
    let ric = curvature_hat(cs, x)?.ricci(&g);
    Ok(trace_g(&g, &ric, 0, 1)?.data()[0])
}

pub fn sectional_hat(cs: &ChartStructure, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    curvature_hat(cs, x)?.sectional(&cs.metric(x)?, u, v)
}

pub fn nabla_hat(cs: &ChartStructure, s: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    cs.check_point(x)?;
    nabla_hat_raw(cs, s, x)
}

pub fn nabla_hat2(cs: &ChartStructure, s: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    cs.check_point(x)?;
    nabla_hat2_raw(cs, s, x)
}

/// `Δs = tr_g ∇̂²s` over the two derivative slots.
pub fn laplacian(cs: &ChartStructure, s: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    cs.check_point(x)?;
    trace_g(&cs.metric(x)?, &nabla_hat2_raw(cs, s, x)?, 0, 1)
}

/// Value, first and second partials of a field by compact central
/// stencils (reach `h` per axis, diagonal points for mixed partials). The
/// derivative slots are prepended: `[i, …]` and `[i, j, …]`.
pub(crate) fn partials2_raw(
    h: f64,
    f: &dyn TensorField,
    x: &[f64],
) -> Result<(Tensor, Tensor, Tensor)> {
    let n = x.len();
    let f0 = f.eval(x)?;
    let len = f0.data().len();
    let mut d1 = Vec::with_capacity(n * len);
    let mut d2 = vec![0.0; n * n * len];
    for i in 0..n {
        let p = f.eval(&offset(x, i, h))?;
        let m = f.eval(&offset(x, i, -h))?;
        for c in 0..len {
            let (fp, fm, fc) = (p.data()[c], m.data()[c], f0.data()[c]);
            d1.push((fp - fm) / (2.0 * h));
            d2[(i * n + i) * len + c] = (fp - 2.0 * fc + fm) / (h * h);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let at = |si: f64, sj: f64| f.eval(&offset(&offset(x, i, si * h), j, sj * h));
            let (pp, pm, mp, mm) = (
                at(1.0, 1.0)?,
                at(1.0, -1.0)?,
                at(-1.0, 1.0)?,
                at(-1.0, -1.0)?,
            );
            for c in 0..len {
                let v = (pp.data()[c] - pm.data()[c] - mp.data()[c] + mm.data()[c]) / (4.0 * h * h);
                d2[(i * n + j) * len + c] = v;
                d2[(j * n + i) * len + c] = v;
            }
        }
    }
    let (lo, up) = (f0.lower(), f0.upper());
    Ok((
        f0,
        Tensor::from_data(n, lo + 1, up, d1)?,
        Tensor::from_data(n, lo + 2, up, d2)?,
    ))
}

pub(crate) fn scalar_laplacian_raw(
    cs: &ChartStructure,
    f: &dyn TensorField,
    x: &[f64],
) -> Result<f64> {
    let n = cs.dim();
    let g = cs.metric(x)?;
    let inv = g.inverse();
    let gam = christoffel_raw(cs, x)?;
    let (_, d1, d2) = partials2_raw(cs.h(), f, x)?;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut hij = d2.get(&[i, j]);
            for k in 0..n {
                hij -= gam.get(&[i, j, k]) * d1.get(&[k]);
            }
            acc += inv[(i, j)] * hij;
        }
    }
    Ok(acc)
}

/// Scalar Laplacian by the compact stencil
/// `g^{ij}(∂ᵢ∂ⱼf − Γ^k_{ij} ∂ₖf)`.
pub fn scalar_laplacian(
    cs: &ChartStructure,
    f: &dyn Fn(&[f64]) -> Result<f64>,
    x: &[f64],
) -> Result<f64> {
    cs.check_point(x)?;
    scalar_laplacian_raw(cs, &|y: &[f64]| Ok(Tensor::scalar(f(y)?)), x)
}

/// `(div s)(X₂, …) = tr_g ∇̂s` over the derivative slot and slot `slot` of
/// `s` (a lowered `(1,k)` field passes the slot of its former upper index).
pub fn divergence(
    cs: &ChartStructure,
    s: &dyn TensorField,
    slot: usize,
    x: &[f64],
) -> Result<Tensor> {
    cs.check_point(x)?;
    trace_g(&cs.metric(x)?, &nabla_hat_raw(cs, s, x)?, 0, slot + 1)
}

/// `δω = +tr_g ∇̂ω` on the first two slots.
pub fn codifferential(cs: &ChartStructure, s: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    divergence(cs, s, 0, x)
}

pub(crate) fn codifferential_raw(
    cs: &ChartStructure,
    s: &dyn TensorField,
    x: &[f64],
) -> Result<Tensor> {
    trace_g(&cs.metric(x)?, &nabla_hat_raw(cs, s, x)?, 0, 1)
}

/// `dτ_{ij} = ∂ᵢτⱼ − ∂ⱼτᵢ` for a 1-form field.
pub fn exterior_d(cs: &ChartStructure, tau: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    cs.check_point(x)?;
    exterior_d_raw(cs.h(), tau, x)
}

pub(crate) fn exterior_d_raw(h: f64, tau: &dyn TensorField, x: &[f64]) -> Result<Tensor> {
    let dt = partial_raw(h, tau, x)?;
    if dt.lower() != 2 || dt.upper() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: dt.degree() - 1,
        });
    }
    dt.swap_defect(0, 1)
}
