//! Integrals over unit spheres and over the unit sphere bundle of a torus
//! chart.
//!
//! Fiber integrals are taken in an orthonormal frame of `g`, where the unit
//! sphere of `T_xM` is the round `S^{n−1}`. Sums are pairwise so results do
//! not depend on evaluation order.

use alloc::vec;
use alloc::vec::Vec;

use crate::chart::{
    a_tensor, curvature_hat_raw, nabla_a_raw, nabla_hat2_raw, nabla_hat_raw, tau_raw,
};
use crate::chart::{conjugate_symmetry, ChartStructure, TensorField};
use crate::error::{Error, Result};
use crate::linalg::complete_orthonormal;
use crate::math::{abs, cos, pow, sin, sqrt, tgamma};
use crate::sample::{random_unit, rng};
use crate::tensor::{orthonormal_frame, to_frame, MetricPoint, Tensor};
use crate::tolerance::{fd_tol, C_SIMONS};

/// Surface measure `ω_{n−1} = 2π^{n/2} / Γ(n/2)` of `S^{n−1}`.
pub fn sphere_area(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * pow(core::f64::consts::PI, half) / tgamma(half)
}

pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMethod {
    ProductGauss,
    MonteCarlo,
}

/// Nodes and weights on `S^{n−1}`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    n: usize,
    method: QuadratureMethod,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; m];
    let mut ws = vec![0.0; m];
    for i in 0..m {
        let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if abs(dx) < 1e-16 {
                break;
            }
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

/// Rule for `∫₋₁¹ (1−t²)^{(n−3)/2} p(t) dt`, exact for polynomials `p` of
/// degree `< 2m`: Gauss–Legendre for odd `n`, Gauss–Chebyshev of the second
/// kind for even `n`. The remaining integer power `p` of `1−t²` is folded
/// into the weights at the cost of `p` extra nodes.
fn polar_rule(n: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    if n % 2 == 1 {
        let p = (n - 3) / 2;
        let (ts, ws) = gauss_legendre(m + p);
        let ws = ts
            .iter()
            .zip(&ws)
            .map(|(t, w)| w * pow(1.0 - t * t, p as f64))
            .collect();
        (ts, ws)
    } else {
        let p = (n - 4) / 2;
        let m = m + p;
        let step = core::f64::consts::PI / (m as f64 + 1.0);
        (1..=m)
            .map(|k| {
                let th = k as f64 * step;
                let t = cos(th);
                (t, step * sin(th) * sin(th) * pow(1.0 - t * t, p as f64))
            })
            .unzip()
    }
}

fn product_rule(n: usize, m: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    if n == 2 {
        let count = 2 * m;
        let w = 2.0 * core::f64::consts::PI / count as f64;
        let nodes = (0..count)
            .map(|j| {
                let t = 2.0 * core::f64::consts::PI * j as f64 / count as f64;
                vec![cos(t), sin(t)]
            })
            .collect();
        return (nodes, vec![w; count]);
    }
    let (ts, tw) = polar_rule(n, m);
    let (sub, sw) = product_rule(n - 1, m);
    let mut nodes = Vec::with_capacity(ts.len() * sub.len());
    let mut weights = Vec::with_capacity(ts.len() * sub.len());
    for (t, wt) in ts.iter().zip(&tw) {
        let r = sqrt((1.0 - t * t).max(0.0));
        for (v, wv) in sub.iter().zip(&sw) {
            let mut p = Vec::with_capacity(n);
            p.push(*t);
            p.extend(v.iter().map(|c| r * c));
            nodes.push(p);
            weights.push(wt * wv);
        }
    }
    (nodes, weights)
}

impl SphereQuadrature {
    /// Product rule exact for polynomials of degree `< 2m`: `2m` equispaced
    /// nodes on the circle, and `m` polar nodes per additional dimension.
    pub fn product_gauss(n: usize, m: usize) -> Result<Self> {
        if !(2..=crate::MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if m == 0 {
            return Err(Error::Precondition(
                "quadrature order must be positive".into(),
            ));
        }
        let (nodes, weights) = product_rule(n, m);
        Ok(SphereQuadrature {
            n,
            method: QuadratureMethod::ProductGauss,
            nodes,
            weights,
        })
    }

    /// Smallest product rule exact for polynomials of degree `deg`.
    pub fn exact_for_degree(n: usize, deg: usize) -> Result<Self> {
        Self::product_gauss(n, deg / 2 + 1)
    }

    /// `count` seeded uniform nodes with equal weights.
    pub fn monte_carlo(n: usize, count: usize, seed: u64) -> Result<Self> {
        if !(2..=crate::MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if count < 2 {
            return Err(Error::Precondition(
                "Monte Carlo needs at least two nodes".into(),
            ));
        }
        let mut r = rng(seed);
        let nodes = (0..count).map(|_| random_unit(n, &mut r)).collect();
        let w = sphere_area(n) / count as f64;
        Ok(SphereQuadrature {
            n,
            method: QuadratureMethod::MonteCarlo,
            nodes,
            weights: vec![w; count],
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn method(&self) -> QuadratureMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.n,
            });
        }
        Ok(())
    }
}

/// Quadrature value with its standard error (zero for product rules).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

pub fn integrate_sphere(
    q: &SphereQuadrature,
    f: &dyn Fn(&[f64]) -> Result<f64>,
) -> Result<Estimate> {
    let vals = q.nodes.iter().map(|v| f(v)).collect::<Result<Vec<f64>>>()?;
    let terms: Vec<f64> = vals.iter().zip(&q.weights).map(|(v, w)| v * w).collect();
    let value = pairwise_sum(&terms);
    let std_error = match q.method {
        QuadratureMethod::ProductGauss => 0.0,
        QuadratureMethod::MonteCarlo => {
            let count = vals.len() as f64;
            let mean = pairwise_sum(&vals) / count;
            let dev: Vec<f64> = vals.iter().map(|v| (v - mean) * (v - mean)).collect();
            let var = pairwise_sum(&dev) / (count - 1.0);
            sphere_area(q.n) * sqrt(var / count)
        }
    };
    Ok(Estimate { value, std_error })
}

fn check_fiber_tensor(s: &Tensor, i0: usize) -> Result<usize> {
    let k = s.degree();
    if s.upper() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: s.upper(),
        });
    }
    if !(2..=4).contains(&k) {
        return Err(Error::UnsupportedDegree(k));
    }
    if i0 >= k {
        return Err(Error::SlotOutOfRange {
            slot: i0,
            degree: k,
        });
    }
    Ok(k)
}

fn unit(n: usize, a: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[a] = 1.0;
    e
}

/// `s(V, …, V)` with `w` in slot `i0`.
fn eval_with(s: &Tensor, v: &[f64], i0: usize, w: &[f64]) -> f64 {
    let args: Vec<&[f64]> = (0..s.degree())
        .map(|j| if j == i0 { w } else { v })
        .collect();
    s.eval(&args)
}

/// `Σ_{j≠i0} tr s(V, …, ·, …, ·, …, V)` with the traced pair at `(i0, j)`,
/// in an orthonormal frame.
fn trace_terms(s: &Tensor, v: &[f64], i0: usize) -> f64 {
    let n = s.dim();
    let k = s.degree();
    let basis: Vec<Vec<f64>> = (0..n).map(|a| unit(n, a)).collect();
    let mut acc = 0.0;
    for j in (0..k).filter(|&j| j != i0) {
        for e in &basis {
            let args: Vec<&[f64]> = (0..k)
                .map(|l| if l == i0 || l == j { e.as_slice() } else { v })
                .collect();
            acc += s.eval(&args);
        }
    }
    acc
}

/// `|(n+k−2)∫ s(V,…,V) − Σ_{j≠i0} ∫ tr_{(i0,j)} s(V,…,V)|` over the unit
/// sphere of `g`.
pub fn fiber_identity_residual(
    g: &MetricPoint,
    s: &Tensor,
    i0: usize,
    q: &SphereQuadrature,
) -> Result<f64> {
    let k = check_fiber_tensor(s, i0)?;
    q.check(g.dim())?;
    if s.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: s.dim(),
        });
    }
    let sf = to_frame(s, &orthonormal_frame(g));
    let n = g.dim() as f64;
    let lhs = integrate_sphere(q, &|v| Ok((n + k as f64 - 2.0) * eval_with(&sf, v, i0, v)))?.value;
    let rhs = integrate_sphere(q, &|v| Ok(trace_terms(&sf, v, i0)))?.value;
    Ok(abs(lhs - rhs))
}

/// Pointwise check of the codifferential of `α_V(e) = s(V, …, e, …, V)`
/// (`e` in slot `i0`) on the round sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodiffResidual {
    /// Largest `|δα − formula|` over the nodes.
    pub max_pointwise: f64,
    /// `∫ δα` by quadrature of the finite-difference values.
    pub integral: f64,
}

/// `δα(V) = Σ_a ⟨D_{e_a} X, e_a⟩` for the tangent field `X` dual to `α`,
/// by central differences along great circles with step `hs`.
fn sphere_codiff(s: &Tensor, i0: usize, v: &[f64], hs: f64) -> f64 {
    let n = s.dim();
    let field = |w: &[f64]| -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|j| eval_with(s, w, i0, &unit(n, j))).collect();
        let normal: f64 = raw.iter().zip(w).map(|(a, b)| a * b).sum();
        raw.iter().zip(w).map(|(a, b)| a - normal * b).collect()
    };
    let frame = complete_orthonormal(v);
    let mut acc = 0.0;
    for e in &frame[1..] {
        let at = |t: f64| -> Vec<f64> {
            v.iter()
                .zip(e)
                .map(|(a, b)| cos(t) * a + sin(t) * b)
                .collect()
        };
        let (xp, xm) = (field(&at(hs)), field(&at(-hs)));
        acc += xp
            .iter()
            .zip(&xm)
            .zip(e)
            .map(|((p, m), c)| (p - m) / (2.0 * hs) * c)
            .sum::<f64>();
    }
    acc
}

/// Compares the numeric `δα` with `−(n+k−2)s(V,…,V) + Σ_{j≠i0} tr_{(i0,j)} s`.
pub fn sphere_codiff_residual(
    s: &Tensor,
    i0: usize,
    q: &SphereQuadrature,
    hs: f64,
) -> Result<CodiffResidual> {
    let k = check_fiber_tensor(s, i0)?;
    q.check(s.dim())?;
    let n = s.dim() as f64;
    let mut max_pointwise = 0.0f64;
    let mut fd = Vec::with_capacity(q.len());
    for v in &q.nodes {
        let d = sphere_codiff(s, i0, v, hs);
        let formula = -(n + k as f64 - 2.0) * eval_with(s, v, i0, v) + trace_terms(s, v, i0);
        max_pointwise = max_pointwise.max(abs(d - formula));
        fd.push(d);
    }
    let terms: Vec<f64> = fd.iter().zip(&q.weights).map(|(d, w)| d * w).collect();
    Ok(CodiffResidual {
        max_pointwise,
        integral: pairwise_sum(&terms),
    })
}

/// Value of an integral over the unit sphere bundle with the integral of
/// the absolute integrand, which sets the scale for tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleIntegral {
    pub value: f64,
    pub magnitude: f64,
}

fn require_torus(cs: &ChartStructure) -> Result<()> {
    if cs.periodic().iter().all(|&p| p) {
        Ok(())
    } else {
        Err(Error::NotPeriodic)
    }
}

/// Lattice points of one period with their Riemannian volume weights.
fn volume_lattice(cs: &ChartStructure, m: usize) -> Result<Vec<(Vec<f64>, MetricPoint, f64)>> {
    let cell: f64 = cs
        .domain()
        .iter()
        .map(|(lo, hi)| (hi - lo) / m as f64)
        .product();
    cs.lattice(m)
        .into_iter()
        .map(|x| {
            let g = cs.metric(&x)?;
            let w = cell * sqrt(g.det());
            Ok((x, g, w))
        })
        .collect()
}

/// Contracts the leading slot of a covariant tensor with `v`.
fn contract_first(t: &Tensor, v: &[f64]) -> Tensor {
    let n = t.dim();
    let stride = t.data().len() / n;
    let mut data = vec![0.0; stride];
    for (a, va) in v.iter().enumerate() {
        for (o, x) in data.iter_mut().zip(&t.data()[a * stride..(a + 1) * stride]) {
            *o += va * x;
        }
    }
    Tensor::from_data(n, t.lower() - 1, 0, data).expect("shape")
}

/// `∫_{UM} tr_g(∇̂s)(·, ·, V, …, V)` on a torus chart: trapezoid rule on the
/// `mⁿ` lattice with density `√det g`, fibers by `q` in an orthonormal frame.
pub fn ros_residual(
    cs: &ChartStructure,
    s: &dyn TensorField,
    m: usize,
    q: &SphereQuadrature,
) -> Result<BundleIntegral> {
    require_torus(cs)?;
    let n = cs.dim();
    q.check(n)?;
    let mut values = Vec::new();
    let mut abs_values = Vec::new();
    for (x, g, w) in volume_lattice(cs, m)? {
        let ds = nabla_hat_raw(cs, s, &x)?;
        if ds.degree() < 3 || ds.upper() != 0 {
            return Err(Error::UnsupportedDegree(ds.degree() - 1));
        }
        let tf = to_frame(&ds, &orthonormal_frame(&g));
        // Trace over the two leading slots in the orthonormal frame.
        let mut tr = Tensor::covariant(n, tf.degree() - 2);
        for a in 0..n {
            let e = unit(n, a);
            tr = tr.add(&contract_first(&contract_first(&tf, &e), &e))?;
        }
        let f = |v: &[f64]| {
            let args: Vec<&[f64]> = vec![v; tr.degree()];
            Ok(tr.eval(&args))
        };
        values.push(w * integrate_sphere(q, &f)?.value);
        abs_values.push(w * integrate_sphere(q, &|v| f(v).map(abs))?.value);
    }
    Ok(BundleIntegral {
        value: pairwise_sum(&values),
        magnitude: pairwise_sum(&abs_values),
    })
}

/// A bundle integral on the `m` lattice with step `h` and on the `2m`
/// lattice with step `h/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub coarse: BundleIntegral,
    pub fine: BundleIntegral,
}

impl Refinement {
    /// `|coarse| / |fine|`.
    pub fn ratio(&self) -> f64 {
        abs(self.coarse.value) / abs(self.fine.value)
    }
}

pub fn ros_refinement(
    cs: &ChartStructure,
    s: &dyn TensorField,
    m: usize,
    q: &SphereQuadrature,
) -> Result<Refinement> {
    let coarse = ros_residual(cs, s, m, q)?;
    let fine = ros_residual(&cs.with_h(cs.h() / 2.0), s, 2 * m, q)?;
    Ok(Refinement { coarse, fine })
}

/// Terms of `∫‖(∇̂K)(V,V,V)‖² + 3∫g(R̂(K(V,V),V)V, K(V,V)) + ∫∇̂²τ(V,V,V)A(V,V,V)`,
/// which vanishes on a compact conjugate symmetric structure; the last term
/// drops when `∇̂²τ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicBundleTerms {
    pub term_nabla_k: f64,
    pub term_curvature: f64,
    pub term_tau: f64,
    /// `term_nabla_k + term_curvature`.
    pub sum: f64,
    /// `sum + term_tau`.
    pub full_sum: f64,
    /// Largest of the three terms in absolute value.
    pub magnitude: f64,
    /// Conjugate symmetry holds at every lattice point.
    pub conjugate_symmetric: bool,
    /// Largest `‖∇̂²τ‖` over the lattice.
    pub tau_hessian_max: f64,
    /// Both hypotheses hold, so `sum` itself should vanish.
    pub hypotheses_hold: bool,
}

pub fn ros_cubic_functional(
    cs: &ChartStructure,
    m: usize,
    q: &SphereQuadrature,
) -> Result<CubicBundleTerms> {
    require_torus(cs)?;
    let n = cs.dim();
    q.check(n)?;
    let tau_field = |y: &[f64]| tau_raw(cs, y);
    let (mut t1, mut t2, mut t3) = (Vec::new(), Vec::new(), Vec::new());
    let mut conjugate_symmetric = true;
    let mut tau_hessian_max = 0.0f64;
    let mut nabla_a_max = 0.0f64;
    for (x, g, w) in volume_lattice(cs, m)? {
        let b = orthonormal_frame(&g);
        let na = nabla_a_raw(cs, &x)?;
        let tau2 = nabla_hat2_raw(cs, &tau_field, &x)?;
        conjugate_symmetric &= conjugate_symmetry(cs, &x)?.1;
        tau_hessian_max = tau_hessian_max.max(crate::chart::gnorm(&g, &tau2)?);
        nabla_a_max = nabla_a_max.max(crate::chart::gnorm(&g, &na)?);
        let a = to_frame(&a_tensor(cs, &x)?, &b);
        let na = to_frame(&na, &b);
        let tau2 = to_frame(&tau2, &b);
        let rh = to_frame(curvature_hat_raw(cs, &x)?.tensor(), &b);
        let fiber =
            |f: &dyn Fn(&[f64]) -> f64| integrate_sphere(q, &|v| Ok(f(v))).map(|e| w * e.value);
        t1.push(fiber(&|v| {
            let d = contract_first(&contract_first(&contract_first(&na, v), v), v);
            d.data().iter().map(|c| c * c).sum()
        })?);
        t2.push(fiber(&|v| {
            let kvv = contract_first(&contract_first(&a, v), v);
            3.0 * rh.eval(&[kvv.data(), v, v, kvv.data()])
        })?);
        t3.push(fiber(&|v| tau2.eval(&[v, v, v]) * a.eval(&[v, v, v]))?);
    }
    let (term_nabla_k, term_curvature, term_tau) =
        (pairwise_sum(&t1), pairwise_sum(&t2), pairwise_sum(&t3));
    let magnitude = abs(term_nabla_k)
        .max(abs(term_curvature))
        .max(abs(term_tau));
    let flat_tau = tau_hessian_max <= fd_tol(C_SIMONS, cs.h(), nabla_a_max, 1.0);
    Ok(CubicBundleTerms {
        term_nabla_k,
        term_curvature,
        term_tau,
        sum: term_nabla_k + term_curvature,
        full_sum: term_nabla_k + term_curvature + term_tau,
        magnitude,
        conjugate_symmetric,
        tau_hessian_max,
        hypotheses_hold: conjugate_symmetric && flat_tau,
    })
}

#[cfg(test)]
mod tests;
