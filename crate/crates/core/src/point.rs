//! Pointwise algebra of a statistical structure.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal, Mat};
use crate::math::{abs, norm2, sqrt};
use crate::sample;
use crate::tensor::{self, CubicForm, CurvTensor, MetricPoint, Tensor};

/// Absolute tolerance on every certificate witness.
pub const CERT_TOL: f64 = 1e-9;

/// Threshold on `‖E‖` below which a structure counts as trace-free.
pub const TRACE_FREE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub name: String,
    pub residual: f64,
}

/// Named equality conditions and their residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityCertificate {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    /// Set when the conditions depend on a frame that had to be searched for.
    pub best_effort: bool,
}

impl EqualityCertificate {
    fn from_witnesses(witnesses: Vec<Witness>, best_effort: bool) -> Self {
        let holds = witnesses.iter().all(|w| w.residual < CERT_TOL);
        EqualityCertificate {
            holds,
            witnesses,
            best_effort,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.witnesses
            .iter()
            .map(|w| w.residual)
            .fold(0.0, f64::max)
    }
}

fn witness(name: &str, residual: f64) -> Witness {
    Witness {
        name: String::from(name),
        residual,
    }
}

/// Result of one of the algebraic inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub certificate: EqualityCertificate,
}

impl InequalityCheck {
    /// `rhs − lhs`; non-negative when the inequality holds.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// A statistical structure `(g, A)` at one point with its difference tensor
/// `K`, mean vector `E = tr_g K` and Czebyshev form `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatPoint {
    g: MetricPoint,
    a: CubicForm,
    k: Tensor,
    e: Vec<f64>,
    tau: Vec<f64>,
}

impl StatPoint {
    pub fn new(g: MetricPoint, a: CubicForm) -> Result<Self> {
        let k = tensor::raise_last(&g, &a)?;
        let tau = tensor::trace_g(&g, &a.to_tensor(), 1, 2)?.data().to_vec();
        let e = g.sharp(&tau);
        Ok(StatPoint { g, a, k, e, tau })
    }

    /// Structure with the Euclidean metric.
    pub fn euclidean(a: CubicForm) -> Result<Self> {
        StatPoint::new(MetricPoint::identity(a.dim())?, a)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    #[inline]
    pub fn metric(&self) -> &MetricPoint {
        &self.g
    }

    #[inline]
    pub fn cubic(&self) -> &CubicForm {
        &self.a
    }

    /// `K^k_{ij}` indexed `[i, j, k]`.
    #[inline]
    pub fn k(&self) -> &Tensor {
        &self.k
    }

    #[inline]
    pub fn e(&self) -> &[f64] {
        &self.e
    }

    #[inline]
    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    /// `K(X, Y)`.
    pub fn k_apply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for (kk, o) in out.iter_mut().enumerate() {
                    *o += w * self.k.get(&[i, j, kk]);
                }
            }
        }
        out
    }

    /// Matrix of the endomorphism `K_X`, entry `(a, b)` = `(K_X e_b)^a`.
    pub fn k_op(&self, x: &[f64]) -> Mat {
        let n = self.dim();
        let mut m = Mat::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for b in 0..n {
                for a in 0..n {
                    m[(a, b)] += x[i] * self.k.get(&[i, b, a]);
                }
            }
        }
        m
    }

    /// `‖A‖² = ‖K‖²`.
    pub fn norm_a_sq(&self) -> f64 {
        let t = self.a.to_tensor();
        tensor::norm_sq(&self.g, &t).expect("shapes agree")
    }

    /// `‖E‖² = τ(E)`.
    pub fn norm_e_sq(&self) -> f64 {
        self.tau.iter().zip(&self.e).map(|(a, b)| a * b).sum()
    }

    pub fn is_trace_free(&self) -> bool {
        sqrt(self.norm_e_sq().max(0.0)) < TRACE_FREE_TOL
    }

    /// Same metric, trace-free part of `A`.
    pub fn trace_free_part(&self) -> Result<StatPoint> {
        StatPoint::new(self.g.clone(), self.a.trace_free_part(&self.g)?)
    }

    /// `(τ∘K)(U,U) − g(K_U, K_U)`.
    fn quarter_lhs(&self, u: &[f64]) -> f64 {
        let kuu = self.k_apply(u, u);
        let tk: f64 = self.tau.iter().zip(&kuu).map(|(a, b)| a * b).sum();
        let ku = self.k_op(u);
        tk - ku.mul(&ku).trace()
    }

    /// Components of `A` in the orthonormal frame whose first vector is the
    /// unit vector along `u`.
    fn adapted(&self, u: &[f64]) -> Result<(Vec<Vec<f64>>, CubicForm)> {
        let b = tensor::orthonormal_frame(&self.g);
        let bi = b.inverse().ok_or(Error::DependentVectors)?;
        // u in frame coordinates, then complete to an orthonormal basis
        let uf = bi.matvec(u);
        let nu = norm2(&uf);
        if nu == 0.0 {
            return Err(Error::ZeroVector);
        }
        let uf: Vec<f64> = uf.iter().map(|x| x / nu).collect();
        let basis = complete_orthonormal(&uf);
        let n = self.dim();
        let mut rot = Mat::zeros(n);
        for (j, v) in basis.iter().enumerate() {
            for i in 0..n {
                rot[(i, j)] = v[i];
            }
        }
        let frame = b.mul(&rot);
        let cols = (0..n)
            .map(|j| (0..n).map(|i| frame[(i, j)]).collect())
            .collect();
        Ok((cols, self.a.to_frame(&frame)))
    }
}

/// `[K,K](X,Y)Z = [K_X, K_Y] Z`, lowered.
pub fn bracket_kk(sp: &StatPoint) -> CurvTensor {
    let n = sp.dim();
    let k = sp.k();
    let mixed = Tensor::from_fn(n, 3, 1, |x| {
        let (i, j, kk, l) = (x[0], x[1], x[2], x[3]);
        let mut acc = 0.0;
        for m in 0..n {
            acc += k.get(&[i, m, l]) * k.get(&[j, kk, m]) - k.get(&[j, m, l]) * k.get(&[i, kk, m]);
        }
        acc
    });
    CurvTensor::from_mixed(sp.metric(), &mixed).expect("shape is (1,3)")
}

/// `Ric^K(Y,Z) = τ(K(Y,Z)) − g(K_Y, K_Z)`.
pub fn ric_k(sp: &StatPoint) -> Tensor {
    let n = sp.dim();
    let k = sp.k();
    let tau = sp.tau();
    Tensor::from_fn(n, 2, 0, |x| {
        let (j, kk) = (x[0], x[1]);
        let mut acc = 0.0;
        for m in 0..n {
            acc += tau[m] * k.get(&[j, kk, m]);
        }
        for a in 0..n {
            for b in 0..n {
                acc -= k.get(&[j, b, a]) * k.get(&[kk, a, b]);
            }
        }
        acc
    })
}

/// `Ric^K` as the trace `tr{X ↦ [K,K](X,Y)Z}`.
pub fn ric_k_direct(sp: &StatPoint) -> Tensor {
    bracket_kk(sp).ricci(sp.metric())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoK {
    pub via_trace: f64,
    pub via_norms: f64,
}

/// `ρ^K` as `tr_g Ric^K` and as `‖E‖² − ‖K‖²`.
pub fn rho_k(sp: &StatPoint) -> RhoK {
    let r = ric_k(sp);
    let via_trace = tensor::trace_g(sp.metric(), &r, 0, 1)
        .expect("degree 2")
        .data()[0];
    RhoK {
        via_trace,
        via_norms: sp.norm_e_sq() - sp.norm_a_sq(),
    }
}

/// `g`-orthonormal pair spanning the plane of `x`, `y`.
pub fn gram_schmidt(g: &MetricPoint, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let nx = g.norm(x);
    if nx == 0.0 {
        return Err(Error::DependentVectors);
    }
    let e1: Vec<f64> = x.iter().map(|v| v / nx).collect();
    let d = g.dot(&e1, y);
    let w: Vec<f64> = y.iter().zip(&e1).map(|(a, b)| a - d * b).collect();
    let nw = g.norm(&w);
    if !(nw > 1e-10 * g.norm(y)) {
        return Err(Error::DependentVectors);
    }
    Ok((e1, w.iter().map(|v| v / nw).collect()))
}

/// Sectional `K`-curvature `g([K,K](e1,e2)e2, e1)` of the plane of `x`, `y`.
pub fn sectional_k(sp: &StatPoint, x: &[f64], y: &[f64]) -> Result<f64> {
    let (e1, e2) = gram_schmidt(sp.metric(), x, y)?;
    Ok(bracket_kk(sp).tensor().eval(&[&e1, &e2, &e2, &e1]))
}

/// `(τ∘K)(U,U) − g(K_U,K_U) ≤ ¼‖τ‖² g(U,U)`; equality iff `τ = 0` and `K_U = 0`.
pub fn check_ineq_quarter(sp: &StatPoint, u: &[f64]) -> Result<InequalityCheck> {
    let uu = sp.metric().dot(u, u);
    if !(uu > 0.0) {
        return Err(Error::ZeroVector);
    }
    let lhs = sp.quarter_lhs(u);
    let rhs = 0.25 * sp.norm_e_sq() * uu;
    let ku = sp.k_op(u);
    let ku_norm = sqrt(ku.mul(&ku).trace().max(0.0) / uu);
    let certificate = EqualityCertificate::from_witnesses(
        vec![
            witness("‖τ‖ = 0", sqrt(sp.norm_e_sq().max(0.0))),
            witness("‖K_U‖ = 0", ku_norm),
        ],
        false,
    );
    Ok(InequalityCheck {
        lhs,
        rhs,
        certificate,
    })
}

/// Largest `|A(U,U,U)|` (for unit `U`) accepted by [`check_ineq_eighth`].
pub const EIGHTH_PRECONDITION_TOL: f64 = 1e-10;

/// The sharper `⅛` inequality, valid when `A(U,U,U) = 0`.
pub fn check_ineq_eighth(sp: &StatPoint, u: &[f64]) -> Result<InequalityCheck> {
    let uu = sp.metric().dot(u, u);
    if !(uu > 0.0) {
        return Err(Error::ZeroVector);
    }
    let un: Vec<f64> = u.iter().map(|x| x / sqrt(uu)).collect();
    let auuu = sp.cubic().eval(&un, &un, &un);
    if abs(auuu) >= EIGHTH_PRECONDITION_TOL {
        return Err(Error::Precondition(alloc::format!(
            "A(U,U,U) = {auuu:e} is not zero"
        )));
    }
    let lhs = sp.quarter_lhs(u);
    let rhs = 0.125 * sp.norm_e_sq() * uu;

    let (frame, af) = sp.adapted(&un)?;
    let n = sp.dim();
    let mut perp: f64 = 0.0;
    for v in 1..n {
        for w in 1..n {
            perp = perp.max(abs(af.get(0, v, w)));
        }
    }
    let e_dot_u = abs(sp.metric().dot(sp.e(), &frame[0]));
    let kuu = sp.k_apply(&un, &un);
    let diff: Vec<f64> = sp.e().iter().zip(&kuu).map(|(e, k)| e - 4.0 * k).collect();
    let certificate = EqualityCertificate::from_witnesses(
        vec![
            witness("g(K(U,V),W) = 0 for V,W ⊥ U", perp),
            witness("g(E,U) = 0", e_dot_u),
            witness("E − 4K(U,U) = 0", sp.metric().norm(&diff)),
        ],
        false,
    );
    Ok(InequalityCheck {
        lhs,
        rhs,
        certificate,
    })
}

/// Residual of the adapted-frame equality conditions for components `a`.
fn n2over3_conditions(a: &CubicForm) -> (f64, f64) {
    let n = a.dim();
    let mut diag: f64 = 0.0;
    let mut distinct: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            diag = diag.max(abs(a.get(i, i, i) - 3.0 * a.get(j, j, i)));
            for r in 0..n {
                if r != i && r != j {
                    distinct = distinct.max(abs(a.get(i, j, r)));
                }
            }
        }
    }
    (diag, distinct)
}

/// Seed of the rotations tried by [`check_ineq_n2over3`].
pub const N2OVER3_SEARCH_SEED: u64 = 0x5eed_0003;
pub const N2OVER3_SEARCH_ROTATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct N2Over3Check {
    /// `(n+2)/3 ‖A‖² − ‖E‖²`.
    pub residual: f64,
    pub certificate: EqualityCertificate,
}

/// `(n+2)/3 ‖A‖² − ‖E‖² ≥ 0`. The certificate searches orthonormal frames
/// (the inverse-Cholesky frame, the eigenframes of every `K_{e_i}`, and a
/// fixed set of random rotations) for one in which `A_iii = 3A_jji` and
/// `A_ijr = 0` for distinct indices.
/// `(n+2)/3 ‖A‖² − ‖E‖²`, without the equality search.
pub fn n2over3_residual(sp: &StatPoint) -> f64 {
    (sp.dim() as f64 + 2.0) / 3.0 * sp.norm_a_sq() - sp.norm_e_sq()
}

pub fn check_ineq_n2over3(sp: &StatPoint) -> N2Over3Check {
    let n = sp.dim();
    let residual = n2over3_residual(sp);
    let b = tensor::orthonormal_frame(sp.metric());
    let a0 = sp.cubic().to_frame(&b);

    let mut rotations = vec![Mat::identity(n)];
    for i in 0..n {
        let ki = Mat::from_row_major(n, (0..n * n).map(|x| a0.get(i, x / n, x % n)).collect())
            .expect("n² entries");
        rotations.push(ki.symmetric_eigen().1);
    }
    let mut rng = sample::rng(N2OVER3_SEARCH_SEED);
    for _ in 0..N2OVER3_SEARCH_ROTATIONS {
        rotations.push(sample::random_rotation(n, &mut rng));
    }

    let mut best = (f64::INFINITY, f64::INFINITY);
    for r in &rotations {
        let c = n2over3_conditions(&a0.to_frame(r));
        if c.0.max(c.1) < best.0.max(best.1) {
            best = c;
        }
    }
    let certificate = EqualityCertificate::from_witnesses(
        vec![
            witness("A_iii − 3A_jji = 0 (i ≠ j)", best.0),
            witness("A_ijr = 0 (distinct)", best.1),
        ],
        true,
    );
    N2Over3Check {
        residual,
        certificate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarGap {
    /// `ρ̂ − ρ = ‖A‖² − ‖E‖²`.
    pub gap: f64,
    /// `−(n−1)/3 ‖A‖²`.
    pub lower_13: f64,
    /// `−(n−1)/(n+2) ‖E‖²`.
    pub lower_n2: f64,
}

pub fn scalar_gap_bounds(sp: &StatPoint) -> ScalarGap {
    let n = sp.dim() as f64;
    let a2 = sp.norm_a_sq();
    let e2 = sp.norm_e_sq();
    ScalarGap {
        gap: a2 - e2,
        lower_13: -(n - 1.0) / 3.0 * a2,
        lower_n2: -(n - 1.0) / (n + 2.0) * e2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lpq {
    pub normsq_l: f64,
    pub normsq_p: f64,
    /// `Q` in the orthonormal frame of `g`.
    pub q: Tensor,
    /// `g(Q, A)`.
    pub pairing: f64,
    /// `u = ‖A‖²`.
    pub u: f64,
}

impl Lpq {
    pub fn sum(&self) -> f64 {
        self.normsq_l + self.normsq_p
    }

    /// `(n+1)/(n(n−1)) u²`, the lower estimate for trace-free forms.
    pub fn calabi_lower(&self, n: usize) -> f64 {
        let n = n as f64;
        (n + 1.0) / (n * (n - 1.0)) * self.u * self.u
    }

    /// `(3/2) u²`.
    pub fn li_upper(&self) -> f64 {
        1.5 * self.u * self.u
    }
}

/// The tensors `L`, `P`, `Q` evaluated in the orthonormal frame of `g`.
pub fn lpq(sp: &StatPoint) -> Lpq {
    let n = sp.dim();
    let b = tensor::orthonormal_frame(sp.metric());
    let at = sp.cubic().to_frame(&b).to_tensor();
    // expanded storage: the inner loops below are hot
    let ad = at.data();
    let a_ = |i: usize, j: usize, k: usize| ad[(i * n + j) * n + k];

    let mut normsq_l = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut aij = 0.0;
            for k in 0..n {
                for l in 0..n {
                    aij += a_(i, k, l) * a_(j, k, l);
                }
            }
            normsq_l += aij * aij;
        }
    }
    let mut normsq_p = 0.0;
    tensor::for_each_index(n, 4, |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        let mut bv = 0.0;
        for m in 0..n {
            bv += a_(i, j, m) * a_(k, l, m) - a_(k, j, m) * a_(i, l, m);
        }
        normsq_p += bv * bv;
    });

    // commutators C_{iy} = [K_i, K_y], entry (p, q)
    let kmat = |i: usize| {
        Mat::from_row_major(n, (0..n * n).map(|x| a_(i, x / n, x % n)).collect())
            .expect("n² entries")
    };
    let ks: Vec<Mat> = (0..n).map(kmat).collect();
    let mut q = Tensor::covariant(n, 3);
    for y in 0..n {
        for i in 0..n {
            let c = ks[i].mul(&ks[y]).sub(&ks[y].mul(&ks[i]));
            for w in 0..n {
                for z in 0..n {
                    let mut acc = 0.0;
                    for p in 0..n {
                        acc -= c[(p, i)] * a_(p, w, z)
                            + c[(p, w)] * a_(i, p, z)
                            + c[(p, z)] * a_(i, w, p);
                    }
                    q.add_at(&[y, w, z], acc);
                }
            }
        }
    }
    let pairing = q.data().iter().zip(at.data()).map(|(x, y)| x * y).sum();
    let u = at.data().iter().map(|x| x * x).sum();
    Lpq {
        normsq_l,
        normsq_p,
        q,
        pairing,
        u,
    }
}

/// `‖Rt − H·R₀(g)‖`.
pub fn constant_curvature_residual(rt: &CurvTensor, g: &MetricPoint, h: f64) -> Result<f64> {
    let d = rt.sub(&CurvTensor::r0(g).scale(h))?;
    Ok(sqrt(tensor::norm_sq(g, d.tensor())?.max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianResidual {
    /// `‖cR₀ − R̂ + [K,K]‖`.
    pub tensor: f64,
    /// `ρ̂ − (cn(n−1) + ‖E‖² − ‖A‖²)`.
    pub scalar: f64,
}

pub fn lagrangian_gauss_residual(
    sp: &StatPoint,
    rhat: &CurvTensor,
    c: f64,
) -> Result<LagrangianResidual> {
    let g = sp.metric();
    let n = sp.dim() as f64;
    let d = CurvTensor::r0(g).scale(c).sub(rhat)?.add(&bracket_kk(sp))?;
    let tensor_res = sqrt(tensor::norm_sq(g, d.tensor())?.max(0.0));
    let ric = rhat.ricci(g);
    let rho = tensor::trace_g(g, &ric, 0, 1)?.data()[0];
    let scalar = rho - (c * n * (n - 1.0) + sp.norm_e_sq() - sp.norm_a_sq());
    Ok(LagrangianResidual {
        tensor: tensor_res,
        scalar,
    })
}

/// Eigenvalues of a symmetric 2-form relative to `g`, ascending.
pub fn eigenvalues_rel(g: &MetricPoint, form: &Tensor) -> Result<Vec<f64>> {
    if form.lower() != 2 || form.upper() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: form.degree(),
        });
    }
    let b = tensor::orthonormal_frame(g);
    let f = tensor::to_frame(form, &b);
    let n = g.dim();
    let m = Mat::from_row_major(n, f.data().to_vec())?;
    let sym = m.add(&m.transpose()).scale(0.5);
    Ok(sym.symmetric_eigen().0)
}

fn min_eigen_rel(g: &MetricPoint, form: &Tensor) -> Result<f64> {
    Ok(eigenvalues_rel(g, form)?.first().copied().unwrap_or(0.0))
}

/// Smallest eigenvalue of `2Riĉ − Ric − R̄ic + ½‖τ‖²g`.
pub fn ricci_chain_gap(
    g: &MetricPoint,
    ric_hat: &Tensor,
    ric: &Tensor,
    ric_bar: &Tensor,
    tau: &[f64],
) -> Result<f64> {
    let tau_sq: f64 = tau.iter().zip(g.sharp(tau)).map(|(a, b)| a * b).sum();
    let form = ric_hat
        .scale(2.0)
        .sub(ric)?
        .sub(ric_bar)?
        .axpy(0.5 * tau_sq, &g.as_tensor())?;
    min_eigen_rel(g, &form)
}

/// Smallest eigenvalue of `Riĉ − (H(n−1) − ¼‖τ‖²) g` for structures with `R = HR₀`.
pub fn sphere_ricci_gap(g: &MetricPoint, ric_hat: &Tensor, h: f64, tau: &[f64]) -> Result<f64> {
    let n = g.dim() as f64;
    let tau_sq: f64 = tau.iter().zip(g.sharp(tau)).map(|(a, b)| a * b).sum();
    let form = ric_hat.axpy(-(h * (n - 1.0) - 0.25 * tau_sq), &g.as_tensor())?;
    min_eigen_rel(g, &form)
}

/// Smallest eigenvalue of `(c(n−1) + ¼‖E‖²) g − Riĉ` on a Lagrangian-type
/// structure.
pub fn lagrangian_ricci_gap(g: &MetricPoint, ric_hat: &Tensor, c: f64, tau: &[f64]) -> Result<f64> {
    let n = g.dim() as f64;
    let tau_sq: f64 = tau.iter().zip(g.sharp(tau)).map(|(a, b)| a * b).sum();
    let form = g
        .as_tensor()
        .scale(c * (n - 1.0) + 0.25 * tau_sq)
        .sub(ric_hat)?;
    min_eigen_rel(g, &form)
}

/// Gaps (bound minus value, or value minus bound; non-negative when the
/// corresponding scalar estimate holds) of the two upper bounds on `ρ̂` for
/// Lagrangian-type structures.
pub fn lagrangian_scalar_gaps(sp: &StatPoint, rho_hat: f64, c: f64) -> (f64, f64) {
    let n = sp.dim() as f64;
    let e2 = sp.norm_e_sq();
    let a2 = sp.norm_a_sq();
    let b1 = (n - 1.0) / (n + 2.0) * (c * n * (n + 2.0) + e2);
    let b2 = (n - 1.0) / 3.0 * (3.0 * c * n + a2);
    (b1 - rho_hat, b2 - rho_hat)
}

/// Gaps of the two lower bounds on `ρ̂` for structures with `R = HR₀`.
pub fn sphere_scalar_gaps(sp: &StatPoint, rho_hat: f64, h: f64) -> (f64, f64) {
    let n = sp.dim() as f64;
    let e2 = sp.norm_e_sq();
    let a2 = sp.norm_a_sq();
    let b1 = (n - 1.0) / (n + 2.0) * (h * n * (n + 2.0) - e2);
    let b2 = (n - 1.0) / 3.0 * (3.0 * h * n - a2);
    (rho_hat - b1, rho_hat - b2)
}

/// Unit vector `U` with `A(U,U,U) = 0`, found by bisection along a great
/// circle through a random starting direction `v` and `−v` (the cubic is odd,
/// so it changes sign between them).
pub fn null_direction(sp: &StatPoint, seed: u64) -> Vec<f64> {
    let n = sp.dim();
    let b = tensor::orthonormal_frame(sp.metric());
    let af = sp.cubic().to_frame(&b);
    let mut rng = sample::rng(seed);
    let v = sample::random_unit(n, &mut rng);
    let w = {
        let cand = sample::random_unit(n, &mut rng);
        let d: f64 = cand.iter().zip(&v).map(|(a, b)| a * b).sum();
        let mut w: Vec<f64> = cand.iter().zip(&v).map(|(a, b)| a - d * b).collect();
        let nw = norm2(&w);
        if nw < 1e-8 {
            w = complete_orthonormal(&v)
                .get(1)
                .cloned()
                .unwrap_or_else(|| v.clone());
        } else {
            w.iter_mut().for_each(|x| *x /= nw);
        }
        w
    };
    let point = |t: f64| -> Vec<f64> {
        let (s, c) = (crate::math::sin(t), crate::math::cos(t));
        v.iter().zip(&w).map(|(a, b)| c * a + s * b).collect()
    };
    let f = |t: f64| {
        let p = point(t);
        af.eval(&p, &p, &p)
    };
    let (mut lo, mut hi) = (0.0, core::f64::consts::PI);
    let mut flo = f(lo);
    if n == 1 || flo == 0.0 {
        return b.matvec(&point(0.0));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    b.matvec(&point(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex31() -> StatPoint {
        let mut a = CubicForm::zeros(2).unwrap();
        a.set(0, 0, 1, 1.0);
        a.set(1, 1, 1, 3.0);
        StatPoint::euclidean(a).unwrap()
    }

    fn g3(a: f64, b: f64) -> StatPoint {
        let mut c = CubicForm::zeros(2).unwrap();
        c.set(0, 0, 0, a);
        c.set(0, 1, 1, -a);
        c.set(1, 1, 1, b);
        c.set(0, 0, 1, -b);
        StatPoint::euclidean(c).unwrap()
    }

    fn zero(n: usize) -> StatPoint {
        StatPoint::euclidean(CubicForm::zeros(n).unwrap()).unwrap()
    }

    /// Commutator oracle: `g([K_i, K_j] e_k, e_l)` from explicit matrices.
    fn commutator_oracle(sp: &StatPoint) -> Tensor {
        let n = sp.dim();
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        Tensor::from_fn(n, 4, 0, |x| {
            let ki = sp.k_op(&e(x[0]));
            let kj = sp.k_op(&e(x[1]));
            let c = ki.mul(&kj).sub(&kj.mul(&ki));
            let ck: Vec<f64> = (0..n).map(|r| c[(r, x[2])]).collect();
            sp.metric().dot(&ck, &e(x[3]))
        })
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(bracket_kk(&zero(3)).tensor().max_abs(), 0.0);
        let s = g3(1.0, 0.0);
        assert!(abs(bracket_kk(&s).get(0, 1, 1, 0) + 2.0) < 1e-15);
        let e = ex31();
        let d = bracket_kk(&e).tensor().sub(&commutator_oracle(&e)).unwrap();
        assert!(d.max_abs() < 1e-13);
        let br = bracket_kk(&e);
        assert_eq!(br.antisymmetry_defect(), 0.0);
        assert!(br.bianchi_defect() < 1e-13);
        assert!(br.pair_symmetry_defect() < 1e-13);
    }

    #[test]
    fn ricci_k_examples() {
        assert_eq!(ric_k(&zero(2)).max_abs(), 0.0);
        let r = ric_k(&g3(1.0, 0.0));
        assert_eq!(r.data(), &[-2.0, 0.0, 0.0, -2.0]);
        let e = ex31();
        assert!(ric_k(&e).sub(&ric_k_direct(&e)).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn rho_k_examples() {
        let r = rho_k(&g3(1.0, 0.0));
        assert!(abs(r.via_norms + 4.0) < 1e-14 && abs(r.via_trace + 4.0) < 1e-14);
        let r = rho_k(&ex31());
        assert!(abs(r.via_norms - 4.0) < 1e-14 && abs(r.via_trace - 4.0) < 1e-14);
        assert_eq!(rho_k(&zero(2)).via_trace, 0.0);
    }

    #[test]
    fn sectional_examples() {
        let s = g3(1.0, 0.0);
        assert!(abs(sectional_k(&s, &[1.0, 0.0], &[0.0, 1.0]).unwrap() + 2.0) < 1e-14);
        assert!(abs(sectional_k(&s, &[1.0, 1.0], &[1.0, -1.0]).unwrap() + 2.0) < 1e-14);
        assert_eq!(
            sectional_k(&s, &[1.0, 1.0], &[2.0, 2.0]),
            Err(Error::DependentVectors)
        );
        assert_eq!(
            sectional_k(&zero(2), &[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn quarter_examples() {
        let c = check_ineq_quarter(&ex31(), &[0.0, 1.0]).unwrap();
        assert_eq!((c.lhs, c.rhs), (2.0, 4.0));
        assert!(!c.certificate.holds);
        let c = check_ineq_quarter(&zero(3), &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        assert!(c.certificate.holds);
        assert_eq!(
            check_ineq_quarter(&zero(2), &[0.0, 0.0]),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn eighth_examples() {
        let c = check_ineq_eighth(&ex31(), &[1.0, 0.0]).unwrap();
        assert!(abs(c.lhs - 2.0) < 1e-14 && abs(c.rhs - 2.0) < 1e-14);
        assert!(c.certificate.holds);
        assert!(matches!(
            check_ineq_eighth(&ex31(), &[0.0, 1.0]),
            Err(Error::Precondition(_))
        ));
        let c = check_ineq_eighth(&zero(2), &[1.0, 0.0]).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
    }

    #[test]
    fn n2over3_examples() {
        let c = check_ineq_n2over3(&ex31());
        assert!(abs(c.residual) < 1e-13);
        assert!(c.certificate.holds);
        let c = check_ineq_n2over3(&zero(4));
        assert_eq!(c.residual, 0.0);
        assert!(c.certificate.holds);
        let c = check_ineq_n2over3(&g3(1.0, 0.5));
        assert!(c.residual > 0.0 && !c.certificate.holds);
    }

    #[test]
    fn scalar_gap_examples() {
        let s = scalar_gap_bounds(&ex31());
        assert!(abs(s.gap + 4.0) < 1e-13 && abs(s.lower_13 + 4.0) < 1e-13);
        let s = scalar_gap_bounds(&zero(3));
        assert_eq!((s.gap, s.lower_13, s.lower_n2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn lpq_g3() {
        let l = lpq(&g3(1.0, 0.0));
        assert!(abs(l.normsq_l - 8.0) < 1e-13);
        assert!(abs(l.normsq_p - 16.0) < 1e-13);
        assert!(abs(l.sum() - 24.0) < 1e-13);
        assert!(abs(-l.pairing - l.sum()) < 1e-12);
        let z = lpq(&zero(3));
        assert_eq!((z.normsq_l, z.normsq_p, z.pairing), (0.0, 0.0, 0.0));
    }

    #[test]
    fn constant_curvature_examples() {
        let g = MetricPoint::from_rows(&[&[2.0, 0.2, 0.0], &[0.2, 1.0, 0.0], &[0.0, 0.0, 3.0]])
            .unwrap();
        let r0 = CurvTensor::r0(&g);
        assert!(constant_curvature_residual(&r0, &g, 1.0).unwrap() < 1e-14);
        let v = constant_curvature_residual(&r0, &g, 0.0).unwrap();
        assert!(abs(v - sqrt(12.0)) < 1e-13);
        let s = g3(1.0, 0.0);
        assert!(constant_curvature_residual(&bracket_kk(&s), s.metric(), -2.0).unwrap() < 1e-14);
    }

    #[test]
    fn lagrangian_examples() {
        let z = zero(3);
        let r = lagrangian_gauss_residual(&z, &CurvTensor::r0(z.metric()).scale(0.7), 0.7).unwrap();
        assert!(r.tensor < 1e-14 && abs(r.scalar) < 1e-13);
        let s = g3(1.0, 0.0);
        let r = lagrangian_gauss_residual(&s, &CurvTensor::zeros(2), 2.0).unwrap();
        assert!(r.tensor < 1e-14 && abs(r.scalar) < 1e-13);
        let r = lagrangian_gauss_residual(&ex31(), &CurvTensor::zeros(2), 0.3).unwrap();
        assert!(r.tensor > 0.0);
    }

    #[test]
    fn null_direction_is_null() {
        for seed in 0..20 {
            let sp = sample::random_stat_point(3, seed, true, false).unwrap();
            let u = null_direction(&sp, seed);
            assert!(abs(sp.metric().norm(&u) - 1.0) < 1e-12);
            assert!(abs(sp.cubic().eval(&u, &u, &u)) < 1e-12);
        }
    }
}
