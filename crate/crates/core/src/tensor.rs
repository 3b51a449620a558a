//! Dense tensors and metric-aware algebra.
//!
//! Component layout: a [`Tensor`] of type `(q, p)` (`q` upper, `p` lower)
//! stores its `p` covariant slots first, then its `q` contravariant slots, in
//! row-major order. So `K^k_{ij}` sits at index `[i, j, k]`. Slot numbers in
//! this module are 0-based.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::math::{abs, sqrt};
use crate::MAX_DIM;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

/// Calls `f` on every multi-index of length `deg` over `0..n`, last slot
/// fastest.
pub fn for_each_index(n: usize, deg: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; deg];
    if deg == 0 {
        f(&idx);
        return;
    }
    loop {
        f(&idx);
        let mut s = deg;
        loop {
            if s == 0 {
                return;
            }
            s -= 1;
            idx[s] += 1;
            if idx[s] < n {
                break;
            }
            idx[s] = 0;
        }
    }
}

/// Dense tensor with `lower` covariant and `upper` contravariant slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let len = n.pow((lower + upper) as u32);
        Tensor {
            n,
            lower,
            upper,
            data: vec![0.0; len],
        }
    }

    /// Covariant tensor of degree `p`.
    pub fn covariant(n: usize, p: usize) -> Self {
        Tensor::zeros(n, p, 0)
    }

    pub fn from_fn(
        n: usize,
        lower: usize,
        upper: usize,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Self {
        let mut t = Tensor::zeros(n, lower, upper);
        let mut pos = 0;
        for_each_index(n, lower + upper, |idx| {
            t.data[pos] = f(idx);
            pos += 1;
        });
        t
    }

    pub fn from_data(n: usize, lower: usize, upper: usize, data: Vec<f64>) -> Result<Self> {
        let len = n.pow((lower + upper) as u32);
        if data.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: data.len(),
            });
        }
        Ok(Tensor {
            n,
            lower,
            upper,
            data,
        })
    }

    pub fn scalar(v: f64) -> Self {
        Tensor {
            n: 1,
            lower: 0,
            upper: 0,
            data: vec![v],
        }
    }

    pub fn from_covector(v: &[f64]) -> Self {
        Tensor {
            n: v.len(),
            lower: 1,
            upper: 0,
            data: v.to_vec(),
        }
    }

    pub fn from_mat(m: &Mat) -> Self {
        Tensor {
            n: m.dim(),
            lower: 2,
            upper: 0,
            data: m.as_slice().to_vec(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of covariant (lower) slots.
    #[inline]
    pub fn lower(&self) -> usize {
        self.lower
    }

    /// Number of contravariant (upper) slots.
    #[inline]
    pub fn upper(&self) -> usize {
        self.upper
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.lower + self.upper
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.degree());
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    #[inline]
    pub fn add_at(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] += v;
    }

    fn same_shape(&self, other: &Tensor) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.lower != other.lower || self.upper != other.upper {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: other.degree(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(self.with_data(data))
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(self.with_data(data))
    }

    pub fn scale(&self, c: f64) -> Tensor {
        self.with_data(self.data.iter().map(|a| a * c).collect())
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &Tensor) -> Result<Tensor> {
        self.same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(self.with_data(data))
    }

    #[inline]
    fn with_data(&self, data: Vec<f64>) -> Tensor {
        Tensor {
            n: self.n,
            lower: self.lower,
            upper: self.upper,
            data,
        }
    }

    pub fn max_abs(&self) -> f64 {
        crate::math::max_abs(&self.data)
    }

    /// Euclidean norm of the component array.
    pub fn euclid_norm(&self) -> f64 {
        crate::math::norm2(&self.data)
    }

    /// Reorders slots: output index slot `s` feeds input slot `perm[s]`.
    /// Only covariant slots may be permuted.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        let d = self.degree();
        if perm.len() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                found: perm.len(),
            });
        }
        let mut src = vec![0usize; d];
        let mut out = Tensor::zeros(self.n, self.lower, self.upper);
        let mut pos = 0;
        for_each_index(self.n, d, |idx| {
            for s in 0..d {
                src[perm[s]] = idx[s];
            }
            out.data[pos] = self.get(&src);
            pos += 1;
        });
        Ok(out)
    }

    /// Difference `T − T∘(a b)` where `(a b)` swaps two slots.
    pub fn swap_defect(&self, a: usize, b: usize) -> Result<Tensor> {
        let d = self.degree();
        for s in [a, b] {
            if s >= d {
                return Err(Error::SlotOutOfRange { slot: s, degree: d });
            }
        }
        let mut perm: Vec<usize> = (0..d).collect();
        perm.swap(a, b);
        self.sub(&self.permute(&perm)?)
    }

    /// Contracts an upper slot with a lower slot (no metric).
    pub fn contract(&self, lower_slot: usize, upper_slot: usize) -> Result<Tensor> {
        let d = self.degree();
        if lower_slot >= self.lower {
            return Err(Error::SlotOutOfRange {
                slot: lower_slot,
                degree: d,
            });
        }
        if upper_slot < self.lower || upper_slot >= d {
            return Err(Error::SlotOutOfRange {
                slot: upper_slot,
                degree: d,
            });
        }
        let n = self.n;
        let mut out = Tensor::zeros(n, self.lower - 1, self.upper - 1);
        let mut full = vec![0usize; d];
        let mut pos = 0;
        for_each_index(n, d - 2, |idx| {
            let mut it = idx.iter();
            for (s, slot) in full.iter_mut().enumerate() {
                if s != lower_slot && s != upper_slot {
                    *slot = *it.next().unwrap();
                }
            }
            let mut acc = 0.0;
            for i in 0..n {
                full[lower_slot] = i;
                full[upper_slot] = i;
                acc += self.get(&full);
            }
            out.data[pos] = acc;
            pos += 1;
        });
        Ok(out)
    }

    /// Applies the linear map `m` to one slot: `T'(.., a, ..) = Σ_i m[(a, i)] T(.., i, ..)`.
    pub fn map_slot(&self, slot: usize, m: &Mat) -> Tensor {
        let n = self.n;
        let d = self.degree();
        let stride = n.pow((d - 1 - slot) as u32);
        let block = stride * n;
        let mut out = Tensor::zeros(n, self.lower, self.upper);
        for base in (0..self.data.len()).step_by(block) {
            for r in 0..stride {
                for a in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += m[(a, i)] * self.data[base + i * stride + r];
                    }
                    out.data[base + a * stride + r] = acc;
                }
            }
        }
        out
    }

    /// Evaluates a covariant tensor on vectors.
    pub fn eval(&self, vs: &[&[f64]]) -> f64 {
        debug_assert_eq!(vs.len(), self.degree());
        let mut acc = 0.0;
        let mut pos = 0;
        for_each_index(self.n, self.degree(), |idx| {
            let c = self.data[pos];
            pos += 1;
            if c != 0.0 {
                let mut w = c;
                for (s, &i) in idx.iter().enumerate() {
                    w *= vs[s][i];
                }
                acc += w;
            }
        });
        acc
    }

    /// Tensor product (covariant factors only).
    pub fn outer(&self, other: &Tensor) -> Result<Tensor> {
        if self.upper != 0 || other.upper != 0 {
            return Err(Error::DegreeMismatch {
                expected: 0,
                found: self.upper.max(other.upper),
            });
        }
        if self.n != other.n && self.degree() > 0 && other.degree() > 0 {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = if self.degree() > 0 { self.n } else { other.n };
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Ok(Tensor {
            n,
            lower: self.lower + other.lower,
            upper: 0,
            data,
        })
    }
}

/// Symmetric positive-definite bilinear form at a point.
#[derive(Debug, Clone)]
pub struct MetricPoint {
    g: Mat,
    inv: Mat,
}

impl PartialEq for MetricPoint {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g
    }
}

impl MetricPoint {
    /// Validates exact symmetry and positive definiteness.
    pub fn new(g: Mat) -> Result<Self> {
        check_dim(g.dim())?;
        if let Some((i, j)) = g.asymmetry() {
            return Err(Error::NotSymmetric { i, j });
        }
        let l = g.cholesky()?;
        let li = l.lower_triangular_inverse();
        let inv = li.transpose().mul(&li);
        Ok(MetricPoint { g, inv })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        MetricPoint::new(Mat::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        MetricPoint::new(Mat::identity(n))
    }

    pub fn diag(d: &[f64]) -> Result<Self> {
        MetricPoint::new(Mat::diag(d))
    }

    /// Builds from a matrix that is symmetric up to rounding by averaging it
    /// with its transpose first.
    pub fn symmetrized(m: &Mat) -> Result<Self> {
        MetricPoint::new(m.add(&m.transpose()).scale(0.5))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    #[inline]
    pub fn components(&self) -> &Mat {
        &self.g
    }

    #[inline]
    pub fn inverse(&self) -> &Mat {
        &self.inv
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.g[(i, j)]
    }

    pub fn det(&self) -> f64 {
        self.g.det()
    }

    pub fn as_tensor(&self) -> Tensor {
        Tensor::from_mat(&self.g)
    }

    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        self.g.bilinear(u, v)
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        sqrt(self.dot(u, u).max(0.0))
    }

    /// Lowers a vector to a covector.
    pub fn flat(&self, v: &[f64]) -> Vec<f64> {
        self.g.matvec(v)
    }

    /// Raises a covector to a vector.
    pub fn sharp(&self, w: &[f64]) -> Vec<f64> {
        self.inv.matvec(w)
    }

    /// Raises every slot of a covariant tensor with `g⁻¹` (result indexed the
    /// same way, with all-upper meaning).
    pub fn raise_all(&self, t: &Tensor) -> Tensor {
        let mut out = t.clone();
        for s in 0..t.degree() {
            out = out.map_slot(s, &self.inv);
        }
        out
    }
}

/// Inverse-Cholesky orthonormal frame: lower-triangular `B` with
/// `Bᵀ g B = I`. Column `a` of `B` is the `a`-th frame vector.
pub fn orthonormal_frame(g: &MetricPoint) -> Mat {
    let n = g.dim();
    // Reverse index order J, factor J g J = L Lᵀ, then B = J L⁻ᵀ J.
    let mut rev = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            rev[(i, j)] = g.get(n - 1 - i, n - 1 - j);
        }
    }
    let l = rev
        .cholesky()
        .expect("metric validated as positive definite");
    let lit = l.lower_triangular_inverse().transpose();
    let mut b = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] = lit[(n - 1 - i, n - 1 - j)];
        }
    }
    b
}

/// Components of a covariant tensor in the frame `B`:
/// `T'(a, b, ..) = T(B e_a, B e_b, ..)`.
pub fn to_frame(t: &Tensor, b: &Mat) -> Tensor {
    let bt = b.transpose();
    let mut out = t.clone();
    for s in 0..t.lower() {
        out = out.map_slot(s, &bt);
    }
    out
}

fn check_pair(g: &MetricPoint, t: &Tensor) -> Result<()> {
    if g.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: t.dim(),
        });
    }
    if t.upper() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: t.upper(),
        });
    }
    Ok(())
}

/// Full contraction `g(T, S)` of two covariant tensors of the same degree.
pub fn inner(g: &MetricPoint, t: &Tensor, s: &Tensor) -> Result<f64> {
    check_pair(g, t)?;
    check_pair(g, s)?;
    if t.degree() != s.degree() {
        return Err(Error::DegreeMismatch {
            expected: t.degree(),
            found: s.degree(),
        });
    }
    let sr = g.raise_all(s);
    Ok(t.data().iter().zip(sr.data()).map(|(a, b)| a * b).sum())
}

/// `‖T‖²` with respect to `g`.
pub fn norm_sq(g: &MetricPoint, t: &Tensor) -> Result<f64> {
    inner(g, t, t)
}

/// Contraction of covariant slots `a`, `b` against `g⁻¹`.
pub fn trace_g(g: &MetricPoint, t: &Tensor, a: usize, b: usize) -> Result<Tensor> {
    check_pair(g, t)?;
    let p = t.degree();
    if p < 2 {
        return Err(Error::UnsupportedDegree(p));
    }
    for s in [a, b] {
        if s >= p {
            return Err(Error::SlotOutOfRange { slot: s, degree: p });
        }
    }
    if a == b {
        return Err(Error::Precondition(alloc::format!(
            "trace slots must differ (both {a})"
        )));
    }
    let n = t.dim();
    let inv = g.inverse();
    let mut out = Tensor::covariant(n, p - 2);
    let mut full = vec![0usize; p];
    let mut pos = 0;
    for_each_index(n, p - 2, |idx| {
        let mut it = idx.iter();
        for (s, slot) in full.iter_mut().enumerate() {
            if s != a && s != b {
                *slot = *it.next().unwrap();
            }
        }
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let w = inv[(i, j)];
                if w == 0.0 {
                    continue;
                }
                full[a] = i;
                full[b] = j;
                acc += w * t.get(&full);
            }
        }
        out.data_mut()[pos] = acc;
        pos += 1;
    });
    Ok(out)
}

/// Number of multi-indices `i ≤ j ≤ k` over `0..n`.
pub const fn cubic_len(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

#[inline]
fn sort3(i: usize, j: usize, k: usize) -> (usize, usize, usize) {
    let (mut a, mut b, mut c) = (i, j, k);
    if a > b {
        core::mem::swap(&mut a, &mut b);
    }
    if b > c {
        core::mem::swap(&mut b, &mut c);
    }
    if a > b {
        core::mem::swap(&mut a, &mut b);
    }
    (a, b, c)
}

/// Totally symmetric covariant 3-tensor stored over `i ≤ j ≤ k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicForm {
    n: usize,
    data: Vec<f64>,
}

impl CubicForm {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(CubicForm {
            n,
            data: vec![0.0; cubic_len(n)],
        })
    }

    /// Fills from `f(i, j, k)` evaluated on sorted triples only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut c = CubicForm::zeros(n)?;
        let mut pos = 0;
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    c.data[pos] = f(i, j, k);
                    pos += 1;
                }
            }
        }
        Ok(c)
    }

    /// Ingests a dense `(0,3)` tensor, rejecting asymmetric input. Entries
    /// related by a permutation must agree to `1e-12` relative to the largest
    /// entry.
    pub fn from_dense(t: &Tensor) -> Result<Self> {
        check_dim(t.dim())?;
        if t.lower() != 3 || t.upper() != 0 {
            return Err(Error::DegreeMismatch {
                expected: 3,
                found: t.degree(),
            });
        }
        let n = t.dim();
        let tol = 1e-12 * (1.0 + t.max_abs());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (a, b, c) = sort3(i, j, k);
                    if abs(t.get(&[i, j, k]) - t.get(&[a, b, c])) > tol {
                        return Err(Error::NotTotallySymmetric { i, j, k });
                    }
                }
            }
        }
        CubicForm::from_fn(n, |i, j, k| t.get(&[i, j, k]))
    }

    /// Total symmetrization of an arbitrary dense `(0,3)` tensor.
    pub fn symmetrize(t: &Tensor) -> Result<Self> {
        let n = t.dim();
        CubicForm::from_fn(n, |i, j, k| {
            (t.get(&[i, j, k])
                + t.get(&[i, k, j])
                + t.get(&[j, i, k])
                + t.get(&[j, k, i])
                + t.get(&[k, i, j])
                + t.get(&[k, j, i]))
                / 6.0
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Compressed components in the order `i ≤ j ≤ k`, lexicographic.
    #[inline]
    pub fn compressed(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn pos(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.n;
        let (a, b, c) = sort3(i, j, k);
        // triples with first index < a
        let mut p = 0;
        for x in 0..a {
            let m = n - x;
            p += m * (m + 1) / 2;
        }
        // with first = a and second < b
        for y in a..b {
            p += n - y;
        }
        p + (c - b)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.pos(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let p = self.pos(i, j, k);
        self.data[p] = v;
    }

    /// Sorted triples with their values.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        let n = self.n;
        let mut triples = Vec::with_capacity(self.data.len());
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    triples.push((i, j, k));
                }
            }
        }
        triples.into_iter().zip(self.data.iter().copied())
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_fn(self.n, 3, 0, |idx| self.get(idx[0], idx[1], idx[2]))
    }

    pub fn eval(&self, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..n {
                    acc += uv * w[k] * self.get(i, j, k);
                }
            }
        }
        acc
    }

    pub fn scale(&self, c: f64) -> CubicForm {
        CubicForm {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &CubicForm) -> Result<CubicForm> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CubicForm { n: self.n, data })
    }

    pub fn sub(&self, other: &CubicForm) -> Result<CubicForm> {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        crate::math::max_abs(&self.data)
    }

    /// Components in the frame `B`.
    pub fn to_frame(&self, b: &Mat) -> CubicForm {
        let t = to_frame(&self.to_tensor(), b);
        CubicForm::from_fn(self.n, |i, j, k| t.get(&[i, j, k]))
            .expect("dimension already validated")
    }

    /// Removes the trace part: `A − (3/(n+2)) Sym(τ ⊗ g)` so that the result
    /// has zero `g`-trace.
    pub fn trace_free_part(&self, g: &MetricPoint) -> Result<CubicForm> {
        let n = self.n;
        let tau = trace_g(g, &self.to_tensor(), 1, 2)?;
        let t = tau.data();
        let c = 1.0 / (n as f64 + 2.0);
        CubicForm::from_fn(n, |i, j, k| {
            self.get(i, j, k) - c * (t[i] * g.get(j, k) + t[j] * g.get(i, k) + t[k] * g.get(i, j))
        })
    }
}

/// `K^k_{ij} = g^{kl} A_{ijl}` as a `(1,2)` tensor indexed `[i, j, k]`.
pub fn raise_last(g: &MetricPoint, a: &CubicForm) -> Result<Tensor> {
    if g.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: a.dim(),
        });
    }
    let n = g.dim();
    let inv = g.inverse();
    Ok(Tensor::from_fn(n, 2, 1, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        (0..n).map(|l| inv[(k, l)] * a.get(i, j, l)).sum()
    }))
}

/// Lowers the upper slot of a `(1,2)` tensor: `T_{ijl} = g_{lk} K^k_{ij}`.
pub fn lower_last(g: &MetricPoint, k: &Tensor) -> Result<Tensor> {
    if k.lower() != 2 || k.upper() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            found: k.degree(),
        });
    }
    let n = g.dim();
    let gm = g.components();
    let lowered = k.map_slot(2, gm);
    Tensor::from_data(n, 3, 0, lowered.data)
}

/// Lowered curvature-type tensor `R_{ijkl} = g(R(e_i, e_j) e_k, e_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvTensor {
    t: Tensor,
}

impl CurvTensor {
    pub fn new(t: Tensor) -> Result<Self> {
        if t.lower() != 4 || t.upper() != 0 {
            return Err(Error::DegreeMismatch {
                expected: 4,
                found: t.degree(),
            });
        }
        Ok(CurvTensor { t })
    }

    pub fn zeros(n: usize) -> Self {
        CurvTensor {
            t: Tensor::covariant(n, 4),
        }
    }

    /// `R₀(X,Y)Z = g(Y,Z)X − g(X,Z)Y`, lowered: `g_{jk} g_{il} − g_{ik} g_{jl}`.
    pub fn r0(g: &MetricPoint) -> Self {
        let n = g.dim();
        CurvTensor {
            t: Tensor::from_fn(n, 4, 0, |x| {
                let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
                g.get(j, k) * g.get(i, l) - g.get(i, k) * g.get(j, l)
            }),
        }
    }

    /// Lowers `R^l_{ijk}` stored as a `(1,3)` tensor indexed `[i, j, k, l]`.
    pub fn from_mixed(g: &MetricPoint, r: &Tensor) -> Result<Self> {
        if r.lower() != 3 || r.upper() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 4,
                found: r.degree(),
            });
        }
        let lowered = r.map_slot(3, g.components());
        Ok(CurvTensor {
            t: Tensor::from_data(r.dim(), 4, 0, lowered.data().to_vec())?,
        })
    }

    #[inline]
    pub fn tensor(&self) -> &Tensor {
        &self.t
    }

    pub fn into_tensor(self) -> Tensor {
        self.t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.t.get(&[i, j, k, l])
    }

    pub fn add(&self, other: &CurvTensor) -> Result<CurvTensor> {
        Ok(CurvTensor {
            t: self.t.add(&other.t)?,
        })
    }

    pub fn sub(&self, other: &CurvTensor) -> Result<CurvTensor> {
        Ok(CurvTensor {
            t: self.t.sub(&other.t)?,
        })
    }

    pub fn scale(&self, c: f64) -> CurvTensor {
        CurvTensor { t: self.t.scale(c) }
    }

    /// Largest `|R_{ijkl} + R_{jikl}|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        self.t
            .add(&self.t.permute(&[1, 0, 2, 3]).unwrap())
            .unwrap()
            .max_abs()
    }

    /// Largest `|R_{ijkl} + R_{ijlk}|`.
    pub fn skew_kl_defect(&self) -> f64 {
        self.t
            .add(&self.t.permute(&[0, 1, 3, 2]).unwrap())
            .unwrap()
            .max_abs()
    }

    /// Largest `|R_{ijkl} − R_{klij}|`.
    pub fn pair_symmetry_defect(&self) -> f64 {
        self.t
            .sub(&self.t.permute(&[2, 3, 0, 1]).unwrap())
            .unwrap()
            .max_abs()
    }

    /// Largest `|R_{ijkl} + R_{jkil} + R_{kijl}|`.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for_each_index(n, 4, |x| {
            let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
            let s = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
            m = m.max(abs(s));
        });
        m
    }

    /// Ricci tensor `Ric(Y,Z) = tr{X ↦ R(X,Y)Z}` = `g^{il} R_{ijkl}`.
    pub fn ricci(&self, g: &MetricPoint) -> Tensor {
        let n = self.dim();
        let inv = g.inverse();
        Tensor::from_fn(n, 2, 0, |x| {
            let (j, k) = (x[0], x[1]);
            let mut acc = 0.0;
            for i in 0..n {
                for l in 0..n {
                    acc += inv[(i, l)] * self.get(i, j, k, l);
                }
            }
            acc
        })
    }

    /// Sectional value `R(X, Y, Y, X) / (|X|²|Y|² − g(X,Y)²)`.
    pub fn sectional(&self, g: &MetricPoint, x: &[f64], y: &[f64]) -> Result<f64> {
        let den = g.dot(x, x) * g.dot(y, y) - g.dot(x, y) * g.dot(x, y);
        let scale = g.dot(x, x) * g.dot(y, y);
        if !(den > 1e-14 * scale) {
            return Err(Error::DependentVectors);
        }
        Ok(self.t.eval(&[x, y, y, x]) / den)
    }
}
