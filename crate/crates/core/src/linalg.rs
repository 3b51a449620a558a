//! Small dense square matrices.
//!
//! Sizes here never exceed [`crate::MAX_DIM`], so everything is plain
//! row-major storage with textbook algorithms.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::math::{abs, sqrt};

/// Row-major `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Builds from row-major data of length `n²`.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Mat { n, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Mat { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut t = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `vᵀ M w`.
    pub fn bilinear(&self, v: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += v[i] * self[(i, j)] * w[j];
            }
        }
        s
    }

    pub fn add(&self, other: &Mat) -> Mat {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Mat { n: self.n, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Mat { n: self.n, data }
    }

    pub fn scale(&self, c: f64) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        crate::math::max_abs(&self.data)
    }

    /// First index pair violating exact symmetry, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self[(i, j)] != self[(j, i)] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Lower Cholesky factor `L` with `M = L Lᵀ`.
    ///
    /// The pivot of step `k` equals the ratio of consecutive leading principal
    /// minors, so the first non-positive pivot names the failing minor
    /// (1-based).
    pub fn cholesky(&self) -> Result<Mat> {
        let n = self.n;
        let mut l = Mat::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { minor: j + 1 });
            }
            let djj = sqrt(d);
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix.
    pub fn lower_triangular_inverse(&self) -> Mat {
        let n = self.n;
        let mut inv = Mat::zeros(n);
        for j in 0..n {
            inv[(j, j)] = 1.0 / self[(j, j)];
            for i in j + 1..n {
                let mut s = 0.0;
                for k in j..i {
                    s += self[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = -s / self[(i, i)];
            }
        }
        inv
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if abs(a[(r, col)]) > abs(a[(piv, col)]) {
                    piv = r;
                }
            }
            if a[(piv, col)] == 0.0 {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.data.swap(piv * n + c, col * n + c);
                    inv.data.swap(piv * n + c, col * n + c);
                }
            }
            let p = a[(col, col)];
            for c in 0..n {
                a[(col, c)] /= p;
                inv[(col, c)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == 0.0 {
                    continue;
                }
                for c in 0..n {
                    a[(r, c)] -= f * a[(col, c)];
                    inv[(r, c)] -= f * inv[(col, c)];
                }
            }
        }
        Some(inv)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if abs(a[(r, col)]) > abs(a[(piv, col)]) {
                    piv = r;
                }
            }
            if a[(piv, col)] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for c in 0..n {
                    a.data.swap(piv * n + c, col * n + c);
                }
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                for c in col..n {
                    a[(r, c)] -= f * a[(col, c)];
                }
            }
        }
        det
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues ascending and the matching orthonormal eigenvectors
    /// as columns. Ties are ordered by the lexicographic order of the
    /// (sign-normalized) eigenvectors.
    pub fn symmetric_eigen(&self) -> (Vec<f64>, Mat) {
        let n = self.n;
        let mut a = self.clone();
        let mut v = Mat::identity(n);
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off < 1e-30 * (1.0 + a.data.iter().map(|x| x * x).sum::<f64>()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + sqrt(1.0 + theta * theta))
                    } else {
                        -1.0 / (-theta + sqrt(1.0 + theta * theta))
                    };
                    let c = 1.0 / sqrt(1.0 + t * t);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
            .map(|j| {
                let mut col: Vec<f64> = (0..n).map(|i| v[(i, j)]).collect();
                // sign convention: first non-negligible entry positive
                if let Some(first) = col.iter().find(|x| abs(**x) > 1e-12) {
                    if *first < 0.0 {
                        col.iter_mut().for_each(|x| *x = -*x);
                    }
                }
                (a[(j, j)], col)
            })
            .collect();
        let scale = 1.0 + pairs.iter().map(|p| abs(p.0)).fold(0.0, f64::max);
        pairs.sort_by(|x, y| {
            if abs(x.0 - y.0) <= 1e-12 * scale {
                lex_cmp(&y.1, &x.1)
            } else {
                x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal)
            }
        });
        let values = pairs.iter().map(|p| p.0).collect();
        let mut vecs = Mat::zeros(n);
        for (j, (_, col)) in pairs.iter().enumerate() {
            for i in 0..n {
                vecs[(i, j)] = col[i];
            }
        }
        (values, vecs)
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if abs(x - y) > 1e-12 {
            return x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal);
        }
    }
    core::cmp::Ordering::Equal
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Completes a unit vector to an orthonormal basis (Gram–Schmidt against the
/// coordinate vectors). The first returned vector is `u` itself.
pub fn complete_orthonormal(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = vec![u.to_vec()];
    let mut candidates: Vec<usize> = (0..n).collect();
    // prefer coordinate axes least aligned with u
    candidates.sort_by(|a, b| {
        abs(u[*a])
            .partial_cmp(&abs(u[*b]))
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    for c in candidates {
        if basis.len() == n {
            break;
        }
        let mut w = vec![0.0; n];
        w[c] = 1.0;
        for _pass in 0..2 {
            for b in &basis {
                let d: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let nw = crate::math::norm2(&w);
        if nw > 1e-8 {
            w.iter_mut().for_each(|x| *x /= nw);
            basis.push(w);
        }
    }
    basis
}
