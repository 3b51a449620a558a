use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{ChartStructure, StructureFields, TensorField};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::Mat;
use crate::tensor::{check_dim, cubic_len, for_each_index, CubicForm, Tensor};

/// Metric and cubic form given by expression trees in `x1..xn`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprFields {
    n: usize,
    g: Vec<Expr>,
    a: Vec<Expr>,
}

fn check_arity(n: usize, e: &Expr) -> Result<()> {
    if e.arity() > n {
        return Err(Error::Expr(format!(
            "expression `{e}` uses x{} in dimension {n}",
            e.arity()
        )));
    }
    Ok(())
}

impl ExprFields {
    /// `g` is the full `n×n` matrix (row-major) and must be symmetric as
    /// printed; `a` lists `A_{ijk}` over `i ≤ j ≤ k` lexicographically.
    pub fn new(n: usize, g: Vec<Expr>, a: Vec<Expr>) -> Result<Self> {
        check_dim(n)?;
        if g.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: g.len(),
            });
        }
        if a.len() != cubic_len(n) {
            return Err(Error::DimensionMismatch {
                expected: cubic_len(n),
                found: a.len(),
            });
        }
        for e in g.iter().chain(&a) {
            check_arity(n, e)?;
        }
        for i in 0..n {
            for j in i + 1..n {
                if g[i * n + j].to_string() != g[j * n + i].to_string() {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(ExprFields { n, g, a })
    }

    pub fn metric_exprs(&self) -> &[Expr] {
        &self.g
    }

    pub fn cubic_exprs(&self) -> &[Expr] {
        &self.a
    }
}

impl StructureFields for ExprFields {
    fn dim(&self) -> usize {
        self.n
    }

    fn metric(&self, x: &[f64]) -> Result<Mat> {
        Mat::from_row_major(self.n, self.g.iter().map(|e| e.eval(x)).collect())
    }

    fn cubic(&self, x: &[f64]) -> Result<CubicForm> {
        let mut it = self.a.iter();
        CubicForm::from_fn(self.n, |_, _, _| {
            it.next().map(|e| e.eval(x)).unwrap_or(0.0)
        })
    }
}

type MetricFn = dyn Fn(&[f64]) -> Mat + Send + Sync;
type CubicFn = dyn Fn(&[f64]) -> CubicForm + Send + Sync;

/// Fields given by closures.
pub struct FnFields {
    n: usize,
    g: Box<MetricFn>,
    a: Box<CubicFn>,
}

impl FnFields {
    pub fn new(
        n: usize,
        g: impl Fn(&[f64]) -> Mat + Send + Sync + 'static,
        a: impl Fn(&[f64]) -> CubicForm + Send + Sync + 'static,
    ) -> Self {
        FnFields {
            n,
            g: Box::new(g),
            a: Box::new(a),
        }
    }
}

impl StructureFields for FnFields {
    fn dim(&self) -> usize {
        self.n
    }

    fn metric(&self, x: &[f64]) -> Result<Mat> {
        Ok((self.g)(x))
    }

    fn cubic(&self, x: &[f64]) -> Result<CubicForm> {
        let a = (self.a)(x);
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.dim(),
            });
        }
        Ok(a)
    }
}

/// Covariant tensor field given componentwise by expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprTensorField {
    n: usize,
    degree: usize,
    comps: Vec<Expr>,
}

impl ExprTensorField {
    /// Components in row-major order, `n^degree` of them.
    pub fn new(n: usize, degree: usize, comps: Vec<Expr>) -> Result<Self> {
        check_dim(n)?;
        let len = n.pow(degree as u32);
        if comps.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: comps.len(),
            });
        }
        for e in &comps {
            check_arity(n, e)?;
        }
        Ok(ExprTensorField { n, degree, comps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl TensorField for ExprTensorField {
    fn eval(&self, x: &[f64]) -> Result<Tensor> {
        Tensor::from_data(
            self.n,
            self.degree,
            0,
            self.comps.iter().map(|e| e.eval(x)).collect(),
        )
    }
}

/// Fields of the Hessian structure of a potential: `g = Hess φ`,
/// `A_{ijk} = −½ ∂ᵢ∂ⱼ∂ₖφ`, derivatives taken symbolically.
pub fn hessian_fields(phi: &Expr, n: usize) -> Result<ExprFields> {
    check_dim(n)?;
    check_arity(n, phi)?;
    let d1: Vec<Expr> = (0..n).map(|i| phi.diff(i)).collect::<Result<_>>()?;
    let mut d2 = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            d2.push(d1[a].diff(b)?);
        }
    }
    let mut a = Vec::with_capacity(cubic_len(n));
    let mut err = None;
    for_each_index(n, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        if i <= j && j <= k && err.is_none() {
            match d2[i * n + j].diff(k) {
                Ok(e) => a.push(crate::expr::mul(Expr::c(-0.5), e)),
                Err(e) => err = Some(e),
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    ExprFields::new(n, d2, a)
}

/// Hessian structure of a convex potential on a box.
pub fn hessian_from_potential(
    phi: &Expr,
    n: usize,
    domain: Vec<(f64, f64)>,
    h: f64,
) -> Result<ChartStructure> {
    let fields = hessian_fields(phi, n)?;
    let periodic = alloc::vec![false; n];
    ChartStructure::new(Arc::new(fields), domain, periodic, h).map_err(|e| match e {
        Error::NotPositiveDefinite { minor } => Error::Precondition(format!(
            "potential `{phi}` is not convex on the domain (leading minor {minor})"
        )),
        other => other,
    })
}
