//! Finite-difference calculus of statistical structures on a coordinate
//! chart.
//!
//! All derivatives are central differences of order two with a fixed step
//! `h`. Derivative slots are prepended: `∇̂s` at `[i, a₁, …]` is
//! `(∇̂_{∂ᵢ} s)(∂_{a₁}, …)`. Nested operators reach `2h` from the evaluation
//! point, hence the boundary margin.

mod fields;
mod ops;
mod residuals;
mod simons;
#[cfg(test)]
mod tests;

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::point::StatPoint;
use crate::tensor::{check_dim, for_each_index, CubicForm, MetricPoint, Tensor};
use crate::tolerance::fd_tol;

pub use fields::{hessian_fields, hessian_from_potential, ExprFields, ExprTensorField, FnFields};
pub use ops::*;
pub use residuals::*;
pub use simons::*;

pub const DEFAULT_H: f64 = 1e-3;

/// Smooth metric and cubic-form fields in chart coordinates.
pub trait StructureFields: Send + Sync {
    fn dim(&self) -> usize;
    fn metric(&self, x: &[f64]) -> Result<Mat>;
    fn cubic(&self, x: &[f64]) -> Result<CubicForm>;
}

/// A tensor-valued map on the chart.
pub trait TensorField {
    fn eval(&self, x: &[f64]) -> Result<Tensor>;
}

impl<F: Fn(&[f64]) -> Result<Tensor>> TensorField for F {
    fn eval(&self, x: &[f64]) -> Result<Tensor> {
        self(x)
    }
}

/// Statistical structure on an axis-aligned box.
#[derive(Clone)]
pub struct ChartStructure {
    fields: Arc<dyn StructureFields>,
    domain: Vec<(f64, f64)>,
    periodic: Vec<bool>,
    h: f64,
}

impl core::fmt::Debug for ChartStructure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ChartStructure")
            .field("n", &self.dim())
            .field("domain", &self.domain)
            .field("periodic", &self.periodic)
            .field("h", &self.h)
            .finish()
    }
}

impl ChartStructure {
    /// Validates dimensions and spot-checks positive definiteness of `g` on
    /// a `5ⁿ` lattice (periodic axes sample a half-open period).
    pub fn new(
        fields: Arc<dyn StructureFields>,
        domain: Vec<(f64, f64)>,
        periodic: Vec<bool>,
        h: f64,
    ) -> Result<Self> {
        let n = fields.dim();
        check_dim(n)?;
        if domain.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: domain.len(),
            });
        }
        if periodic.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: periodic.len(),
            });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Precondition(format!(
                "step h must be positive, got {h}"
            )));
        }
        for (axis, &(lo, hi)) in domain.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::Precondition(format!(
                    "empty domain on axis {axis}: [{lo}, {hi}]"
                )));
            }
        }
        let cs = ChartStructure {
            fields,
            domain,
            periodic,
            h,
        };
        for x in cs.lattice(5) {
            let g = cs.fields.metric(&x)?;
            MetricPoint::symmetrized(&g)?;
        }
        Ok(cs)
    }

    pub fn with_h(&self, h: f64) -> Self {
        ChartStructure { h, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.fields.dim()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn fields(&self) -> &Arc<dyn StructureFields> {
        &self.fields
    }

    /// `m` points per axis: endpoints included on bounded axes, one period
    /// (right end excluded) on periodic axes.
    pub fn lattice(&self, m: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::new();
        for_each_index(m, n, |idx| {
            out.push(
                (0..n)
                    .map(|a| {
                        let (lo, hi) = self.domain[a];
                        let t = if self.periodic[a] {
                            idx[a] as f64 / m as f64
                        } else if m == 1 {
                            0.5
                        } else {
                            idx[a] as f64 / (m - 1) as f64
                        };
                        lo + t * (hi - lo)
                    })
                    .collect(),
            )
        });
        out
    }

    /// Errors unless every bounded axis keeps distance `2h` from the box.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let m = 2.0 * self.h;
        for (axis, (&c, &(lo, hi))) in x.iter().zip(&self.domain).enumerate() {
            if self.periodic[axis] {
                continue;
            }
            if !(c - lo >= m && hi - c >= m) {
                return Err(Error::BoundaryMargin { axis, coord: c });
            }
        }
        Ok(())
    }

    pub fn metric(&self, x: &[f64]) -> Result<MetricPoint> {
        MetricPoint::symmetrized(&self.fields.metric(x)?)
    }

    pub fn cubic(&self, x: &[f64]) -> Result<CubicForm> {
        self.fields.cubic(x)
    }

    pub fn stat_point(&self, x: &[f64]) -> Result<StatPoint> {
        StatPoint::new(self.metric(x)?, self.cubic(x)?)
    }
}

/// Named residual of an identity with the size of its largest term and the
/// constant of its `C·h²` tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub id: &'static str,
    pub value: f64,
    pub magnitude: f64,
    pub c: f64,
}

impl Residual {
    pub fn new(id: &'static str, value: f64, magnitude: f64, c: f64) -> Self {
        Residual {
            id,
            value,
            magnitude,
            c,
        }
    }

    pub fn tol(&self, h: f64, scale: f64) -> f64 {
        fd_tol(self.c, h, self.magnitude, scale)
    }

    pub fn passes(&self, h: f64, scale: f64) -> bool {
        self.value <= self.tol(h, scale)
    }
}

pub fn find<'a>(rs: &'a [Residual], id: &str) -> Option<&'a Residual> {
    rs.iter().find(|r| r.id == id)
}

/// Named signed gap of an inequality `lhs ≥ rhs` (violated when negative).
#[derive(Debug, Clone, PartialEq)]
pub struct Gap {
    pub id: &'static str,
    pub value: f64,
    pub magnitude: f64,
    pub c: f64,
}

impl Gap {
    pub fn passes(&self, h: f64, scale: f64) -> bool {
        self.value >= -fd_tol(self.c, h, self.magnitude, scale)
    }
}

pub(crate) fn offset(x: &[f64], axis: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[axis] += d;
    y
}

/// `g`-norm of a covariant tensor.
pub(crate) fn gnorm(g: &MetricPoint, t: &Tensor) -> Result<f64> {
    Ok(crate::math::sqrt(crate::tensor::norm_sq(g, t)?.max(0.0)))
}

pub(crate) fn stack(n: usize, parts: Vec<Tensor>) -> Result<Tensor> {
    let first = parts
        .first()
        .ok_or(Error::Precondition("empty stack".into()))?;
    let (lower, upper) = (first.lower(), first.upper());
    let mut data = Vec::with_capacity(parts.len() * first.data().len());
    for p in &parts {
        data.extend_from_slice(p.data());
    }
    Tensor::from_data(n, lower + 1, upper, data)
}
