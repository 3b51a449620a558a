//! Tensor calculus of statistical structures.
//!
//! A statistical structure is a pair `(g, A)` of a Riemannian metric and a
//! totally symmetric cubic form; equivalently a Codazzi pair `(g, ∇)` with
//! `∇ = ∇̂ + K`, `A(X, Y, Z) = g(K(X, Y), Z)`. This crate provides
//!
//! - [`tensor`]: dense tensors, metric points, compressed cubic forms and the
//!   metric-aware algebra (raising, traces, inner products, frames);
//! - [`point`]: every derivative-free quantity of a structure at one point
//!   together with the algebraic inequalities and their equality certificates;
//! - [`chart`]: finite-difference calculus over coordinate charts (Christoffel
//!   symbols, curvature of `∇̂`, `∇`, `∇̄`, covariant derivatives, Laplacians)
//!   and residuals of the differential and Simons-type identities;
//! - [`bounds`]: the closed-form bound intervals for trace-free structures of
//!   constant curvature;
//! - [`sphere`]: unit-sphere quadrature, the fiber and codifferential
//!   identities and integrals over the unit sphere bundle of a torus chart.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
pub mod chart;
pub mod error;
pub mod expr;
pub mod linalg;
mod math;
pub mod point;
pub mod sample;
pub mod sphere;
pub mod tensor;
pub mod tolerance;

pub use error::{Error, Result};
pub use point::{EqualityCertificate, StatPoint};
pub use tensor::{CubicForm, CurvTensor, MetricPoint, Tensor};

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;
