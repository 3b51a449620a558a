//! Tolerances shared by the library, the harness and the tests.
//!
//! Finite-difference identities are accepted when
//! `residual ≤ (C · h² + ALGEBRAIC) · (1 + magnitude) · scale`, where
//! `magnitude` is the size of the largest term of the identity and `C` is a
//! per-identity constant.

use crate::math::abs;

/// Absolute tolerance for purely algebraic identities.
pub const ALGEBRAIC: f64 = 1e-12;

/// Connection-level identities (duality, Eq. for the conjugate connection).
pub const C_CONNECTION: f64 = 50.0;
/// Curvature-level identities (second derivatives of `g`).
pub const C_CURVATURE: f64 = 500.0;
/// Ricci identity and Simons-type identities (nested second derivatives).
pub const C_SIMONS: f64 = 2000.0;
/// Conjugate-symmetry predicate on `∇̂A`.
pub const C_CONJUGATE: f64 = 200.0;

/// Floor of the conjugate-symmetry threshold.
pub const CONJUGATE_FLOOR: f64 = 1e-6;

/// Relative threshold on `‖τ‖` for a field to count as trace-free at a point.
pub const TRACE_FREE_FIELD: f64 = 1e-10;

/// `(C · h² + ALGEBRAIC) · (1 + magnitude) · scale`.
pub fn fd_tol(c: f64, h: f64, magnitude: f64, scale: f64) -> f64 {
    (c * h * h + ALGEBRAIC) * (1.0 + abs(magnitude)) * scale
}

/// Threshold on `‖asym ∇̂A‖ / (1 + ‖∇̂A‖)`.
pub fn conjugate_threshold(h: f64, scale: f64) -> f64 {
    CONJUGATE_FLOOR.max(C_CONJUGATE * h * h * scale)
}

/// Accepted band for the ratio `r(2h) / r(h)` of a second-order residual.
pub const CONVERGENCE_BAND: (f64, f64) = (3.2, 4.8);

pub fn in_convergence_band(ratio: f64) -> bool {
    ratio >= CONVERGENCE_BAND.0 && ratio <= CONVERGENCE_BAND.1
}
