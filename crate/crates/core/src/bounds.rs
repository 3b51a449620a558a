//! Bounds on `u = ‖A‖²` for trace-free structures with `R = H·R₀`.
//!
//! The interval formulas are closed-form; only [`simons_sandwich_check`] and
//! [`discrete_max_probe`] touch a chart. None of this certifies completeness
//! of `g`: callers label inputs with [`Hypothesis`].

use alloc::format;
use alloc::vec::Vec;

use crate::chart::{
    cubic_simons_terms, scalar_laplacian, statistical_connections, ChartStructure, Gap,
};
use crate::error::{Error, Result};
use crate::math::{abs, sqrt};
use crate::point::constant_curvature_residual;
use crate::tensor::CurvTensor;
use crate::tolerance::{fd_tol, C_CURVATURE, C_SIMONS, TRACE_FREE_FIELD};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// How a structure relates to the global hypotheses (completeness,
/// compactness) of the bound theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Constant fields or a periodic chart.
    ByConstruction,
    Unverified,
}

fn require_negative(h: f64) -> Result<()> {
    if h >= 0.0 {
        return Err(Error::Precondition(format!(
            "H = {h} ≥ 0 forces A = 0; the bound needs H < 0"
        )));
    }
    Ok(())
}

fn require_nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) {
        return Err(Error::Precondition(format!(
            "{name} = {v} must be non-negative"
        )));
    }
    Ok(())
}

/// `sup u ≤ n(n−1)(−H)`.
pub fn calabi_sup_bound(n: usize, h: f64) -> Result<f64> {
    require_negative(h)?;
    let n = n as f64;
    Ok(n * (n - 1.0) * -h)
}

/// Range of `u` when `∇̂A = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParallelBand {
    /// `H ≥ 0`: only `A = 0`.
    Trivial,
    Band(Interval),
}

pub fn parallel_a_band(n: usize, h: f64) -> ParallelBand {
    if h >= 0.0 {
        return ParallelBand::Trivial;
    }
    let n = n as f64;
    ParallelBand::Band(Interval {
        lo: 2.0 / 3.0 * (n + 1.0) * -h,
        hi: n * (n - 1.0) * -h,
    })
}

/// `inf u ≥ hi` or `inf u ≤ lo`, from `N₂ = sup ‖∇̂A‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfDichotomy {
    /// `N₂ < H²(n+1)²/6`.
    pub feasible: bool,
    pub branch_lo: f64,
    pub branch_hi: f64,
}

impl InfDichotomy {
    /// The OR asserted when feasible; vacuously true otherwise.
    pub fn admits(&self, inf_u: f64, tol: f64) -> bool {
        !self.feasible || inf_u >= self.branch_hi - tol || inf_u <= self.branch_lo + tol
    }
}

/// Branches `((n+1)(−H) ± √((n+1)²H² − 6N₂))/3`. At and beyond the
/// feasibility boundary the radical is taken as zero.
pub fn inf_u_dichotomy(n: usize, h: f64, n2: f64) -> Result<InfDichotomy> {
    require_negative(h)?;
    require_nonnegative("N2", n2)?;
    let m = n as f64 + 1.0;
    let feasible = n2 < h * h * m * m / 6.0;
    let r = if feasible {
        sqrt((m * m * h * h - 6.0 * n2).max(0.0))
    } else {
        0.0
    };
    Ok(InfDichotomy {
        feasible,
        branch_lo: (m * -h - r) / 3.0,
        branch_hi: (m * -h + r) / 3.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupBounds {
    /// `n(n²−1)H²/4`, the largest admissible `inf ‖∇̂A‖²`.
    pub nabla_bound: f64,
    /// `n(n−1)/(n+1) · inf ‖∇̂A‖²`.
    pub n4: f64,
    pub feasible: bool,
    /// `[(n(n−1)(−H) ∓ √(n²(n−1)²H² − 4N₄))/2]`; `None` when infeasible.
    pub sup_u: Option<Interval>,
}

pub fn sup_u_interval(n: usize, h: f64, inf_nabla_a_sq: f64) -> Result<SupBounds> {
    require_negative(h)?;
    require_nonnegative("inf ‖∇̂A‖²", inf_nabla_a_sq)?;
    let nf = n as f64;
    let nabla_bound = nf * (nf * nf - 1.0) * h * h / 4.0;
    let n4 = nf * (nf - 1.0) / (nf + 1.0) * inf_nabla_a_sq;
    let c = nf * (nf - 1.0) * -h;
    let disc = c * c - 4.0 * n4;
    let feasible = inf_nabla_a_sq <= nabla_bound;
    let sup_u = feasible.then(|| {
        let r = sqrt(disc.max(0.0));
        Interval {
            lo: (c - r) / 2.0,
            hi: (c + r) / 2.0,
        }
    });
    Ok(SupBounds {
        nabla_bound,
        n4,
        feasible,
        sup_u,
    })
}

/// Surface bounds from `H₂ ≤ H ≤ H₁ ≤ 0` and the range of `û = ‖∇̂A‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceBounds {
    /// `inf û ≤ 3/2·H₂²`.
    pub sup_feasible: bool,
    /// `−H₂ ∓ √(H₂² − ⅔ inf û)`.
    pub sup_u: Option<Interval>,
    /// `inf u ≥ hi` or `inf u ≤ lo`, present when `sup û ≤ 3/2·H₁²`.
    pub inf_u: Option<InfDichotomy>,
}

pub fn surface_bounds(h1: f64, h2: f64, inf_hat_u: f64, sup_hat_u: f64) -> Result<SurfaceBounds> {
    if !(h2 <= h1 && h1 <= 0.0) {
        return Err(Error::Precondition(format!(
            "need H2 ≤ H1 ≤ 0, got H1 = {h1}, H2 = {h2}"
        )));
    }
    require_nonnegative("inf û", inf_hat_u)?;
    if !(inf_hat_u <= sup_hat_u) {
        return Err(Error::Precondition(format!(
            "inf û = {inf_hat_u} exceeds sup û = {sup_hat_u}"
        )));
    }
    // radicands as multiples of threshold − û, exactly zero on the boundary
    let sup_threshold = 1.5 * h2 * h2;
    let sup_feasible = inf_hat_u <= sup_threshold;
    let sup_u = sup_feasible.then(|| {
        let r = sqrt((sup_threshold - inf_hat_u) / 1.5);
        Interval {
            lo: -h2 - r,
            hi: -h2 + r,
        }
    });
    let inf_threshold = 1.5 * h1 * h1;
    let inf_u = (sup_hat_u <= inf_threshold).then(|| {
        let r = sqrt((inf_threshold - sup_hat_u) / 1.5);
        InfDichotomy {
            feasible: true,
            branch_lo: -h1 - r,
            branch_hi: -h1 + r,
        }
    });
    Ok(SurfaceBounds {
        sup_feasible,
        sup_u,
        inf_u,
    })
}

/// Every bound available for given `n`, `H` and the range of `‖∇̂A‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub h: f64,
    /// `sup ‖∇̂A‖²`.
    pub n2: f64,
    pub inf_nabla_a_sq: f64,
    pub hypothesis: Hypothesis,
    pub calabi: Option<f64>,
    pub parallel: ParallelBand,
    pub inf_u: Option<InfDichotomy>,
    pub sup_u: Option<SupBounds>,
}

impl BoundReport {
    pub fn new(
        n: usize,
        h: f64,
        inf_nabla_a_sq: f64,
        sup_nabla_a_sq: f64,
        hypothesis: Hypothesis,
    ) -> Result<Self> {
        require_nonnegative("inf ‖∇̂A‖²", inf_nabla_a_sq)?;
        if !(inf_nabla_a_sq <= sup_nabla_a_sq) {
            return Err(Error::Precondition(format!(
                "inf ‖∇̂A‖² = {inf_nabla_a_sq} exceeds sup ‖∇̂A‖² = {sup_nabla_a_sq}"
            )));
        }
        let negative = h < 0.0;
        Ok(BoundReport {
            n,
            h,
            n2: sup_nabla_a_sq,
            inf_nabla_a_sq,
            hypothesis,
            calabi: negative.then(|| calabi_sup_bound(n, h)).transpose()?,
            parallel: parallel_a_band(n, h),
            inf_u: negative
                .then(|| inf_u_dichotomy(n, h, sup_nabla_a_sq))
                .transpose()?,
            sup_u: negative
                .then(|| sup_u_interval(n, h, inf_nabla_a_sq))
                .transpose()?,
        })
    }

    /// Checks the observed range `[inf u, sup u]` against every bound.
    pub fn consistent_with(&self, inf_u: f64, sup_u: f64, tol: f64) -> bool {
        if self.h >= 0.0 {
            return sup_u <= tol;
        }
        let calabi = self.calabi.map_or(true, |c| sup_u <= c + tol);
        let dichotomy = self.inf_u.map_or(true, |d| d.admits(inf_u, tol));
        let sup = self
            .sup_u
            .map_or(true, |s| s.sup_u.map_or(true, |i| i.contains(sup_u, tol)));
        calabi && dichotomy && sup
    }
}

/// Both sides of the Simons sandwich for a trace-free structure with
/// `R = H·R₀`, as gaps that are negative when violated.
#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    /// `½Δu − ((n+1)Hu + (n+1)/(n(n−1))·u² + ‖∇̂A‖²)`.
    pub lower: Gap,
    /// `(n+1)Hu + (3/2)u² + ‖∇̂A‖² − ½Δu`.
    pub upper: Gap,
}

impl Sandwich {
    /// Both gaps close to zero, as forced in dimension two.
    pub fn is_equality(&self, h: f64, scale: f64) -> bool {
        [&self.lower, &self.upper]
            .iter()
            .all(|g| abs(g.value) <= fd_tol(g.c, h, g.magnitude, scale))
    }
}

pub fn simons_sandwich_check(cs: &ChartStructure, x: &[f64], hh: f64) -> Result<Sandwich> {
    let sp = cs.stat_point(x)?;
    let tau = sqrt(sp.norm_e_sq().max(0.0));
    if tau > TRACE_FREE_FIELD * (1.0 + sqrt(sp.norm_a_sq())) {
        return Err(Error::Precondition(format!(
            "structure is not trace-free at the point (‖E‖ = {tau:.3e})"
        )));
    }
    let sc = statistical_connections(cs, x)?;
    let g = sp.metric();
    let r_norm = constant_curvature_residual(&sc.r, g, 0.0)?;
    let defect = constant_curvature_residual(&sc.r, g, hh)?;
    let r0_norm = constant_curvature_residual(&CurvTensor::r0(g), g, 0.0)? * abs(hh);
    if defect > fd_tol(C_CURVATURE, cs.h(), r_norm.max(r0_norm), 1.0) {
        return Err(Error::Precondition(format!(
            "R differs from H·R₀ with H = {hh} (‖R − H·R₀‖ = {defect:.3e})"
        )));
    }
    let t = cubic_simons_terms(cs, x)?;
    let n = cs.dim() as f64;
    let u = t.u;
    let common = (n + 1.0) * hh * u + t.nabla_a_sq;
    let lower = common + (n + 1.0) / (n * (n - 1.0)) * u * u;
    let upper = common + 1.5 * u * u;
    let magnitude = [t.half_lap_u, (n + 1.0) * hh * u, 1.5 * u * u, t.nabla_a_sq]
        .iter()
        .fold(0.0f64, |m, v| m.max(abs(*v)));
    Ok(Sandwich {
        lower: Gap {
            id: "simons-sandwich-lower",
            value: t.half_lap_u - lower,
            magnitude,
            c: C_SIMONS,
        },
        upper: Gap {
            id: "simons-sandwich-upper",
            value: upper - t.half_lap_u,
            magnitude,
            c: C_SIMONS,
        },
    })
}

/// Grid maximum of a scalar field on a torus chart and its Laplacian there.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxProbe {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub laplacian: f64,
    /// Size of the largest second-order term, for the tolerance.
    pub magnitude: f64,
}

impl MaxProbe {
    pub fn passes(&self, h: f64, scale: f64) -> bool {
        self.laplacian <= fd_tol(C_CURVATURE, h, self.magnitude, scale)
    }
}

/// Locates the maximum of `f` on an `mⁿ` lattice and evaluates `Δf` there.
pub fn discrete_max_probe(
    cs: &ChartStructure,
    f: &dyn Fn(&[f64]) -> Result<f64>,
    m: usize,
) -> Result<MaxProbe> {
    if !cs.periodic().iter().all(|&p| p) {
        return Err(Error::NotPeriodic);
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for x in cs.lattice(m.max(1)) {
        let v = f(&x)?;
        if best.as_ref().map_or(true, |(_, b)| v > *b) {
            best = Some((x, v));
        }
    }
    let (argmax, value) = best.ok_or(Error::Precondition("empty lattice".into()))?;
    let laplacian = scalar_laplacian(cs, f, &argmax)?;
    Ok(MaxProbe {
        magnitude: abs(laplacian).max(abs(value)),
        argmax,
        value,
        laplacian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::FnFields;
    use crate::linalg::Mat;
    use crate::tensor::CubicForm;
    use alloc::sync::Arc;
    use alloc::vec;
    use core::f64::consts::PI;

    /// Flat plane with constant trace-free `A = a·Re(dz³) + b·Im(dz³)`.
    pub(crate) fn g3(a: f64, b: f64, periodic: bool) -> ChartStructure {
        let fields = FnFields::new(
            2,
            |_x: &[f64]| Mat::identity(2),
            move |_x: &[f64]| {
                CubicForm::from_fn(2, |i, j, k| match i + j + k {
                    0 => a,
                    1 => -b,
                    2 => -a,
                    _ => b,
                })
                .expect("n = 2")
            },
        );
        let dom = if periodic {
            vec![(0.0, 2.0 * PI); 2]
        } else {
            vec![(-1.0, 1.0); 2]
        };
        ChartStructure::new(Arc::new(fields), dom, vec![periodic; 2], 1e-3).unwrap()
    }

    #[test]
    fn calabi_examples() {
        assert_eq!(calabi_sup_bound(2, -2.0).unwrap(), 4.0);
        assert_eq!(calabi_sup_bound(3, -1.0).unwrap(), 6.0);
        assert!(matches!(
            calabi_sup_bound(2, 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn parallel_band_examples() {
        assert_eq!(
            parallel_a_band(2, -2.0),
            ParallelBand::Band(Interval { lo: 4.0, hi: 4.0 })
        );
        match parallel_a_band(3, -1.0) {
            ParallelBand::Band(i) => {
                assert!((i.lo - 8.0 / 3.0).abs() < 1e-15);
                assert_eq!(i.hi, 6.0);
            }
            ParallelBand::Trivial => panic!("expected a band"),
        }
        assert_eq!(parallel_a_band(2, 1.0), ParallelBand::Trivial);
    }

    #[test]
    fn dichotomy_examples() {
        let d = inf_u_dichotomy(2, -1.0, 0.0).unwrap();
        assert!(d.feasible);
        assert_eq!((d.branch_lo, d.branch_hi), (0.0, 2.0));
        // Roots of −3/2·t² − (n+1)Ht − N₂ by the quadratic formula.
        let (n, h) = (3usize, -1.0);
        let n2 = 0.9 * h * h * 16.0 / 6.0;
        let d = inf_u_dichotomy(n, h, n2).unwrap();
        assert!(d.feasible);
        let (qa, qb, qc) = (-1.5, -(n as f64 + 1.0) * h, -n2);
        let disc = (qb * qb - 4.0 * qa * qc).sqrt();
        let roots = [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)];
        assert!((roots[0] - d.branch_lo).abs() < 1e-14);
        assert!((roots[1] - d.branch_hi).abs() < 1e-14);
        assert!(inf_u_dichotomy(2, 0.0, 0.0).is_err());
        assert!(inf_u_dichotomy(2, -1.0, -1.0).is_err());
    }

    #[test]
    fn sup_interval_examples() {
        let b = sup_u_interval(2, -1.0, 0.0).unwrap();
        assert_eq!(b.nabla_bound, 1.5);
        let b = sup_u_interval(3, -2.0, 0.0).unwrap();
        assert_eq!(b.nabla_bound, 24.0);
        assert_eq!(b.sup_u, Some(Interval { lo: 0.0, hi: 12.0 }));
        let b = sup_u_interval(3, -2.0, 25.0).unwrap();
        assert!(!b.feasible && b.sup_u.is_none());
    }

    #[test]
    fn surface_examples() {
        let s = 1.0f64;
        let b = surface_bounds(-2.0 * s, -2.0 * s, 0.0, 0.0).unwrap();
        assert_eq!(
            b.sup_u,
            Some(Interval {
                lo: 0.0,
                hi: 4.0 * s
            })
        );
        let d = b.inf_u.unwrap();
        assert_eq!((d.branch_lo, d.branch_hi), (0.0, 4.0 * s));
        assert!(d.admits(4.0 * s, 0.0));
        let b = surface_bounds(-1.0, -1.0, 1.5, 1.5).unwrap();
        assert_eq!(b.sup_u, Some(Interval { lo: 1.0, hi: 1.0 }));
        let b = surface_bounds(-1.0, -1.0, 2.0, 2.0).unwrap();
        assert!(!b.sup_feasible && b.sup_u.is_none() && b.inf_u.is_none());
        assert!(surface_bounds(-2.0, -1.0, 0.0, 0.0).is_err());
        assert!(surface_bounds(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(surface_bounds(-1.0, -1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn constant_curvature_family_meets_bounds() {
        for &(a, b) in &[(1.0, 0.0), (0.3, -0.7), (0.0, 0.5)] {
            let cs = g3(a, b, false);
            let s = a * a + b * b;
            let hh = -2.0 * s;
            let u = cs.stat_point(&[0.1, -0.2]).unwrap().norm_a_sq();
            assert!((u - 4.0 * s).abs() < 1e-12);
            assert!((calabi_sup_bound(2, hh).unwrap() - u).abs() < 1e-12);
            let report = BoundReport::new(2, hh, 0.0, 0.0, Hypothesis::ByConstruction).unwrap();
            assert!(report.consistent_with(u, u, 1e-12));
            let d = report.inf_u.unwrap();
            assert!((d.branch_hi - u).abs() < 1e-12);
            let sw = simons_sandwich_check(&cs, &[0.1, -0.2], hh).unwrap();
            assert!(sw.is_equality(cs.h(), 1.0), "{sw:?}");
        }
    }

    #[test]
    fn trivial_sandwich() {
        let cs = g3(0.0, 0.0, false);
        let sw = simons_sandwich_check(&cs, &[0.0, 0.0], 0.0).unwrap();
        assert!(sw.lower.value.abs() < 1e-12 && sw.upper.value.abs() < 1e-12);
    }

    #[test]
    fn sandwich_rejects_wrong_curvature() {
        let cs = g3(1.0, 0.0, false);
        let err = simons_sandwich_check(&cs, &[0.0, 0.0], -1.0).unwrap_err();
        assert!(
            matches!(err, Error::Precondition(ref m) if m.contains("H·R₀")),
            "{err}"
        );
    }

    #[test]
    fn max_probe_examples() {
        let cs = g3(0.0, 0.0, true);
        let p = discrete_max_probe(&cs, &|x: &[f64]| Ok(x[0].sin() + x[1].sin()), 16).unwrap();
        assert!((p.argmax[0] - PI / 2.0).abs() < 1e-12 && (p.argmax[1] - PI / 2.0).abs() < 1e-12);
        assert!((p.laplacian + 2.0).abs() < 1e-5);
        assert!(p.passes(cs.h(), 1.0));
        let c = discrete_max_probe(&cs, &|_x: &[f64]| Ok(3.0), 4).unwrap();
        assert!(c.laplacian.abs() < 1e-9);
        assert_eq!(
            discrete_max_probe(&g3(0.0, 0.0, false), &|_x: &[f64]| Ok(0.0), 4),
            Err(Error::NotPeriodic)
        );
    }

    #[test]
    fn dichotomy_boundary_coincides() {
        for n in 2..=6 {
            let h = -1.3;
            let m = n as f64 + 1.0;
            let d = inf_u_dichotomy(n, h, h * h * m * m / 6.0).unwrap();
            assert!(!d.feasible);
            assert_eq!(d.branch_lo, d.branch_hi);
            assert_eq!(d.branch_lo, m * -h / 3.0);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn dichotomy_branches_approach(n in 2usize..=6, h in -5.0f64..-0.01, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
                let m = n as f64 + 1.0;
                let cap = h * h * m * m / 6.0;
                let (s, l) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
                let a = inf_u_dichotomy(n, h, s * cap).unwrap();
                let b = inf_u_dichotomy(n, h, l * cap).unwrap();
                prop_assert!(a.branch_lo <= b.branch_lo + 1e-12);
                prop_assert!(a.branch_hi >= b.branch_hi - 1e-12);
                prop_assert!(a.branch_lo <= a.branch_hi);
            }

            #[test]
            fn sup_interval_midpoint(n in 2usize..=6, h in -5.0f64..-0.01, t in 0.0f64..1.2) {
                let nf = n as f64;
                let bound = nf * (nf * nf - 1.0) * h * h / 4.0;
                let b = sup_u_interval(n, h, t * bound).unwrap();
                let c = nf * (nf - 1.0) * h;
                let disc = c * c - 4.0 * b.n4;
                if (t - 1.0).abs() > 1e-9 {
                    prop_assert_eq!(b.feasible, t < 1.0);
                    prop_assert_eq!(disc >= 0.0, t < 1.0);
                }
                if let Some(i) = b.sup_u {
                    prop_assert!(i.lo <= i.hi);
                    let mid = nf * (nf - 1.0) * -h / 2.0;
                    prop_assert!(((i.lo + i.hi) / 2.0 - mid).abs() <= 1e-12 * (1.0 + mid));
                }
            }

            #[test]
            fn surface_and_sup_agree_in_dimension_two(h in -10.0f64..-1e-3) {
                let b = sup_u_interval(2, h, 0.0).unwrap();
                prop_assert!((b.nabla_bound - 1.5 * h * h).abs() <= 1e-12 * h * h);
            }

            #[test]
            fn calabi_dominates_parallel_band(n in 2usize..=8, h in -10.0f64..-1e-3) {
                match parallel_a_band(n, h) {
                    ParallelBand::Band(i) => prop_assert!(calabi_sup_bound(n, h).unwrap() >= i.hi),
                    ParallelBand::Trivial => prop_assert!(false),
                }
            }
        }
    }
}
