//! Seeded generator families.
//!
//! | family | output | construction |
//! |---|---|---|
//! | `G1-constant-A` | point (or constant chart) | random metric and cubic form |
//! | `G2-hessian-potential` | chart on `[-w, w]ⁿ` | `g = Hess φ`, `A = −½ D³φ` |
//! | `G3-2d-constant-curvature` | point (or flat torus) | `A₁₁₁ = −A₁₂₂ = a`, `A₂₂₂ = −A₁₁₂ = b` |
//! | `G4-random-smooth` | chart on `[-1, 1]ⁿ` | graph metric `I + ∇f∇fᵀ`, trig cubic form |
//! | `G5-periodic-trig` | chart on the torus | `e^f` on the first two axes, constant trace-free `A` there |
//!
//! The same spec always yields the same document, bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use codazzi_core::chart::{hessian_fields, statistical_connections, DEFAULT_H};
use codazzi_core::expr::Expr;
use codazzi_core::linalg::Mat;
use codazzi_core::point::{bracket_kk, constant_curvature_residual};
use codazzi_core::sample::{random_stat_point, rng, SeededRng};
use codazzi_core::tolerance::{fd_tol, C_CURVATURE};
use codazzi_core::{CubicForm, StatPoint, MAX_DIM};
use rand::Rng;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::structure::{ChartDoc, FieldDoc, PointDoc, Structure};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    ConstantA,
    HessianPotential,
    ConstantCurvature2d,
    RandomSmooth,
    PeriodicTrig,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::ConstantA,
        Family::HessianPotential,
        Family::ConstantCurvature2d,
        Family::RandomSmooth,
        Family::PeriodicTrig,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ConstantA => "G1-constant-A",
            Family::HessianPotential => "G2-hessian-potential",
            Family::ConstantCurvature2d => "G3-2d-constant-curvature",
            Family::RandomSmooth => "G4-random-smooth",
            Family::PeriodicTrig => "G5-periodic-trig",
        }
    }

    pub fn short(self) -> &'static str {
        &self.name()[..2]
    }

    fn params(self) -> &'static [&'static str] {
        match self {
            Family::ConstantA => &["scale", "trace_free", "identity_metric", "chart", "h"],
            Family::HessianPotential => &["potential", "half_width", "h"],
            Family::ConstantCurvature2d => &["a", "b", "chart", "h"],
            Family::RandomSmooth => &["h"],
            Family::PeriodicTrig => &["h"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts the full name or its `G<k>` prefix.
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s) || f.short().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::Usage(format!("unknown family `{s}` (expected one of {names:?})"))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub params: Map<String, Value>,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        GeneratorSpec {
            family,
            n,
            seed,
            params: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    fn check(&self) -> Result<()> {
        if !(2..=MAX_DIM).contains(&self.n) {
            return Err(Error::Usage(format!(
                "{}: n must be in 2..={MAX_DIM}, got {}",
                self.family, self.n
            )));
        }
        for key in self.params.keys() {
            if !self.family.params().contains(&key.as_str()) {
                return Err(Error::Usage(format!(
                    "{}: unknown parameter `{key}` (expected one of {:?})",
                    self.family,
                    self.family.params()
                )));
            }
        }
        Ok(())
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.params
            .get(key)
            .map(|v| {
                v.as_f64().ok_or_else(|| {
                    Error::Usage(format!(
                        "{}: parameter `{key}` must be a number",
                        self.family
                    ))
                })
            })
            .transpose()
    }

    fn flag(&self, key: &str) -> Result<bool> {
        match self.params.get(key) {
            None => Ok(false),
            Some(v) => v.as_bool().ok_or_else(|| {
                Error::Usage(format!(
                    "{}: parameter `{key}` must be a boolean",
                    self.family
                ))
            }),
        }
    }

    fn h(&self) -> Result<f64> {
        Ok(self.f64("h")?.unwrap_or(DEFAULT_H))
    }
}

/// Expression text of a constant.
fn num(v: f64) -> String {
    if v < 0.0 {
        format!("(-{})", -v)
    } else {
        format!("{v}")
    }
}

fn var(i: usize) -> String {
    format!("x{}", i + 1)
}

/// `Σ kᵢxᵢ + φ` with integer wave numbers.
fn linear(k: &[i32], phase: f64) -> String {
    let mut out = String::new();
    for (i, &ki) in k.iter().enumerate() {
        if ki != 0 {
            out.push_str(&format!("{} * {} + ", num(ki as f64), var(i)));
        }
    }
    out.push_str(&num(phase));
    out
}

fn wave_numbers(r: &mut SeededRng, n: usize, max: i32) -> Vec<i32> {
    loop {
        let k: Vec<i32> = (0..n).map(|_| r.random_range(-max..=max)).collect();
        if k.iter().any(|&v| v != 0) {
            return k;
        }
    }
}

/// Random trig term `c·sin(k·x + φ) + d` with integer `k`, periodic on the
/// `2π` torus.
fn trig_term(r: &mut SeededRng, n: usize, amp: f64, offset: f64) -> String {
    let k = wave_numbers(r, n, 2);
    let c = r.random_range(0.5 * amp..=amp);
    let phase = r.random_range(0.0..TWO_PI);
    let d = r.random_range(-offset..=offset);
    format!("{} * sin({}) + {}", num(c), linear(&k, phase), num(d))
}

fn random_field(r: &mut SeededRng, n: usize, degree: usize) -> FieldDoc {
    let components = (0..n.pow(degree as u32))
        .map(|_| trig_term(r, n, 0.5, 0.3))
        .collect();
    FieldDoc { degree, components }
}

fn const_table(a: &CubicForm) -> BTreeMap<(usize, usize, usize), String> {
    a.entries()
        .filter(|(_, v)| *v != 0.0)
        .map(|(t, v)| (t, num(v)))
        .collect()
}

/// Flat-torus chart with constant `g` and `A` taken from a point.
pub fn constant_chart(p: &PointDoc, h: f64) -> ChartDoc {
    let n = p.n;
    ChartDoc {
        n,
        domain: vec![(0.0, TWO_PI); n],
        periodic: vec![true; n],
        h,
        g: p.g
            .iter()
            .map(|row| row.iter().map(|&v| num(v)).collect())
            .collect(),
        a: p.a
            .iter()
            .filter(|(_, v)| **v != 0.0)
            .map(|(&t, &v)| (t, num(v)))
            .collect(),
        fields: BTreeMap::new(),
    }
}

/// The chart of a structure; points become constant torus charts.
pub fn as_chart(s: &Structure) -> ChartDoc {
    match s {
        Structure::Point(p) => constant_chart(p, DEFAULT_H),
        Structure::Chart(c) => c.clone(),
    }
}

pub fn g3_cubic(a: f64, b: f64) -> CubicForm {
    let mut c = CubicForm::zeros(2).expect("n = 2");
    c.set(0, 0, 0, a);
    c.set(0, 1, 1, -a);
    c.set(1, 1, 1, b);
    c.set(0, 0, 1, -b);
    c
}

fn g1(spec: &GeneratorSpec) -> Result<Structure> {
    let mut sp = random_stat_point(
        spec.n,
        spec.seed,
        !spec.flag("identity_metric")?,
        spec.flag("trace_free")?,
    )?;
    if let Some(scale) = spec.f64("scale")? {
        sp = StatPoint::new(sp.metric().clone(), sp.cubic().scale(scale))?;
    }
    let p = PointDoc::from_stat_point(&sp);
    Ok(if spec.flag("chart")? {
        Structure::Chart(constant_chart(&p, spec.h()?))
    } else {
        Structure::Point(p)
    })
}

fn random_potential(n: usize, seed: u64) -> String {
    let mut r = rng(seed);
    let mut terms = vec![format!(
        "({}) / 2",
        (0..n)
            .map(|i| format!("{}^2", var(i)))
            .collect::<Vec<_>>()
            .join(" + ")
    )];
    for i in 0..n {
        for j in i + 1..n {
            let c = r.random_range(0.0..=1.0 / (n - 1) as f64);
            terms.push(format!("{} * {}^2 * {}^2 / 2", num(c), var(i), var(j)));
        }
    }
    for i in 0..n {
        let d = r.random_range(0.0..=0.5);
        let e = r.random_range(-0.5..=0.5);
        terms.push(format!(
            "{} * exp(({} - {}) / 2) / 4",
            num(d),
            var(i),
            var((i + 1) % n)
        ));
        terms.push(format!("{} * {}^3 / 6", num(e), var(i)));
    }
    terms.join(" + ")
}

fn g2(spec: &GeneratorSpec) -> Result<Structure> {
    let n = spec.n;
    let src = match spec.params.get("potential") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            return Err(Error::Usage(format!(
                "{}: parameter `potential` must be a string",
                spec.family
            )))
        }
        None => random_potential(n, spec.seed),
    };
    let phi = Expr::parse(&src)?;
    let w = spec.f64("half_width")?.unwrap_or(0.5);
    let fields = hessian_fields(&phi, n)?;
    let g = fields
        .metric_exprs()
        .chunks(n)
        .map(|row| row.iter().map(Expr::to_string).collect())
        .collect();
    let mut a = BTreeMap::new();
    let mut it = fields.cubic_exprs().iter();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                a.insert(
                    (i, j, k),
                    it.next()
                        .expect("one expression per sorted triple")
                        .to_string(),
                );
            }
        }
    }
    let doc = ChartDoc {
        n,
        domain: vec![(-w, w); n],
        periodic: vec![false; n],
        h: spec.h()?,
        g,
        a,
        fields: BTreeMap::new(),
    };
    let cs = doc.build().map_err(|e| match e {
        Error::Core(codazzi_core::Error::NotPositiveDefinite { minor }) => {
            Error::Core(codazzi_core::Error::Infeasible(format!(
                "potential `{src}` is not convex on [-{w}, {w}]^{n} (leading minor {minor})"
            )))
        }
        other => other,
    })?;
    let centre = vec![0.0; n];
    let sc = statistical_connections(&cs, &centre)?;
    let r = sc.r.tensor().max_abs();
    let tol = fd_tol(C_CURVATURE, cs.h(), sc.r_hat.tensor().max_abs(), 1.0);
    if !(r < tol) {
        return Err(Error::Core(codazzi_core::Error::Infeasible(format!(
            "Hessian chart is not flat (|R| = {r:.3e})"
        ))));
    }
    Ok(Structure::Chart(doc))
}

fn g3(spec: &GeneratorSpec) -> Result<Structure> {
    if spec.n != 2 {
        return Err(Error::Core(codazzi_core::Error::Infeasible(format!(
            "{} needs n = 2, got {}",
            spec.family, spec.n
        ))));
    }
    let mut r = rng(spec.seed);
    let a = spec.f64("a")?.unwrap_or_else(|| r.random_range(-1.0..=1.0));
    let b = spec.f64("b")?.unwrap_or_else(|| r.random_range(-1.0..=1.0));
    let sp = StatPoint::euclidean(g3_cubic(a, b))?;
    let hh = -2.0 * (a * a + b * b);
    let res = constant_curvature_residual(&bracket_kk(&sp), sp.metric(), hh)?;
    if !(res < 1e-10) {
        return Err(Error::Core(codazzi_core::Error::Infeasible(format!(
            "R − HR₀ residual {res:.3e}"
        ))));
    }
    let p = PointDoc::from_stat_point(&sp);
    Ok(if spec.flag("chart")? {
        Structure::Chart(constant_chart(&p, spec.h()?))
    } else {
        Structure::Point(p)
    })
}

/// Graph-type metric and second fundamental form of `f`.
fn graph(f: &Expr, n: usize) -> Result<(Vec<Vec<String>>, FieldDoc)> {
    let d: Vec<Expr> = (0..n)
        .map(|i| f.diff(i))
        .collect::<codazzi_core::Result<_>>()?;
    let mut g = vec![vec![String::new(); n]; n];
    let mut beta = vec![String::new(); n * n];
    let norm = d
        .iter()
        .map(|e| format!("{e}^2"))
        .collect::<Vec<_>>()
        .join(" + ");
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (i.min(j), i.max(j));
            let delta = if i == j { "1 + " } else { "" };
            g[i][j] = format!("{delta}{} * {}", d[a], d[b]);
            beta[i * n + j] = format!("{} * pow(1 + {norm}, -0.5)", d[a].diff(b)?);
        }
    }
    Ok((
        g,
        FieldDoc {
            degree: 2,
            components: beta,
        },
    ))
}

fn g4(spec: &GeneratorSpec) -> Result<Structure> {
    let n = spec.n;
    let mut r = rng(spec.seed);
    // wave vectors spanning every direction, so the graph is not a cylinder
    let ks = loop {
        let ks: Vec<Vec<i32>> = (0..=n).map(|_| wave_numbers(&mut r, n, 1)).collect();
        let gram = Mat::from_row_major(
            n,
            (0..n * n)
                .map(|e| ks.iter().map(|k| f64::from(k[e / n] * k[e % n])).sum())
                .collect(),
        )?;
        if gram.det() > 0.5 {
            break ks;
        }
    };
    let f: Vec<String> = ks
        .iter()
        .map(|k| {
            let c = r.random_range(0.1..=0.25);
            format!(
                "{} * sin({})",
                num(c),
                linear(k, r.random_range(0.0..TWO_PI))
            )
        })
        .collect();
    let f = Expr::parse(&f.join(" + "))?;
    let (g, beta) = graph(&f, n)?;
    let mut a = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                a.insert((i, j, k), trig_term(&mut r, n, 0.5, 0.3));
            }
        }
    }
    let mut fields = BTreeMap::new();
    fields.insert("beta".to_string(), beta);
    fields.insert("s".to_string(), random_field(&mut r, n, 2));
    fields.insert("tau".to_string(), random_field(&mut r, n, 1));
    let doc = ChartDoc {
        n,
        domain: vec![(-1.0, 1.0); n],
        periodic: vec![false; n],
        h: spec.h()?,
        g,
        a,
        fields,
    };
    doc.build()?;
    Ok(Structure::Chart(doc))
}

fn g5(spec: &GeneratorSpec) -> Result<Structure> {
    let n = spec.n;
    let mut r = rng(spec.seed);
    let c1 = r.random_range(0.1..=0.3);
    let c2 = r.random_range(0.05..=0.15);
    let (p1, p2, p3) = (
        r.random_range(0.0..TWO_PI),
        r.random_range(0.0..TWO_PI),
        r.random_range(0.0..TWO_PI),
    );
    let f = format!(
        "{} * sin(x1 + {}) * cos(x2 + {}) + {} * cos(x1 - x2 + {})",
        num(c1),
        num(p1),
        num(p2),
        num(c2),
        num(p3)
    );
    let conformal = format!("exp({f})");
    let g = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i == j, i < 2) {
                    (false, _) => "0".to_string(),
                    (true, true) => conformal.clone(),
                    (true, false) => "1".to_string(),
                })
                .collect()
        })
        .collect();
    let (a, b) = (r.random_range(-1.0..=1.0), r.random_range(-1.0..=1.0));
    let a = const_table(&g3_cubic(a, b));
    let mut fields = BTreeMap::new();
    fields.insert("s".to_string(), random_field(&mut r, n, 3));
    fields.insert("tau".to_string(), random_field(&mut r, n, 1));
    let doc = ChartDoc {
        n,
        domain: vec![(0.0, TWO_PI); n],
        periodic: vec![true; n],
        h: spec.h()?,
        g,
        a,
        fields,
    };
    doc.build()?;
    debug_assert!(doc.periodic.iter().all(|&p| p));
    Ok(Structure::Chart(doc))
}

pub fn generate(spec: &GeneratorSpec) -> Result<Structure> {
    spec.check()?;
    match spec.family {
        Family::ConstantA => g1(spec),
        Family::HessianPotential => g2(spec),
        Family::ConstantCurvature2d => g3(spec),
        Family::RandomSmooth => g4(spec),
        Family::PeriodicTrig => g5(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{emit, ingest_str};
    use codazzi_core::chart::conjugate_symmetry;
    use codazzi_core::point::{lpq, rho_k};

    #[test]
    fn g3_example_has_u_four_and_h_minus_two() {
        let spec = GeneratorSpec::new(Family::ConstantCurvature2d, 2, 0)
            .with("a", 1.0)
            .with("b", 0.0);
        let Structure::Point(p) = generate(&spec).unwrap() else {
            panic!("expected a point")
        };
        let sp = p.stat_point().unwrap();
        assert_eq!(sp.norm_a_sq(), 4.0);
        let r = constant_curvature_residual(&bracket_kk(&sp), sp.metric(), -2.0).unwrap();
        assert!(r < 1e-15);
        assert_eq!(lpq(&sp).sum(), 24.0);
        assert!(
            generate(&GeneratorSpec::new(Family::ConstantCurvature2d, 3, 0))
                .unwrap_err()
                .is_infeasible()
        );
    }

    #[test]
    fn g1_with_zero_scale_is_trivial() {
        let spec = GeneratorSpec::new(Family::ConstantA, 3, 9).with("scale", 0.0);
        let Structure::Point(p) = generate(&spec).unwrap() else {
            panic!("expected a point")
        };
        let sp = p.stat_point().unwrap();
        assert_eq!(sp.cubic().max_abs(), 0.0);
        assert_eq!(rho_k(&sp).via_norms, 0.0);
    }

    #[test]
    fn g2_example_potential_is_flat() {
        let spec = GeneratorSpec::new(Family::HessianPotential, 2, 0)
            .with("potential", "x1^2*x2^2/2 + (x1^2 + x2^2)/2");
        let Structure::Chart(c) = generate(&spec).unwrap() else {
            panic!("expected a chart")
        };
        let cs = c.build().unwrap();
        for x in cs.lattice(3) {
            let x: Vec<f64> = x.iter().map(|v| 0.9 * v).collect();
            let sc = statistical_connections(&cs, &x).unwrap();
            assert!(sc.r.tensor().max_abs() < 1e-6);
        }
        let bad =
            GeneratorSpec::new(Family::HessianPotential, 2, 0).with("potential", "x1^2 - x2^2");
        assert!(generate(&bad).unwrap_err().is_infeasible());
    }

    #[test]
    fn every_family_is_deterministic_and_round_trips() {
        for family in Family::ALL {
            for n in [2, 3] {
                let spec = GeneratorSpec::new(family, n, 17);
                let Ok(s) = generate(&spec) else {
                    assert_eq!((family, n), (Family::ConstantCurvature2d, 3));
                    continue;
                };
                let text = emit(&s);
                assert_eq!(emit(&generate(&spec).unwrap()), text);
                assert_eq!(ingest_str(&text).unwrap(), s);
                assert_ne!(
                    emit(&generate(&GeneratorSpec::new(family, n, 18)).unwrap()),
                    text,
                    "{family}"
                );
            }
        }
    }

    #[test]
    fn periodic_family_is_conjugate_symmetric_on_the_torus() {
        for n in [2, 3] {
            let Structure::Chart(c) =
                generate(&GeneratorSpec::new(Family::PeriodicTrig, n, 4)).unwrap()
            else {
                panic!("expected a chart")
            };
            assert!(c.periodic.iter().all(|&p| p));
            let cs = c.build().unwrap();
            for x in cs.lattice(2) {
                assert!(conjugate_symmetry(&cs, &x).unwrap().1);
                assert!(cs.stat_point(&x).unwrap().is_trace_free());
            }
        }
        let Structure::Chart(c) =
            generate(&GeneratorSpec::new(Family::RandomSmooth, 2, 4)).unwrap()
        else {
            panic!("expected a chart")
        };
        assert!(
            !conjugate_symmetry(&c.build().unwrap(), &[0.1, 0.2])
                .unwrap()
                .1
        );
    }

    #[test]
    fn unknown_names_and_parameters_are_usage_errors() {
        assert!(matches!("G7".parse::<Family>(), Err(Error::Usage(_))));
        assert_eq!("g4".parse::<Family>().unwrap(), Family::RandomSmooth);
        assert_eq!(
            "G2-hessian-potential".parse::<Family>().unwrap(),
            Family::HessianPotential
        );
        let spec = GeneratorSpec::new(Family::ConstantA, 2, 0).with("bogus", 1);
        assert!(matches!(generate(&spec), Err(Error::Usage(_))));
    }
}
