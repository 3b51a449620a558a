//! Residual reports: canonical JSON, one-row-per-check CSV, and SVG
//! convergence plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::json::{float, format_f64, to_canonical_string};

pub const SCHEMA: &str = "codazzi-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionSkipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::PreconditionSkipped => "precondition-skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    /// The identity or inequality the check measures.
    pub anchor: &'static str,
    /// `None` exactly when skipped.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub location: String,
}

impl Check {
    pub fn measured(
        id: impl Into<String>,
        anchor: &'static str,
        residual: f64,
        tolerance: f64,
        location: impl Into<String>,
    ) -> Self {
        // NaN residuals fail
        let verdict = if residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Check {
            id: id.into(),
            anchor,
            residual: Some(residual),
            tolerance,
            verdict,
            location: location.into(),
        }
    }

    pub fn skipped(id: impl Into<String>, anchor: &'static str, reason: impl Into<String>) -> Self {
        Check {
            id: id.into(),
            anchor,
            residual: None,
            tolerance: 0.0,
            verdict: Verdict::PreconditionSkipped,
            location: reason.into(),
        }
    }

    fn to_value(&self) -> Value {
        json!({
            "id": self.id,
            "anchor": self.anchor,
            "residual": self.residual.map(float).unwrap_or(Value::Null),
            "tolerance": float(self.tolerance),
            "verdict": self.verdict.as_str(),
            "location": self.location,
        })
    }
}

/// Folds repeated measurements of one check into its worst case (largest
/// residual-to-tolerance ratio); the verdict fails if any measurement does.
#[derive(Debug, Clone)]
pub struct Worst {
    id: String,
    anchor: &'static str,
    worst: Option<Check>,
    skipped: Option<String>,
}

impl Worst {
    pub fn new(id: impl Into<String>, anchor: &'static str) -> Self {
        Worst {
            id: id.into(),
            anchor,
            worst: None,
            skipped: None,
        }
    }

    pub fn add(&mut self, residual: f64, tolerance: f64, location: impl Into<String>) {
        let c = Check::measured(self.id.clone(), self.anchor, residual, tolerance, location);
        let key = |c: &Check| {
            let r = c.residual.unwrap_or(0.0);
            if r.is_nan() {
                f64::INFINITY
            } else {
                r / tolerance_floor(c.tolerance)
            }
        };
        match &self.worst {
            Some(w) if key(w) >= key(&c) => {}
            _ => self.worst = Some(c),
        }
    }

    pub fn skip(&mut self, reason: impl Into<String>) {
        self.skipped.get_or_insert_with(|| reason.into());
    }

    pub fn merge(&mut self, other: Worst) {
        if let Some(c) = other.worst {
            self.add(c.residual.unwrap_or(f64::NAN), c.tolerance, c.location);
        }
        if let Some(s) = other.skipped {
            self.skip(s);
        }
    }

    pub fn finish(self) -> Check {
        match (self.worst, self.skipped) {
            (Some(c), _) => c,
            (None, reason) => Check::skipped(
                self.id,
                self.anchor,
                reason.unwrap_or_else(|| "no applicable samples".into()),
            ),
        }
    }
}

fn tolerance_floor(t: f64) -> f64 {
    t.max(f64::MIN_POSITIVE)
}

/// Ordered collection of [`Worst`] accumulators keyed by check id.
#[derive(Debug, Clone, Default)]
pub struct Checks {
    order: Vec<String>,
    by_id: BTreeMap<String, Worst>,
}

impl Checks {
    pub fn entry(&mut self, id: impl Into<String>, anchor: &'static str) -> &mut Worst {
        let id = id.into();
        if !self.by_id.contains_key(&id) {
            self.order.push(id.clone());
        }
        self.by_id
            .entry(id.clone())
            .or_insert_with(|| Worst::new(id, anchor))
    }

    pub fn add(
        &mut self,
        id: impl Into<String>,
        anchor: &'static str,
        residual: f64,
        tolerance: f64,
        location: impl Into<String>,
    ) {
        self.entry(id, anchor).add(residual, tolerance, location);
    }

    pub fn skip(&mut self, id: impl Into<String>, anchor: &'static str, reason: impl Into<String>) {
        self.entry(id, anchor).skip(reason);
    }

    /// Appends `other`, merging checks with equal ids.
    pub fn extend(&mut self, other: Checks) {
        let Checks { order, mut by_id } = other;
        for id in order {
            let w = by_id.remove(&id).expect("ordered ids are present");
            let anchor = w.anchor;
            self.entry(id, anchor).merge(w);
        }
    }

    pub fn finish(self) -> Vec<Check> {
        let Checks { order, mut by_id } = self;
        order
            .into_iter()
            .map(|id| by_id.remove(&id).expect("ordered ids are present").finish())
            .collect()
    }
}

/// Residual of one identity as a function of the step `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub id: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub h: f64,
    pub tol_scale: f64,
    pub seeds: Vec<u64>,
    pub quadrature: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub environment: Environment,
    pub convergence: Vec<Series>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl ResidualReport {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for check in &self.checks {
            match check.verdict {
                Verdict::Pass => c.pass += 1,
                Verdict::Fail => c.fail += 1,
                Verdict::PreconditionSkipped => c.skipped += 1,
            }
        }
        c
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Everything but the timing block.
    pub fn body(&self) -> Value {
        let c = self.counts();
        json!({
            "schema": SCHEMA,
            "suite": self.suite,
            "checks": self.checks.iter().map(Check::to_value).collect::<Vec<_>>(),
            "summary": {"pass": c.pass, "fail": c.fail, "precondition-skipped": c.skipped},
            "environment": {
                "h": float(self.environment.h),
                "tol_scale": float(self.environment.tol_scale),
                "seeds": self.environment.seeds,
                "quadrature": self.environment.quadrature,
            },
            "convergence": self.convergence.iter().map(|s| json!({
                "id": s.id,
                "h": s.points.iter().map(|p| float(p.0)).collect::<Vec<_>>(),
                "residual": s.points.iter().map(|p| float(p.1)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut v = self.body();
        v["timing"] = json!({"elapsed_ms": float(self.elapsed_ms)});
        to_canonical_string(&v)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "suite",
            "id",
            "anchor",
            "residual",
            "tolerance",
            "verdict",
            "location",
        ])
        .expect("in-memory write");
        for c in &self.checks {
            let residual = c.residual.map(format_f64).unwrap_or_default();
            w.write_record([
                self.suite.as_str(),
                &c.id,
                c.anchor,
                &residual,
                &format_f64(c.tolerance),
                c.verdict.as_str(),
                &c.location,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv emits UTF-8")
    }

    /// Log-log plot of every convergence series with a slope-2 guide.
    pub fn to_svg(&self) -> String {
        plot_series(&self.convergence)
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub fn plot_series(series: &[Series]) -> String {
    let (w, h, pad) = (720.0, 480.0, 60.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    if pts.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">no convergence data</text>"#,
            w / 2.0,
            h / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }
    let lx = |v: f64| v.log10();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(lx(x));
        x1 = x1.max(lx(x));
        y0 = y0.min(lx(y));
        y1 = y1.max(lx(y));
    }
    let (x0, x1) = (x0 - 0.1, x1 + 0.1);
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |x: f64| pad + (lx(x) - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (lx(y) - y0) / (y1 - y0) * (h - 2.0 * pad);
    let _ = writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for e in (y0 as i32)..=(y1 as i32) {
        let y = py(10f64.powi(e));
        let _ = writeln!(
            svg,
            r##"<line x1="{pad}" x2="{}" y1="{y:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
            w - pad
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">1e{e}</text>"#,
            pad - 4.0,
            y + 4.0
        );
    }
    let mut hs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    for &hv in &hs {
        let x = px(hv);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{}" text-anchor="middle">{hv:e}</text>"#,
            h - pad + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">h</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">residual</text>"#,
        h / 2.0,
        h / 2.0
    );
    // slope-2 guide through the first point of the first series
    if let Some(&(hx, ry)) = series.first().and_then(|s| s.points.first()) {
        if let (Some(&ha), Some(&hb)) = (hs.first(), hs.last()) {
            let (ra, rb) = (ry * (ha / hx).powi(2), ry * (hb / hx).powi(2));
            let _ = writeln!(
                svg,
                r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#999" stroke-dasharray="6 4"/>"##,
                px(ha),
                py(ra),
                px(hb),
                py(rb)
            );
        }
    }
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0 > 0.0 && p.1 > 0.0)
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
        for p in &path {
            let (x, y) = p.split_once(',').expect("formatted as x,y");
            let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{colour}"/>"#);
        }
        let ly = pad + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" fill="{colour}">{}</text>"#,
            pad + 8.0,
            escape_xml(&s.id)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> ResidualReport {
        let mut checks = Checks::default();
        checks.add("a", "x = x", 1e-14, 1e-12, "seed 0");
        checks.add("a", "x = x", 5e-13, 1e-12, "seed 1");
        checks.add("b", "y ≤ z", 2.0, 1.0, "seed 0");
        checks.skip("c", "w = 0", "not conjugate symmetric");
        ResidualReport {
            suite: "demo".into(),
            checks: checks.finish(),
            environment: Environment {
                h: 1e-3,
                tol_scale: 1.0,
                seeds: vec![0, 1],
                quadrature: BTreeMap::new(),
            },
            convergence: vec![Series {
                id: "a".into(),
                points: vec![(4e-3, 1.6e-5), (2e-3, 4e-6), (1e-3, 1e-6)],
            }],
            elapsed_ms: 12.5,
        }
    }

    #[test]
    fn worst_case_and_verdicts() {
        let r = report();
        assert_eq!(r.checks.len(), 3);
        assert_eq!(r.checks[0].location, "seed 1");
        assert_eq!(r.checks[0].verdict, Verdict::Pass);
        assert_eq!(r.checks[1].verdict, Verdict::Fail);
        assert_eq!(r.checks[2].verdict, Verdict::PreconditionSkipped);
        assert_eq!(
            r.counts(),
            Counts {
                pass: 1,
                fail: 1,
                skipped: 1
            }
        );
        for c in &r.checks {
            assert!(
                c.verdict == Verdict::PreconditionSkipped
                    || (c.verdict == Verdict::Pass) == (c.residual.unwrap() <= c.tolerance)
            );
        }
        let mut w = Worst::new("n", "");
        w.add(f64::NAN, 1.0, "nan");
        w.add(0.0, 1.0, "ok");
        assert_eq!(w.finish().verdict, Verdict::Fail);
    }

    #[test]
    fn json_has_schema_and_timing_outside_the_body() {
        let r = report();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["checks"][2]["verdict"], "precondition-skipped");
        assert!(v["checks"][2]["residual"].is_null());
        assert!(r.body().get("timing").is_none());
        let mut other = r.clone();
        other.elapsed_ms = 99.0;
        assert_eq!(r.body(), other.body());
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let csv = report().to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(3).unwrap().contains("precondition-skipped"));
    }

    #[test]
    fn svg_plots_each_series() {
        let svg = report().to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(plot_series(&[]).contains("no convergence data"));
    }
}
