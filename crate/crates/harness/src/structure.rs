//! Structure files: a single point `{"n", "g", "A"}` or a chart
//! `{"n", "domain", "periodic", "h", "g", "A", "fields"}`.
//!
//! Cubic-form tables are keyed by 1-based index triples such as `"112"`;
//! absent entries are zero, and keys naming the same multiset of indices
//! must agree. Chart entries are expression strings in `x1..xn`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use codazzi_core::chart::{ChartStructure, ExprFields, ExprTensorField};
use codazzi_core::expr::Expr;
use codazzi_core::linalg::Mat;
use codazzi_core::tensor::cubic_len;
use codazzi_core::{CubicForm, MetricPoint, StatPoint, MAX_DIM};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::json::{self, float, Node};

/// Sorted index triple, 0-based.
pub type Triple = (usize, usize, usize);

fn triple_key(t: Triple) -> String {
    format!("{}{}{}", t.0 + 1, t.1 + 1, t.2 + 1)
}

fn parse_triple(node: &Node, key: &str, n: usize) -> Result<Triple> {
    let digits: Vec<usize> = key
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()
        .filter(|d: &Vec<usize>| d.len() == 3 && d.iter().all(|&d| (1..=n).contains(&d)))
        .ok_or_else(|| {
            node.err(format!(
                "expected three indices in 1..={n}, such as \"112\""
            ))
        })?;
    let mut t = [digits[0] - 1, digits[1] - 1, digits[2] - 1];
    t.sort_unstable();
    Ok((t[0], t[1], t[2]))
}

fn check_n(node: &Node) -> Result<usize> {
    let n = node.usize()?;
    if !(1..=MAX_DIM).contains(&n) {
        return Err(node.err(format!("dimension must be in 1..={MAX_DIM}, found {n}")));
    }
    Ok(n)
}

/// Cubic-form table; `same` decides whether two entries for one multiset
/// agree.
fn read_table<T>(
    node: &Node,
    n: usize,
    read: impl Fn(&Node) -> Result<T>,
    same: impl Fn(&T, &T) -> bool,
) -> Result<BTreeMap<Triple, T>> {
    let mut out = BTreeMap::new();
    for (key, child) in node.entries()? {
        let t = parse_triple(&child, key, n)?;
        let v = read(&child)?;
        if let Some(prev) = out.get(&t) {
            if !same(prev, &v) {
                return Err(child.err(format!(
                    "asymmetric A: disagrees with another entry for {key}"
                )));
            }
            continue;
        }
        out.insert(t, v);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointDoc {
    pub n: usize,
    pub g: Vec<Vec<f64>>,
    pub a: BTreeMap<Triple, f64>,
}

impl PointDoc {
    pub fn from_stat_point(sp: &StatPoint) -> Self {
        let n = sp.dim();
        let g = (0..n)
            .map(|i| (0..n).map(|j| sp.metric().get(i, j)).collect())
            .collect();
        let a = sp.cubic().entries().collect();
        PointDoc { n, g, a }
    }

    pub fn stat_point(&self) -> Result<StatPoint> {
        let n = self.n;
        let g = Mat::from_row_major(n, self.g.iter().flatten().copied().collect())?;
        let g = MetricPoint::new(g)?;
        let mut a = CubicForm::zeros(n)?;
        for (&(i, j, k), &v) in &self.a {
            a.set(i, j, k, v);
        }
        Ok(StatPoint::new(g, a)?)
    }

    fn decode(root: &Node) -> Result<Self> {
        root.only_keys(&["n", "g", "A"])?;
        let n = check_n(&root.get("n")?)?;
        let g = root
            .get("g")?
            .array_of_len(n)?
            .iter()
            .map(|row| {
                row.array_of_len(n)?
                    .iter()
                    .map(Node::f64)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let a = read_table(&root.get("A")?, n, |e| e.f64(), |x, y| x == y)?;
        let doc = PointDoc { n, g, a };
        doc.stat_point().map_err(|e| match e {
            Error::Core(c) => Error::schema("/g", c.to_string()),
            other => other,
        })?;
        Ok(doc)
    }

    fn to_value(&self) -> Value {
        let a: Map<String, Value> = self
            .a
            .iter()
            .map(|(&t, &v)| (triple_key(t), float(v)))
            .collect();
        json!({
            "n": self.n,
            "g": self.g.iter().map(|r| r.iter().map(|&v| float(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "A": a,
        })
    }
}

/// Auxiliary covariant tensor field; components row-major over `nᵈᵉᵍʳᵉᵉ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDoc {
    pub degree: usize,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartDoc {
    pub n: usize,
    pub domain: Vec<(f64, f64)>,
    pub periodic: Vec<bool>,
    pub h: f64,
    pub g: Vec<Vec<String>>,
    pub a: BTreeMap<Triple, String>,
    pub fields: BTreeMap<String, FieldDoc>,
}

fn parse_expr(node: &Node, n: usize) -> Result<String> {
    let src = node.str()?;
    let e = Expr::parse(src).map_err(|e| node.err(e.to_string()))?;
    if e.arity() > n {
        return Err(node.err(format!("uses x{} in dimension {n}", e.arity())));
    }
    Ok(src.to_string())
}

fn exprs(src: &[String]) -> Result<Vec<Expr>> {
    Ok(src
        .iter()
        .map(|s| Expr::parse(s))
        .collect::<codazzi_core::Result<_>>()?)
}

impl ChartDoc {
    pub fn fields(&self) -> Result<ExprFields> {
        let n = self.n;
        let g = exprs(&self.g.iter().flatten().cloned().collect::<Vec<_>>())?;
        let mut a = Vec::with_capacity(cubic_len(n));
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    a.push(match self.a.get(&(i, j, k)) {
                        Some(s) => Expr::parse(s)?,
                        None => Expr::c(0.0),
                    });
                }
            }
        }
        Ok(ExprFields::new(n, g, a)?)
    }

    pub fn build(&self) -> Result<ChartStructure> {
        Ok(ChartStructure::new(
            Arc::new(self.fields()?),
            self.domain.clone(),
            self.periodic.clone(),
            self.h,
        )?)
    }

    pub fn field(&self, name: &str) -> Result<ExprTensorField> {
        let f = self
            .fields
            .get(name)
            .ok_or_else(|| Error::Usage(format!("chart has no field `{name}`")))?;
        Ok(ExprTensorField::new(
            self.n,
            f.degree,
            exprs(&f.components)?,
        )?)
    }

    fn decode(root: &Node) -> Result<Self> {
        root.only_keys(&["n", "domain", "periodic", "h", "g", "A", "fields"])?;
        let n = check_n(&root.get("n")?)?;
        let domain = root
            .get("domain")?
            .array_of_len(n)?
            .iter()
            .map(|iv| {
                let e = iv.array_of_len(2)?;
                Ok((e[0].f64()?, e[1].f64()?))
            })
            .collect::<Result<Vec<_>>>()?;
        let periodic = root
            .get("periodic")?
            .array_of_len(n)?
            .iter()
            .map(Node::bool)
            .collect::<Result<Vec<_>>>()?;
        let h = root.get("h")?.f64()?;
        let gnode = root.get("g")?;
        let g = gnode
            .array_of_len(n)?
            .iter()
            .map(|row| {
                row.array_of_len(n)?
                    .iter()
                    .map(|e| parse_expr(e, n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (Expr::parse(&g[i][j])?, Expr::parse(&g[j][i])?);
                if a.to_string() != b.to_string() {
                    return Err(Error::schema(
                        &format!("{}/{j}/{i}", gnode.pointer),
                        format!("g is not symmetric: differs from g/{i}/{j}"),
                    ));
                }
            }
        }
        let a = read_table(
            &root.get("A")?,
            n,
            |e| parse_expr(e, n),
            |x, y| {
                Expr::parse(x).map(|e| e.to_string()).ok()
                    == Expr::parse(y).map(|e| e.to_string()).ok()
            },
        )?;
        let mut fields = BTreeMap::new();
        if let Some(fnode) = root.opt("fields")? {
            for (name, f) in fnode.entries()? {
                f.only_keys(&["degree", "components"])?;
                let dnode = f.get("degree")?;
                let degree = dnode.usize()?;
                if degree > 4 {
                    return Err(dnode.err(format!("degree must be at most 4, found {degree}")));
                }
                let components = f
                    .get("components")?
                    .array_of_len(n.pow(degree as u32))?
                    .iter()
                    .map(|e| parse_expr(e, n))
                    .collect::<Result<_>>()?;
                fields.insert(name.to_string(), FieldDoc { degree, components });
            }
        }
        let doc = ChartDoc {
            n,
            domain,
            periodic,
            h,
            g,
            a,
            fields,
        };
        doc.build()?;
        Ok(doc)
    }

    fn to_value(&self) -> Value {
        let a: Map<String, Value> = self
            .a
            .iter()
            .map(|(&t, v)| (triple_key(t), json!(v)))
            .collect();
        let fields: Map<String, Value> = self
            .fields
            .iter()
            .map(|(k, f)| {
                (
                    k.clone(),
                    json!({"degree": f.degree, "components": f.components}),
                )
            })
            .collect();
        json!({
            "n": self.n,
            "domain": self.domain.iter().map(|&(lo, hi)| vec![float(lo), float(hi)]).collect::<Vec<_>>(),
            "periodic": self.periodic,
            "h": float(self.h),
            "g": self.g,
            "A": a,
            "fields": fields,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Point(PointDoc),
    Chart(ChartDoc),
}

impl Structure {
    pub fn decode(v: &Value) -> Result<Self> {
        let root = Node::root(v);
        root.object()?;
        if root.opt("domain")?.is_some() {
            Ok(Structure::Chart(ChartDoc::decode(&root)?))
        } else {
            Ok(Structure::Point(PointDoc::decode(&root)?))
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Structure::Point(p) => p.to_value(),
            Structure::Chart(c) => c.to_value(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Structure::Point(p) => p.n,
            Structure::Chart(c) => c.n,
        }
    }
}

pub fn ingest_str(text: &str) -> Result<Structure> {
    Structure::decode(&json::parse(text)?)
}

pub fn ingest(path: &Path) -> Result<Structure> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_str(&text)
}

pub fn emit(s: &Structure) -> String {
    json::to_canonical_string(&s.to_value())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = include_str!("../examples/equality-example.json");

    #[test]
    fn example_file_gives_the_listed_difference_tensor() {
        let Structure::Point(p) = ingest_str(EXAMPLE).unwrap() else {
            panic!("expected a point")
        };
        let sp = p.stat_point().unwrap();
        assert_eq!(sp.k_apply(&[1.0, 0.0], &[1.0, 0.0]), vec![0.0, 1.0]);
        assert_eq!(sp.k_apply(&[1.0, 0.0], &[0.0, 1.0]), vec![1.0, 0.0]);
        assert_eq!(sp.k_apply(&[0.0, 1.0], &[0.0, 1.0]), vec![0.0, 3.0]);
    }

    #[test]
    fn emit_then_ingest_is_the_identity() {
        let s = ingest_str(EXAMPLE).unwrap();
        let text = emit(&s);
        assert_eq!(ingest_str(&text).unwrap(), s);
        assert_eq!(emit(&ingest_str(&text).unwrap()), text);
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let err = ingest_str("").unwrap_err();
        assert!(matches!(err, Error::Schema { .. }), "{err}");
        let err = ingest_str(r#"{"n": 2, "g": [[1, 0], [0]], "A": {}}"#).unwrap_err();
        assert!(err.to_string().contains("`/g/1`"), "{err}");
        let err = ingest_str(r#"{"n": 2, "g": [[1, 0], [0, 1]], "A": {"113": 1}}"#).unwrap_err();
        assert!(err.to_string().contains("`/A/113`"), "{err}");
        let err = ingest_str(r#"{"n": 2, "g": [[1, 0], [0, 1]], "A": {"112": 1, "211": 2}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("asymmetric A"), "{err}");
        let err = ingest_str(r#"{"n": 2, "g": [[1, 2], [2, 1]], "A": {}}"#).unwrap_err();
        assert!(
            matches!(&err, Error::Schema { pointer, .. } if pointer == "/g"),
            "{err}"
        );
        assert!(err.to_string().contains("order 2"), "{err}");
    }

    #[test]
    fn chart_documents_round_trip() {
        let text = r#"{
            "n": 2, "domain": [[0, 6.283185307179586], [0, 6.283185307179586]], "periodic": [true, true],
            "h": 0.001, "g": [["exp(sin(x1))", "0"], ["0", "exp(sin(x1))"]],
            "A": {"111": "0.5", "122": "-0.5", "211": "0.2*cos(x2)"},
            "fields": {"tau": {"degree": 1, "components": ["sin(x1)", "x2"]}}
        }"#;
        let s = ingest_str(text).unwrap();
        let Structure::Chart(c) = &s else {
            panic!("expected a chart")
        };
        assert_eq!(c.a.get(&(0, 0, 1)).map(String::as_str), Some("0.2*cos(x2)"));
        let cs = c.build().unwrap();
        assert!(cs.periodic().iter().all(|&p| p));
        assert_eq!(c.field("tau").unwrap().degree(), 1);
        let out = emit(&s);
        assert_eq!(ingest_str(&out).unwrap(), s);
        assert_eq!(emit(&ingest_str(&out).unwrap()), out);

        let bad = text.replace("\"x2\"]", "\"x3\"]");
        let err = ingest_str(&bad).unwrap_err();
        assert!(
            err.to_string().contains("`/fields/tau/components/1`"),
            "{err}"
        );
        let bad = text.replace(r#"["0", "exp(sin(x1))"]"#, r#"["1", "exp(sin(x1))"]"#);
        let err = ingest_str(&bad).unwrap_err();
        assert!(err.to_string().contains("`/g/1/0`"), "{err}");
    }
}
