//! Canonical JSON text and schema-checked access to parsed documents.
//!
//! Canonical form: object keys sorted (the default `serde_json` map is
//! ordered), two-space indentation, every float written with 17 significant
//! digits so that parsing and re-emitting is the identity.

use std::io;

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

struct Canonical<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for Canonical<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_canonical_string(v: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        Canonical(PrettyFormatter::with_indent(b"  ")),
    );
    serde::Serialize::serialize(v, &mut ser).expect("serializing a Value into memory cannot fail");
    let mut s = String::from_utf8(out).expect("serde_json emits UTF-8");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("", format!("not a JSON document: {e}")))
}

pub fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// A JSON value together with its pointer inside the document.
#[derive(Debug)]
pub struct Node<'a> {
    pub value: &'a Value,
    pub pointer: String,
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

impl<'a> Node<'a> {
    pub fn root(value: &'a Value) -> Self {
        Node {
            value,
            pointer: String::new(),
        }
    }

    pub fn err(&self, message: impl Into<String>) -> Error {
        Error::schema(&self.pointer, message)
    }

    fn kind(&self) -> &'static str {
        match self.value {
            Value::Null => "null",
            Value::Bool(_) => "a boolean",
            Value::Number(_) => "a number",
            Value::String(_) => "a string",
            Value::Array(_) => "an array",
            Value::Object(_) => "an object",
        }
    }

    pub fn object(&self) -> Result<&'a Map<String, Value>> {
        self.value
            .as_object()
            .ok_or_else(|| self.err(format!("expected an object, found {}", self.kind())))
    }

    /// Errors on keys outside `allowed`.
    pub fn only_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.object()?.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(self
                    .child(key)
                    .err(format!("unknown key (expected one of {allowed:?})")));
            }
        }
        Ok(())
    }

    pub fn child(&self, key: &str) -> Node<'a> {
        let value = self.value.get(key).unwrap_or(&Value::Null);
        Node {
            value,
            pointer: format!("{}/{}", self.pointer, escape(key)),
        }
    }

    pub fn get(&self, key: &str) -> Result<Node<'a>> {
        let obj = self.object()?;
        match obj.get(key) {
            Some(value) => Ok(Node {
                value,
                pointer: format!("{}/{}", self.pointer, escape(key)),
            }),
            None => Err(self.err(format!("missing key `{key}`"))),
        }
    }

    pub fn opt(&self, key: &str) -> Result<Option<Node<'a>>> {
        Ok(self.object()?.contains_key(key).then(|| self.child(key)))
    }

    pub fn array(&self) -> Result<Vec<Node<'a>>> {
        let arr = self
            .value
            .as_array()
            .ok_or_else(|| self.err(format!("expected an array, found {}", self.kind())))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, value)| Node {
                value,
                pointer: format!("{}/{i}", self.pointer),
            })
            .collect())
    }

    pub fn array_of_len(&self, len: usize) -> Result<Vec<Node<'a>>> {
        let arr = self.array()?;
        if arr.len() != len {
            return Err(self.err(format!("expected {len} entries, found {}", arr.len())));
        }
        Ok(arr)
    }

    pub fn entries(&self) -> Result<Vec<(&'a str, Node<'a>)>> {
        Ok(self
            .object()?
            .keys()
            .map(|k| (k.as_str(), self.child(k)))
            .collect())
    }

    pub fn f64(&self) -> Result<f64> {
        self.value
            .as_f64()
            .ok_or_else(|| self.err(format!("expected a number, found {}", self.kind())))
    }

    pub fn usize(&self) -> Result<usize> {
        self.value.as_u64().map(|v| v as usize).ok_or_else(|| {
            self.err(format!(
                "expected a non-negative integer, found {}",
                self.kind()
            ))
        })
    }

    pub fn bool(&self) -> Result<bool> {
        self.value
            .as_bool()
            .ok_or_else(|| self.err(format!("expected a boolean, found {}", self.kind())))
    }

    pub fn str(&self) -> Result<&'a str> {
        self.value
            .as_str()
            .ok_or_else(|| self.err(format!("expected a string, found {}", self.kind())))
    }
}
