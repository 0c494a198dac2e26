//! Model files and CSV output.
//!
//! A model file is JSON in one of three shapes:
//!
//! ```json
//! {"kind": "rate", "n": 2, "a": ["0.005", "-0.1"], "b2": ["0", "0", "0", "1"],
//!  "R": ["0", "1"], "domain": {"lo": "0", "hi": null}}
//! {"kind": "vol", "N": 4, "nmap": [3, 4, 3], "h2": [..], "b2": [..], "bh": [..],
//!  "a": [..], "domain": {..}}
//! {"family": "rate-family-2", "alpha": "0.1", "beta": "0.05"}
//! ```
//!
//! Coefficients are decimal strings (or `p/q`) parsed as exact rationals. A
//! bare JSON number is read through its shortest round-trip decimal form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num::BigRational;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational};
use crate::family::{build_family, Family, Params};
use crate::model::{Domain, ModelSpec, RateModelSpec, VolModelSpec};
use crate::poly::RatPoly;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn schema(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { location: location.into(), message: message.into() }
}

fn io_error(path: &Path, err: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: err.to_string() }
}

fn rational(value: &Value, location: &str) -> Result<BigRational> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(schema(location, format!("expected a decimal string, found {other}"))),
    };
    parse_rational(&text).map_err(|_| schema(location, format!("not a number: {text:?}")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(key, "missing field"))
}

fn polynomial(obj: &Map<String, Value>, key: &str, max_degree: usize, bound: &str) -> Result<RatPoly> {
    let items = field(obj, key)?.as_array().ok_or_else(|| schema(key, "expected an array of coefficients"))?;
    let coeffs =
        items.iter().enumerate().map(|(i, v)| rational(v, &format!("{key}[{i}]"))).collect::<Result<Vec<_>>>()?;
    let p = RatPoly::new(coeffs);
    if let Some(d) = p.degree() {
        if d > max_degree {
            return Err(schema(key, format!("degree {d} exceeds the bound {bound} (degree <= {max_degree})")));
        }
    }
    Ok(p)
}

fn count(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    field(obj, key)?.as_u64().map(|v| v as usize).ok_or_else(|| schema(key, "expected a non-negative integer"))
}

fn domain(obj: &Map<String, Value>) -> Result<Domain> {
    let d = field(obj, "domain")?.as_object().ok_or_else(|| schema("domain", "expected an object with lo and hi"))?;
    let end = |key: &str| -> Result<Option<BigRational>> {
        match d.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => rational(v, &format!("domain.{key}")).map(Some),
        }
    };
    Domain::new(end("lo")?, end("hi")?).map_err(|e| schema("domain", e.to_string()))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(k.as_str(), "unknown field")),
        None => Ok(()),
    }
}

fn warnings(obj: &Map<String, Value>) -> Result<Vec<String>> {
    match obj.get("warnings") {
        None => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|w| w.as_str().map(str::to_string).ok_or_else(|| schema("warnings", "expected strings")))
            .collect(),
        Some(_) => Err(schema("warnings", "expected an array of strings")),
    }
}

/// Build a model from parsed JSON.
pub fn model_from_json(value: &Value) -> Result<ModelSpec> {
    let obj = value.as_object().ok_or_else(|| schema("$", "expected a JSON object"))?;
    if let Some(name) = obj.get("family") {
        let name = name.as_str().ok_or_else(|| schema("family", "expected a family name"))?;
        let family: Family = name.parse().map_err(|e: Error| schema("family", e.to_string()))?;
        let mut params = Params::new();
        for (key, v) in obj.iter().filter(|(k, _)| k.as_str() != "family") {
            params.insert(key.clone(), rational(v, key)?);
        }
        return build_family(family, &params);
    }
    let kind = field(obj, "kind")?.as_str().ok_or_else(|| schema("kind", "expected \"rate\" or \"vol\""))?;
    match kind {
        "rate" => {
            reject_unknown(obj, &["kind", "n", "a", "b2", "R", "domain", "warnings"])?;
            let mut spec = RateModelSpec::new(
                count(obj, "n")?,
                polynomial(obj, "a", 3, "a in F_3")?,
                polynomial(obj, "b2", 4, "b2 in F_4")?,
                polynomial(obj, "R", 2, "R in F_2")?,
                domain(obj)?,
            )?;
            for w in warnings(obj)? {
                spec = spec.with_warning(w);
            }
            Ok(ModelSpec::Rate(spec))
        }
        "vol" => {
            reject_unknown(obj, &["kind", "N", "nmap", "h2", "b2", "bh", "a", "domain"])?;
            let nmap = field(obj, "nmap")?
                .as_array()
                .ok_or_else(|| schema("nmap", "expected an array of degrees"))?
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_u64().map(|d| d as usize).ok_or_else(|| schema(format!("nmap[{i}]"), "expected an integer"))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ModelSpec::Vol(VolModelSpec::new(
                count(obj, "N")?,
                polynomial(obj, "h2", 2, "h2 in F_2")?,
                polynomial(obj, "b2", 4, "b2 in F_4")?,
                polynomial(obj, "bh", 3, "bh in F_3")?,
                polynomial(obj, "a", 3, "a in F_3")?,
                nmap,
                domain(obj)?,
            )?))
        }
        other => Err(schema("kind", format!("unknown model kind {other:?}"))),
    }
}

/// Parse model text; JSON syntax errors carry line and column.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| schema(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    model_from_json(&value)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_model(&text)
}

fn coeffs_json(p: &RatPoly) -> Value {
    Value::Array(p.coeffs().iter().map(|c| Value::String(format_rational(c))).collect())
}

fn domain_json(d: &Domain) -> Value {
    let end = |e: Option<&BigRational>| e.map_or(Value::Null, |v| Value::String(format_rational(v)));
    json!({"lo": end(d.lo()), "hi": end(d.hi())})
}

/// Raw-coefficient JSON; keys are sorted, so the text is canonical.
pub fn model_to_json(spec: &ModelSpec) -> Value {
    match spec {
        ModelSpec::Rate(s) => {
            let mut v = json!({
                "kind": "rate",
                "n": s.n(),
                "a": coeffs_json(s.a()),
                "b2": coeffs_json(s.b2()),
                "R": coeffs_json(s.r()),
                "domain": domain_json(s.domain()),
            });
            if !s.warnings().is_empty() {
                v["warnings"] = json!(s.warnings());
            }
            v
        }
        ModelSpec::Vol(s) => json!({
            "kind": "vol",
            "N": s.grid_size(),
            "nmap": s.nmap(),
            "h2": coeffs_json(s.h2()),
            "b2": coeffs_json(s.b2()),
            "bh": coeffs_json(s.bh()),
            "a": coeffs_json(s.a()),
            "domain": domain_json(s.domain()),
        }),
    }
}

pub fn model_to_string(spec: &ModelSpec) -> String {
    serde_json::to_string_pretty(&model_to_json(spec)).expect("model JSON serializes") + "\n"
}

pub fn save_model(path: impl AsRef<Path>, spec: &ModelSpec) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model_to_string(spec)).map_err(|e| io_error(path, e))
}

/// Hex SHA-256 of the canonical compact JSON.
pub fn model_digest(spec: &ModelSpec) -> String {
    let text = serde_json::to_string(&model_to_json(spec)).expect("model JSON serializes");
    Sha256::digest(text.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Tag written as a `#` comment at the top of every CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub command: String,
    pub seed: Option<u64>,
    pub model_digest: String,
}

impl Provenance {
    pub fn line(&self) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        format!("# polyterm {TOOL_VERSION} command={} seed={seed} model=sha256:{}", self.command, self.model_digest)
    }
}

/// 17 significant digits; enough to round-trip any double.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_string(provenance: &Provenance, header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&provenance.line());
    out.push('\n');
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: impl AsRef<Path>, provenance: &Provenance, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, csv_string(provenance, header, rows)).map_err(|e| io_error(path, e))
}
