//! JSON instance files.
//!
//! ```json
//! {"n": 2, "mode": "additive-exact",
//!  "valuations": [{"breakpoints": ["0", "1/2", "1"], "values": ["-1", "3"]},
//!                 {"breakpoints": ["0", "1"], "values": ["1"]}]}
//! ```
//!
//! Every rational is a string, either `"p/q"` or an integer. JSON numbers are
//! rejected so that no value ever passes through a float.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::valuation::{AdditiveInstance, CutSet, PiecewiseConstantDensity, Scalar, ValuationError};

pub const ADDITIVE_MODE: &str = "additive-exact";
pub const GLOBAL_MODE: &str = "global-float";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        path: path.into(),
        message: message.into(),
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, FormatError> {
    obj.get(key)
        .ok_or_else(|| field(format!("{path}.{key}"), "missing field"))
}

fn rational_at(v: &Value, path: &str) -> Result<Rational, FormatError> {
    match v {
        Value::String(s) => rational::parse_rational(s).map_err(|e| field(path, e.to_string())),
        Value::Number(num) => Err(field(
            path,
            format!("numbers are not accepted, write the rational as a string (\"{num}\")"),
        )),
        other => Err(field(path, format!("expected a rational string, found {}", kind(other)))),
    }
}

fn rationals_at(v: &Value, path: &str) -> Result<Vec<Rational>, FormatError> {
    let items = v
        .as_array()
        .ok_or_else(|| field(path, format!("expected an array, found {}", kind(v))))?;
    items
        .iter()
        .enumerate()
        .map(|(j, item)| rational_at(item, &format!("{path}[{j}]")))
        .collect()
}

fn density_at(v: &Value, path: &str) -> Result<PiecewiseConstantDensity, FormatError> {
    let obj = v
        .as_object()
        .ok_or_else(|| field(path, format!("expected an object, found {}", kind(v))))?;
    let breakpoints = rationals_at(get(obj, "breakpoints", path)?, &format!("{path}.breakpoints"))?;
    let values = rationals_at(get(obj, "values", path)?, &format!("{path}.values"))?;
    PiecewiseConstantDensity::new(breakpoints, values).map_err(|e| field(path, e.to_string()))
}

pub fn instance_from_value(doc: &Value) -> Result<AdditiveInstance, FormatError> {
    let root = "$";
    let obj = doc
        .as_object()
        .ok_or_else(|| field(root, format!("expected an object, found {}", kind(doc))))?;
    let mode = get(obj, "mode", root)?;
    match mode.as_str() {
        Some(ADDITIVE_MODE) => {}
        Some(GLOBAL_MODE) => {
            return Err(field(
                "$.mode",
                "global-float instances are black-box functions and cannot be loaded from JSON",
            ))
        }
        _ => {
            return Err(field(
                "$.mode",
                format!("expected \"{ADDITIVE_MODE}\", found {mode}"),
            ))
        }
    }
    let n = get(obj, "n", root)?;
    let n = n
        .as_u64()
        .filter(|&n| n >= 1)
        .ok_or_else(|| field("$.n", format!("expected a positive integer, found {n}")))? as usize;
    let vals = get(obj, "valuations", root)?;
    let vals = vals
        .as_array()
        .ok_or_else(|| field("$.valuations", format!("expected an array, found {}", kind(vals))))?;
    if vals.len() != n {
        return Err(field(
            "$.valuations",
            format!("n is {n} but {} valuations are listed", vals.len()),
        ));
    }
    let densities = vals
        .iter()
        .enumerate()
        .map(|(i, v)| density_at(v, &format!("$.valuations[{i}]")))
        .collect::<Result<_, _>>()?;
    AdditiveInstance::new(densities).map_err(|e| field(root, e.to_string()))
}

pub fn parse_instance(text: &str) -> Result<AdditiveInstance, FormatError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    instance_from_value(&doc)
}

pub fn instance_to_value(inst: &AdditiveInstance) -> Value {
    let valuations: Vec<Value> = inst
        .densities()
        .iter()
        .map(|d| {
            json!({
                "breakpoints": d.breakpoints().iter().map(rational::format_rational).collect::<Vec<_>>(),
                "values": d.values().iter().map(rational::format_rational).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "n": inst.densities().len(),
        "mode": ADDITIVE_MODE,
        "valuations": valuations,
    })
}

pub fn write_instance(inst: &AdditiveInstance) -> String {
    serde_json::to_string_pretty(&instance_to_value(inst)).expect("values serialize")
}

/// Comma-separated rationals, e.g. `1/5,2/5,2/5`.
pub fn parse_cutset(text: &str) -> Result<CutSet, FormatError> {
    let parts = text
        .split(',')
        .enumerate()
        .map(|(i, s)| rational::parse_rational(s).map_err(|e| field(format!("cut-set[{i}]"), e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    CutSet::new(parts).map_err(|e: ValuationError| field("cut-set", e.to_string()))
}

/// Exact strings for rationals, `{:e}` strings for floats.
pub fn scalars<S: Scalar>(values: &[S]) -> Value {
    Value::Array(values.iter().map(|v| Value::String(v.render())).collect())
}

pub fn scalars_f64<S: Scalar>(values: &[S]) -> Value {
    Value::Array(values.iter().map(|v| json!(v.to_f64())).collect())
}

pub fn cutset_value(x: &CutSet) -> Value {
    scalars(x.parts())
}

pub fn rational_value(r: &Rational) -> Value {
    Value::String(rational::format_rational(r))
}
