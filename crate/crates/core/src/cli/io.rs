//! Argument parsing and output files for the command line.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::convolutions::Algebra;
use crate::error::{Error, Result};
use crate::measures::{Distribution, LawSpec};
use crate::risk::{ModelSpec, RiskModel};

const MODEL_FIELDS: [&str; 6] = ["algebra", "claims", "premiums", "u", "lambda", "beta"];

fn config_error(path: &str, message: impl ToString) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.to_string(),
    }
}

/// Inline JSON when the argument starts with `{`, otherwise a file to read.
fn json_arg(arg: &str, path: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| config_error(path, format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| config_error(path, e))
}

fn field<T: DeserializeOwned>(value: &Value, path: &str) -> Result<T> {
    T::deserialize(value).map_err(|e| config_error(path, e))
}

pub fn parse_algebra(arg: &str) -> Result<(Algebra, Value)> {
    let v = json_arg(arg, "algebra")?;
    Ok((field(&v, "algebra")?, v))
}

pub fn parse_law(arg: &str, path: &str) -> Result<(Distribution, Value)> {
    let v = json_arg(arg, path)?;
    let spec: LawSpec = field(&v, path)?;
    let law = spec.build().map_err(|e| config_error(path, e))?;
    Ok((law, v))
}

/// Parses a model description, naming the offending field on failure.
pub fn parse_model(arg: &str) -> Result<(RiskModel, Value)> {
    let v = json_arg(arg, "model")?;
    let obj = v
        .as_object()
        .ok_or_else(|| config_error("model", "expected a JSON object"))?;
    if let Some(key) = obj.keys().find(|k| !MODEL_FIELDS.contains(&k.as_str())) {
        return Err(config_error(
            &format!("model.{key}"),
            format!("unknown field, expected one of {}", MODEL_FIELDS.join(", ")),
        ));
    }
    for key in ["algebra", "claims", "premiums"] {
        let sub = obj
            .get(key)
            .ok_or_else(|| config_error(&format!("model.{key}"), "missing field"))?;
        let path = format!("model.{key}");
        if key == "algebra" {
            field::<Algebra>(sub, &path)?;
        } else {
            field::<LawSpec>(sub, &path)?.build().map_err(|e| config_error(&path, e))?;
        }
    }
    for key in ["u", "lambda", "beta"] {
        if let Some(x) = obj.get(key) {
            if !x.is_number() {
                return Err(config_error(&format!("model.{key}"), "expected a number"));
            }
        }
    }
    let spec: ModelSpec = field(&v, "model")?;
    Ok((RiskModel::from_spec(&spec)?, v))
}

/// `a:b:n`: `n` equally spaced points from `a` to `b` inclusive.
pub fn parse_grid(text: &str, name: &'static str) -> Result<Vec<f64>> {
    let bad = |reason: &str| config_error(name, format!("`{text}`: {reason}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(bad("expected start:end:count"));
    };
    let a: f64 = a.trim().parse().map_err(|_| bad("start is not a number"))?;
    let b: f64 = b.trim().parse().map_err(|_| bad("end is not a number"))?;
    let n: usize = n.trim().parse().map_err(|_| bad("count is not a positive integer"))?;
    if !(a.is_finite() && b.is_finite()) || n == 0 {
        return Err(bad("need finite ends and a positive count"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    if b <= a {
        return Err(bad("end must exceed start"));
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { b } else { a + i as f64 * h }).collect())
}

/// Shortest round-trip decimal; empty for a missing value.
pub fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Serialize)]
pub struct Metadata<'a, C: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub workers: usize,
    pub config: &'a C,
    /// Parsed JSON inputs, keyed by argument name.
    pub inputs: serde_json::Map<String, Value>,
    pub outputs: Vec<String>,
    pub timings: Timings,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3", "g").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("2:2:1", "g").unwrap(), vec![2.0]);
        assert!(parse_grid("0:1", "g").is_err());
        assert!(parse_grid("1:0:4", "g").is_err());
        assert!(parse_grid("0:x:4", "g").is_err());
    }

    #[test]
    fn model_errors_name_the_field() {
        let e = parse_model(r#"{"algebra": {"kind": "max"}, "claims": {"family": "unifrom", "high": 1}, "premiums": {"family": "point", "at": 1}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("model.claims"), "{e}");
        let e = parse_model(r#"{"algebra": {"kind": "max"}, "premiums": {"family": "point", "at": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("model.claims"), "{e}");
        let e = parse_model(r#"{"algebra": {"kind": "max"}, "claims": {"family": "point", "at": 1}, "premiums": {"family": "point", "at": 1}, "lamda": 2}"#)
            .unwrap_err();
        assert!(e.to_string().contains("model.lamda"), "{e}");
        assert!(e.is_validation());
    }
}
