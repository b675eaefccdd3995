#![allow(dead_code)]

use std::process::{Command, Output};

use serde_json::Value;

pub const MONOMIAL: &str = "builtin:monomial,n=3,c=2";

pub fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn bii(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bii"))
        .args(args)
        .env_remove("EXPLAIN_EXACT_CAP")
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Runs and parses stdout, panicking with stderr on failure.
pub fn json(args: &[&str]) -> Value {
    let out = bii(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// `(subset, value)` pairs of a report object.
pub fn entries(report: &Value) -> Vec<(Vec<u64>, f64)> {
    report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let subset = e["subset"]
                .as_array()
                .unwrap()
                .iter()
                .map(|i| i.as_u64().unwrap())
                .collect();
            (subset, e["value"].as_f64().unwrap())
        })
        .collect()
}

pub fn shipped_schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Validates `doc` against `schema`, supporting the keywords the shipped schema uses.
pub fn validate(root: &Value, schema: &Value, doc: &Value, path: &str) -> Result<(), String> {
    let obj = match schema {
        Value::Bool(true) => return Ok(()),
        Value::Bool(false) => return Err(format!("{path}: rejected by false schema")),
        Value::Object(o) => o,
        _ => return Err(format!("{path}: malformed schema")),
    };
    for (key, rule) in obj {
        match key.as_str() {
            "$schema" | "$id" | "$defs" | "title" | "description" => {}
            "$ref" => {
                let name = rule
                    .as_str()
                    .unwrap()
                    .strip_prefix("#/$defs/")
                    .expect("local refs only");
                validate(root, &root["$defs"][name], doc, path)?;
            }
            "type" => {
                let ok = |t: &str| match t {
                    "object" => doc.is_object(),
                    "array" => doc.is_array(),
                    "string" => doc.is_string(),
                    "number" => doc.is_number(),
                    "integer" => doc.is_u64() || doc.is_i64(),
                    "boolean" => doc.is_boolean(),
                    "null" => doc.is_null(),
                    other => panic!("unknown type {other}"),
                };
                let pass = match rule {
                    Value::String(t) => ok(t),
                    Value::Array(ts) => ts.iter().any(|t| ok(t.as_str().unwrap())),
                    _ => panic!("bad type rule"),
                };
                if !pass {
                    return Err(format!("{path}: expected {rule}, got {doc}"));
                }
            }
            "const" if doc != rule => return Err(format!("{path}: expected {rule}")),
            "const" => {}
            "enum" => {
                if !rule.as_array().unwrap().contains(doc) {
                    return Err(format!("{path}: {doc} not in {rule}"));
                }
            }
            "minimum" => {
                if let Some(x) = doc.as_f64() {
                    if x < rule.as_f64().unwrap() {
                        return Err(format!("{path}: {x} below {rule}"));
                    }
                }
            }
            "minItems" => {
                if let Some(a) = doc.as_array() {
                    if (a.len() as u64) < rule.as_u64().unwrap() {
                        return Err(format!("{path}: fewer than {rule} items"));
                    }
                }
            }
            "required" => {
                if let Some(o) = doc.as_object() {
                    for name in rule.as_array().unwrap() {
                        if !o.contains_key(name.as_str().unwrap()) {
                            return Err(format!("{path}: missing {name}"));
                        }
                    }
                }
            }
            "properties" => {
                if let Some(o) = doc.as_object() {
                    for (name, sub) in rule.as_object().unwrap() {
                        if let Some(v) = o.get(name) {
                            validate(root, sub, v, &format!("{path}/{name}"))?;
                        }
                    }
                }
            }
            "additionalProperties" => {
                if let Some(o) = doc.as_object() {
                    let known = obj.get("properties").and_then(Value::as_object);
                    for (name, v) in o {
                        if known.is_none_or(|k| !k.contains_key(name)) {
                            validate(root, rule, v, &format!("{path}/{name}"))?;
                        }
                    }
                }
            }
            "items" => {
                if let Some(a) = doc.as_array() {
                    for (i, v) in a.iter().enumerate() {
                        validate(root, rule, v, &format!("{path}/{i}"))?;
                    }
                }
            }
            "oneOf" => {
                let passing = rule
                    .as_array()
                    .unwrap()
                    .iter()
                    .filter(|s| validate(root, s, doc, path).is_ok())
                    .count();
                if passing != 1 {
                    return Err(format!("{path}: matches {passing} oneOf branches"));
                }
            }
            other => panic!("validator does not support keyword {other}"),
        }
    }
    Ok(())
}

pub fn validate_shipped(doc: &Value) -> Result<(), String> {
    let schema = shipped_schema();
    validate(&schema, &schema, doc, "")
}
