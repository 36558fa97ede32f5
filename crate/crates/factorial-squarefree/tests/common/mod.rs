//! Shared helpers for the integration suites: running the binary and
//! validating stdout against the schemas shipped under schemas/.
//!
//! The validator covers exactly the keyword subset those schemas use (type,
//! enum, required, properties, additionalProperties, items, and the
//! digits-only pattern) and rejects anything else, so the schemas cannot
//! silently drift ahead of what is checked here.

#![allow(dead_code)] // each integration target uses its own subset

use serde_json::Value;
use std::path::Path;
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_bin(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_factorial-squarefree"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("terminated by signal"),
        stdout: String::from_utf8(out.stdout).expect("stdout is utf-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is utf-8"),
    }
}

pub fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    serde_json::from_str(&text).expect("schema parses")
}

/// Parse stdout as JSON and validate it against the named shipped schema.
pub fn parse_validated(stdout: &str, schema_name: &str) -> Value {
    let value: Value = serde_json::from_str(stdout.trim_end()).expect("stdout is JSON");
    if let Err(e) = validate(&schema(schema_name), &value) {
        panic!("output does not match {schema_name}: {e}\n{stdout}");
    }
    value
}

pub fn validate(schema: &Value, value: &Value) -> Result<(), String> {
    check("$", schema, value)
}

fn check(path: &str, schema: &Value, value: &Value) -> Result<(), String> {
    let s = schema
        .as_object()
        .ok_or_else(|| format!("{path}: schema node must be an object"))?;
    for key in s.keys() {
        if !matches!(
            key.as_str(),
            "$schema"
                | "title"
                | "type"
                | "enum"
                | "required"
                | "properties"
                | "additionalProperties"
                | "items"
                | "pattern"
        ) {
            return Err(format!("{path}: unsupported schema keyword `{key}`"));
        }
    }

    if let Some(t) = s.get("type") {
        let allowed: Vec<&str> = match t {
            Value::String(one) => vec![one.as_str()],
            Value::Array(list) => list
                .iter()
                .map(|v| v.as_str().expect("type names are strings"))
                .collect(),
            _ => return Err(format!("{path}: malformed type clause")),
        };
        if !allowed.iter().any(|name| type_matches(name, value)) {
            return Err(format!("{path}: expected one of {allowed:?}, got {value}"));
        }
    }

    if let Some(options) = s.get("enum") {
        if !options.as_array().expect("enum is an array").contains(value) {
            return Err(format!("{path}: {value} is not one of the allowed values"));
        }
    }

    if let Some(p) = s.get("pattern") {
        assert_eq!(
            p.as_str(),
            Some("^[0-9]+$"),
            "{path}: only the digits pattern is supported"
        );
        if let Some(text) = value.as_str() {
            if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("{path}: `{text}` does not match ^[0-9]+$"));
            }
        }
    }

    if let Some(obj) = value.as_object() {
        if let Some(required) = s.get("required") {
            for name in required.as_array().expect("required is an array") {
                let name = name.as_str().expect("required names are strings");
                if !obj.contains_key(name) {
                    return Err(format!("{path}: missing required property `{name}`"));
                }
            }
        }
        let props = s.get("properties").and_then(|p| p.as_object());
        if s.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in obj.keys() {
                if props.is_none_or(|p| !p.contains_key(key)) {
                    return Err(format!("{path}: unexpected property `{key}`"));
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    check(&format!("{path}.{key}"), sub, v)?;
                }
            }
        }
    }

    if let (Some(items), Some(list)) = (s.get("items"), value.as_array()) {
        for (i, v) in list.iter().enumerate() {
            check(&format!("{path}[{i}]"), items, v)?;
        }
    }

    Ok(())
}

fn type_matches(name: &str, value: &Value) -> bool {
    match name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "integer" => value.is_i64() || value.is_u64(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        other => panic!("unsupported type name `{other}`"),
    }
}
