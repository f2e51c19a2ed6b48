//! Deterministic JSON artifact writing and field-path-aware parsing.
//!
//! Artifacts are pretty-printed with sorted keys (serde_json's default map
//! is a BTreeMap) and floats rendered with 17 significant digits, which is
//! enough to round-trip any finite f64 bit-exactly. Repeated runs of the
//! same pipeline therefore produce byte-identical files.

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Render a value as a deterministic pretty-printed JSON document.
pub fn to_json_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"))
        }
        Value::Array(items) => write_array(out, items, indent),
        Value::Object(map) => write_object(out, map, indent),
    }
}

fn write_array(out: &mut String, items: &[Value], indent: usize) {
    if items.is_empty() {
        out.push_str("[]");
        return;
    }
    // Scalar-only arrays (matrix rows, phase lists) stay on one line.
    if items.iter().all(|v| !matches!(v, Value::Array(_) | Value::Object(_))) {
        out.push('[');
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_value(out, item, indent);
        }
        out.push(']');
        return;
    }
    out.push_str("[\n");
    for (i, item) in items.iter().enumerate() {
        push_indent(out, indent + 1);
        write_value(out, item, indent + 1);
        if i + 1 < items.len() {
            out.push(',');
        }
        out.push('\n');
    }
    push_indent(out, indent);
    out.push(']');
}

fn write_object(out: &mut String, map: &Map<String, Value>, indent: usize) {
    if map.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    let len = map.len();
    for (i, (key, val)) in map.iter().enumerate() {
        push_indent(out, indent + 1);
        out.push_str(&serde_json::to_string(key).expect("key serialization"));
        out.push_str(": ");
        write_value(out, val, indent + 1);
        if i + 1 < len {
            out.push(',');
        }
        out.push('\n');
    }
    push_indent(out, indent);
    out.push('}');
}

fn push_indent(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// 17 significant digits: the shortest count that round-trips every f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_str(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse("<document>", e.to_string()))
}

// ---- field-path-aware extraction helpers ----

pub fn as_object<'a>(value: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::parse(field, "expected an object"))
}

pub fn get<'a>(map: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    map.get(key)
        .ok_or_else(|| Error::parse(join(ctx, key), "missing field"))
}

pub fn get_usize(map: &Map<String, Value>, key: &str, ctx: &str) -> Result<usize> {
    let v = get(map, key, ctx)?;
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| Error::parse(join(ctx, key), "expected a non-negative integer"))
}

pub fn get_i64(map: &Map<String, Value>, key: &str, ctx: &str) -> Result<i64> {
    let v = get(map, key, ctx)?;
    v.as_i64()
        .ok_or_else(|| Error::parse(join(ctx, key), "expected an integer"))
}

pub fn get_f64(map: &Map<String, Value>, key: &str, ctx: &str) -> Result<f64> {
    let v = get(map, key, ctx)?;
    let x = v
        .as_f64()
        .ok_or_else(|| Error::parse(join(ctx, key), "expected a number"))?;
    if !x.is_finite() {
        return Err(Error::parse(join(ctx, key), "expected a finite number"));
    }
    Ok(x)
}

pub fn get_bool(map: &Map<String, Value>, key: &str, ctx: &str) -> Result<bool> {
    let v = get(map, key, ctx)?;
    v.as_bool()
        .ok_or_else(|| Error::parse(join(ctx, key), "expected a boolean"))
}

pub fn get_str<'a>(map: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a str> {
    let v = get(map, key, ctx)?;
    v.as_str()
        .ok_or_else(|| Error::parse(join(ctx, key), "expected a string"))
}

pub fn get_array<'a>(map: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Vec<Value>> {
    let v = get(map, key, ctx)?;
    v.as_array()
        .ok_or_else(|| Error::parse(join(ctx, key), "expected an array"))
}

pub fn elem_f64(v: &Value, field: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::parse(field, "expected a number"))?;
    if !x.is_finite() {
        return Err(Error::parse(field, "expected a finite number"));
    }
    Ok(x)
}

pub fn join(ctx: &str, key: &str) -> String {
    if ctx.is_empty() {
        key.to_string()
    } else {
        format!("{ctx}.{key}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_trip_bit_exactly() {
        for &x in &[0.1, -0.1, 1.0 / 3.0, 2.0_f64.sqrt(), 1e-308, -0.0, 6.02e23] {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn keys_are_sorted_and_output_is_stable() {
        let v = json!({"zeta": 1, "alpha": [1.5, 2], "mid": {"b": true, "a": null}});
        let s1 = to_json_string(&v);
        let s2 = to_json_string(&v);
        assert_eq!(s1, s2);
        let alpha = s1.find("\"alpha\"").unwrap();
        let mid = s1.find("\"mid\"").unwrap();
        let zeta = s1.find("\"zeta\"").unwrap();
        assert!(alpha < mid && mid < zeta);
    }

    #[test]
    fn missing_field_names_the_path() {
        let v = json!({"dim": 2});
        let obj = as_object(&v, "unitary").unwrap();
        let err = get_f64(obj, "tol", "unitary").unwrap_err();
        assert!(err.to_string().contains("unitary.tol"), "{err}");
    }
}
