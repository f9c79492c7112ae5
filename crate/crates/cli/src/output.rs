//! Deterministic report rendering.
//!
//! JSON is written by walking a [`serde_json::Value`] directly: object keys
//! are already sorted (the map is a `BTreeMap`), and every float is printed
//! as `{:.16e}` (17 significant digits), so identical reports serialize to
//! identical bytes. The `table` and `csv` modes flatten the same tree.

use serde_json::Value;

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_number(n: &serde_json::Number) -> String {
    if let Some(i) = n.as_i64() {
        i.to_string()
    } else if let Some(u) = n.as_u64() {
        u.to_string()
    } else {
        fmt_f64(n.as_f64().expect("number is i64, u64, or f64"))
    }
}

fn push_escaped(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn push_indent(out: &mut String, depth: usize) {
    out.push('\n');
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn push_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&fmt_number(n)),
        Value::String(s) => push_escaped(out, s),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_indent(out, depth + 1);
                push_value(out, item, depth + 1);
            }
            push_indent(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_indent(out, depth + 1);
                push_escaped(out, k);
                out.push_str(": ");
                push_value(out, item, depth + 1);
            }
            push_indent(out, depth);
            out.push('}');
        }
    }
}

/// Pretty JSON with sorted keys and fixed-format floats.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    push_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => "null".to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => fmt_number(n),
        Value::String(s) => s.clone(),
        _ => unreachable!("flatten only passes scalars"),
    }
}

/// Depth-first `(dotted.path, scalar)` rows in key order.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut rows = Vec::new();
    walk(v, String::new(), &mut rows);
    rows
}

fn walk(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Array(items) => {
            if items.is_empty() {
                rows.push((path, "[]".to_string()));
                return;
            }
            for (i, item) in items.iter().enumerate() {
                walk(item, format!("{path}[{i}]"), rows);
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                rows.push((path, "{}".to_string()));
                return;
            }
            for (k, item) in map {
                let sub = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                walk(item, sub, rows);
            }
        }
        scalar => rows.push((path, scalar_text(scalar))),
    }
}

/// Two aligned columns.
pub fn to_table(v: &Value) -> String {
    let rows = flatten(v);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, val) in rows {
        out.push_str(&format!("{k:<width$}  {val}\n"));
    }
    out
}

/// `field,value` rows with a header.
pub fn to_csv(v: &Value) -> String {
    let mut out = String::from("field,value\n");
    for (k, val) in flatten(v) {
        let quoted = if val.contains(',') || val.contains('"') || val.contains('\n') {
            format!("\"{}\"", val.replace('"', "\"\""))
        } else {
            val
        };
        out.push_str(&format!("{k},{quoted}\n"));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Table,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, crate::CliError> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(crate::CliError::data(format!(
                "unknown output format `{other}` (expected json, table, or csv)"
            ))),
        }
    }

    pub fn render(self, v: &Value) -> String {
        match self {
            OutputFormat::Json => to_json(v),
            OutputFormat::Table => to_table(v),
            OutputFormat::Csv => to_csv(v),
        }
    }
}

/// `Value` from a finite float; panics on non-finite input since reports
/// never contain one.
pub fn num(x: f64) -> Value {
    assert!(x.is_finite(), "report value must be finite, got {x}");
    Value::from(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_print_with_seventeen_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.5), "-5.0000000000000000e-1");
        // 17 significant digits identify a double exactly.
        for x in [10.450583572185567, 1.0 / 3.0, 6.0895952829777089e0, 1e-300] {
            let printed = fmt_f64(x);
            assert_eq!(printed.parse::<f64>().unwrap(), x, "{printed}");
            let digits = printed
                .trim_start_matches('-')
                .chars()
                .take_while(|c| *c != 'e')
                .filter(char::is_ascii_digit)
                .count();
            assert_eq!(digits, 17, "{printed}");
        }
    }

    #[test]
    fn json_keys_are_sorted_and_floats_fixed() {
        let v = json!({"zeta": 1.5, "alpha": {"b": 2, "a": true}, "mid": [1.0, null]});
        let s = to_json(&v);
        let alpha = s.find("\"alpha\"").unwrap();
        let mid = s.find("\"mid\"").unwrap();
        let zeta = s.find("\"zeta\"").unwrap();
        assert!(alpha < mid && mid < zeta);
        assert!(s.contains("1.5000000000000000e0"));
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.ends_with("}\n"));
    }

    #[test]
    fn integers_stay_integers() {
        let v = json!({"n": 1000000, "x": 2.0});
        let s = to_json(&v);
        assert!(s.contains("\"n\": 1000000"));
        assert!(s.contains("\"x\": 2.0000000000000000e0"));
    }

    #[test]
    fn identical_trees_serialize_identically() {
        let build = || json!({"b": [1.25, {"k": "v"}], "a": 3usize});
        assert_eq!(to_json(&build()), to_json(&build()));
    }

    #[test]
    fn flatten_paths() {
        let v = json!({"r": {"value": 1.5, "terms": [2.0, 3.0]}, "ok": true});
        let rows = flatten(&v);
        let keys: Vec<&str> = rows.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["ok", "r.terms[0]", "r.terms[1]", "r.value"]);
    }

    #[test]
    fn csv_quotes_commas() {
        let v = json!({"msg": "a, b"});
        let s = to_csv(&v);
        assert!(s.contains("msg,\"a, b\""));
    }

    #[test]
    fn escaped_strings() {
        let v = json!({"s": "line\n\"q\"\\"});
        let s = to_json(&v);
        assert!(s.contains(r#""line\n\"q\"\\""#));
    }
}
