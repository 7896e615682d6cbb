use std::io::Write;

use affrank::Error;
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;
pub const EXIT_FALSIFIED: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } | Error::LrkBudgetExceeded { .. } | Error::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        Error::TheoremFalsified { .. } => EXIT_FALSIFIED,
        _ => EXIT_PRECONDITION,
    }
}

pub fn error_json(e: &Error) -> Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    match e {
        Error::LrkBudgetExceeded { points, budget, upper_bound } => {
            v["points"] = json!(points.to_string());
            v["budget"] = json!(budget);
            v["upper_bound"] = json!(upper_bound);
        }
        Error::BudgetExceeded { needed, budget, .. } => {
            v["needed"] = json!(needed.to_string());
            v["budget"] = json!(budget);
        }
        Error::TheoremFalsified { statement, dump } => {
            v["statement"] = json!(statement);
            v["dump"] = json!(dump);
        }
        _ => {}
    }
    v
}

pub fn report_error(e: &Error) -> u8 {
    let _ = writeln!(std::io::stderr(), "{}", error_json(e));
    exit_code(e)
}

pub fn usage_error(msg: &str) {
    let _ = writeln!(std::io::stderr(), "{}", json!({ "error": "usage", "message": msg }));
}

/// Writes `value` as one line of compact JSON, or as a flattened
/// `key  value` table.
pub fn emit(value: &Value, table: bool) {
    let mut out = std::io::stdout().lock();
    if table {
        let mut rows = Vec::new();
        flatten("", value, &mut rows);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
    } else {
        let _ = writeln!(out, "{value}");
    }
}

fn is_scalar_array(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_object() && (!x.is_array() || is_scalar_array(x))),
        _ => false,
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(items) if !is_scalar_array(v) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_nested() {
        let mut rows = Vec::new();
        flatten("", &json!({"a": 1, "b": {"c": [1, 2]}, "d": [{"e": "x"}]}), &mut rows);
        assert_eq!(
            rows,
            vec![
                ("a".into(), "1".into()),
                ("b.c".into(), "[1,2]".into()),
                ("d[0].e".into(), "x".into())
            ]
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::NotExtremal("x".into())), EXIT_PRECONDITION);
        assert_eq!(exit_code(&Error::Inconclusive { what: "s".into(), spent: 1, budget: 1 }), EXIT_INCONCLUSIVE);
        assert_eq!(
            exit_code(&Error::TheoremFalsified { statement: "s".into(), dump: "d".into() }),
            EXIT_FALSIFIED
        );
        assert_eq!(EXIT_OK, 0);
        assert_eq!(EXIT_USAGE, 1);
    }
}
