//! Diff-stable JSON output: every float is rounded to 12 significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SIG_DIGITS: usize = 12;

/// `x` rounded to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = serde_json::Number::from_f64(round_sig(x, SIG_DIGITS)) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// JSON value of `item` with rounded floats.
pub fn stable_value<T: Serialize>(item: &T) -> Result<Value> {
    let mut v = serde_json::to_value(item).map_err(|e| Error::Validation(format!("serialization failed: {e}")))?;
    round_value(&mut v);
    Ok(v)
}

/// Single-line JSON with rounded floats.
pub fn stable_json<T: Serialize>(item: &T) -> Result<String> {
    Ok(stable_value(item)?.to_string())
}

/// Pretty-printed JSON with rounded floats.
pub fn stable_json_pretty<T: Serialize>(item: &T) -> Result<String> {
    serde_json::to_string_pretty(&stable_value(item)?).map_err(|e| Error::Validation(e.to_string()))
}

/// One JSON line per item.
pub fn stable_jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&stable_json(item)?);
        out.push('\n');
    }
    Ok(out)
}
