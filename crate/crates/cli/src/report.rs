//! JSON values with fixed-precision numbers.

use serde_json::{Number, Value};
use thermoflux::curve::format_significant;

pub const DIGITS: usize = 17;

/// A number with 17 significant digits; infinities become `"inf"`/`"-inf"`.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::String(format_significant(v, DIGITS));
    }
    let text = format_significant(v, DIGITS);
    match text.parse::<Number>() {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(text),
    }
}

pub fn nums(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&v| num(v)).collect())
}

pub fn indices(values: &[usize]) -> Value {
    Value::Array(values.iter().map(|&v| Value::from(v)).collect())
}

pub fn render(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable value");
    out.push('\n');
    out
}
