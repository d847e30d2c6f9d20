//! Deterministic numeric formatting for emitted reports.
//!
//! Every float that reaches a report file is rounded to 9 significant
//! digits first, then printed in Rust's shortest round-trip form. Both
//! steps are exact and platform-independent, so identical analyses produce
//! byte-identical files everywhere.

use serde_json::Value;

/// Round to 9 significant decimal digits (identity for zero, infinities,
/// and NaN). Negative zero normalizes to zero.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("scientific notation round-trips")
}

/// Shortest decimal text of the 9-significant-digit rounding.
pub fn fmt_sig9(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    format!("{}", round_sig9(x))
}

/// JSON number carrying the rounded value; non-finite maps to null.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig9(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}
