//! JSON output with every float written to 17 significant digits.

use serde::Serialize;
use serde_json::{Number, Value};

/// Serializes `value` as pretty JSON, rewriting every non-integer number as
/// `{:.16e}` so that floats are bit-exact and the output is byte-stable.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    fix_floats(&mut v);
    serde_json::to_string_pretty(&v)
}

/// `{:.16e}` with an explicitly signed exponent, so `1.0` reads `1.0…e+0`.
pub fn format_float(x: f64) -> String {
    let s = format!("{x:.16e}");
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

fn fix_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                return;
            }
            if let Some(x) = n.as_f64() {
                if let Ok(num) = format_float(x).parse::<Number>() {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(fix_floats),
        Value::Object(map) => map.values_mut().for_each(fix_floats),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_17_digits() {
        let s = to_json_string(&(0.1f64, 3i64, -2.5e-300f64)).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\n  3,"), "{s}");
        assert!(s.contains("-2.5000000000000000e-300"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 3.0, -2.5e-300]);
        assert_eq!(format_float(1.0), "1.0000000000000000e+0");
        assert_eq!(format_float(-3.0e20), "-3.0000000000000000e+20");
    }
}
