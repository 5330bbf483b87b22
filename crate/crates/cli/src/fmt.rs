//! Deterministic number formatting for CSV output: fixed decimal notation
//! with six significant digits, '.' separator, no exponent form.

pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // values below double-precision resolution of the quantities reported
    // here are accumulated rounding noise
    if x.abs() < 1e-15 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

/// Integers print without a decimal point; everything else gets six
/// significant digits.
pub fn int_or_sig6(x: f64) -> String {
    if x.is_finite() && x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        sig6(x)
    }
}
