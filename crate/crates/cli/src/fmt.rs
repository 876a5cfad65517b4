//! Deterministic numeric formatting for CSV output: 12 significant digits,
//! scientific notation, with divergences spelled `inf`/`-inf`.

pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000000000e0".into(); // normalizes −0
    }
    format!("{x:.11e}")
}
