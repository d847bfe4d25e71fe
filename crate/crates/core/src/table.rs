//! CSV formatting shared by the table writers.

/// Shortest round-trip form, switching to exponent notation outside
/// `[1e-5, 1e16)`.
pub fn float(v: f64) -> String {
    let a = v.abs();
    if v.is_finite() && a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// One CSV line, newline included.
pub fn row(values: &[f64]) -> String {
    let mut out = values
        .iter()
        .map(|&v| float(v))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for v in [
            0.0,
            1.0,
            -2.5,
            1e-300,
            1.054660599770231e268,
            3.0e-6,
            123456.789,
            f64::NAN,
        ] {
            let s = float(v);
            let back: f64 = s.parse().unwrap();
            assert!(back == v || (v.is_nan() && back.is_nan()), "{v} -> {s}");
        }
        assert_eq!(float(1e20), "1e20");
        assert_eq!(float(0.25), "0.25");
        assert_eq!(row(&[1.0, 2e-7]), "1,2e-7\n");
    }
}
