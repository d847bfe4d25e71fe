//! Modified Bessel function of the second kind, `K_ν(z)`, for real order.
//!
//! Uses `K_ν(z) = ∫₀^∞ e^{-z cosh t} cosh(νt) dt`. The integrand is smooth
//! and decays doubly exponentially, so the trapezoid rule converges
//! geometrically; the step is halved until two passes agree.

use crate::error::{Error, Result};
use crate::tolerances;

/// Validated order range.
pub const ORDER_RANGE: (f64, f64) = (0.5, 40.0);
/// Validated argument upper limit.
pub const ARG_MAX: f64 = 100.0;

/// `K_ν(z)` on the validated range `ν ∈ [0.5, 40]`, `z ∈ (0, 100]`.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    if !(nu >= ORDER_RANGE.0 && nu <= ORDER_RANGE.1) {
        return Err(Error::Range(format!(
            "bessel_k order {nu} outside [0.5, 40]"
        )));
    }
    if !(z > 0.0 && z <= ARG_MAX) {
        return Err(Error::Range(format!(
            "bessel_k argument {z} outside (0, 100]"
        )));
    }
    Ok(ln_bessel_k(nu, z).exp())
}

/// `ln K_ν(z)` for any `ν ≥ 0`, `z > 0`; no range check.
pub fn ln_bessel_k(nu: f64, z: f64) -> f64 {
    let nu = nu.abs();
    // Peak of ln(integrand) ≈ -z cosh t + νt sits near sinh t = ν/z.
    let peak = (nu / z).asinh();
    let exponent = |t: f64| -z * t.cosh() + ln_cosh(nu * t);
    let shift = exponent(peak).max(exponent(0.0));

    let sum_with_step = |h: f64| -> f64 {
        let mut total = 0.5 * (exponent(0.0) - shift).exp();
        let mut m = 1usize;
        loop {
            let t = h * m as f64;
            let term = (exponent(t) - shift).exp();
            total += term;
            if t > peak && term < 1e-18 * total {
                break;
            }
            m += 1;
        }
        h * total
    };

    // Width of the peak region sets the starting step.
    let curvature = z * peak.cosh() - nu * nu * (1.0 - (nu * peak).tanh().powi(2));
    let width = 1.0 / curvature.abs().max(1e-300).sqrt();
    let mut h = width.min(0.5);
    let mut prev = sum_with_step(h);
    for _ in 0..40 {
        h *= 0.5;
        let next = sum_with_step(h);
        if (next - prev).abs() <= tolerances::BESSEL_REL * next {
            return shift + next.ln();
        }
        prev = next;
    }
    shift + prev.ln()
}

fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}
