//! Recovery conditions and α-sweeps.
//!
//! A family `(φ_α)` recovers `f ∈ V(ψ, 𝒳)` from its samples on `𝒴` when the
//! interpolants `I_{φ_α}^𝒴 f` converge to `f`. Finite sweeps cannot certify
//! limits, so every limit statement here is a trend plus a threshold.

mod conditions;
mod family;
mod operators;
mod sweep;

use serde::{Deserialize, Serialize};

pub use conditions::{
    check_conditions, prime_statistics, test_vectors, AlphaConditions, ConditionReport,
    PrimeStatistics, RANDOM_TEST_VECTORS,
};
pub use family::{BaseFamily, Construction, FamilySpec, PRESETS, PRESET_ALPHAS, PRESET_KADEC_EPS};
pub use operators::{
    apply_b, apply_b_coefficients, apply_m, apply_t, b_matrix, b_operator_check, b_terms,
    ln_torus_delta, sum_depth, t_sum, t_sum_with, torus_delta, BOperatorCheck, Multipliers,
    DEFAULT_DEPTH,
};
pub use sweep::{
    counterexample_run, fourier_side_sample_check, half_shift_conditioning, lattice_symbol_stats,
    random_recovery_sweep, recovery_sweep, CounterexampleReport, HalfShiftRow, HalfShiftTable,
    Route, RowError, RowValues, SampleCheck, SweepReport, SweepRow, CONTROL_STABLE_REL,
    COUNTEREXAMPLE_FLOOR, COUNTEREXAMPLE_NOISE, SWEEP_CSV_HEADER,
};

/// Trend-and-threshold verdict on a series indexed by `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub condition: String,
    pub values: Vec<f64>,
    pub threshold: f64,
    /// Threshold applies to `last/first` rather than `last`.
    pub relative: bool,
    pub final_below: bool,
    pub nonincreasing_top_half: bool,
    pub pass: bool,
}

/// `a[i+1] < a[i]` throughout.
pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Nonincreasing over the last `⌈n/2⌉` entries, up to rounding.
pub fn nonincreasing_top_half(values: &[f64]) -> bool {
    values[values.len() / 2..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12))
}

pub fn trend_verdict(condition: &str, values: &[f64], threshold: f64, relative: bool) -> Verdict {
    let last = *values.last().unwrap_or(&f64::NAN);
    let first = *values.first().unwrap_or(&f64::NAN);
    let final_below = if relative {
        last == 0.0 || last <= threshold * first
    } else {
        last <= threshold
    };
    let nonincreasing = nonincreasing_top_half(values);
    Verdict {
        condition: condition.into(),
        values: values.to_vec(),
        threshold,
        relative,
        final_below,
        nonincreasing_top_half: nonincreasing,
        pass: final_below && nonincreasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        let v = trend_verdict("x", &[1.0, 0.5, 0.1, 1e-4], 1e-3, true);
        assert!(v.pass);
        let v = trend_verdict("x", &[1.0, 0.5, 0.1, 0.2], 1e-3, true);
        assert!(!v.nonincreasing_top_half && !v.pass);
        let v = trend_verdict("x", &[0.0, 0.0, 0.0], 1e-3, true);
        assert!(v.pass);
        let v = trend_verdict("x", &[1.0, 1.0, 1.0], 1e-3, false);
        assert!(v.nonincreasing_top_half && !v.pass);
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]) && !strictly_decreasing(&[3.0, 3.0]));
    }
}
