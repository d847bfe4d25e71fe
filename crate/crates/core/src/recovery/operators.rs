//! Torus multipliers `M_φ`, `T_{φ,k}` and the windowed operators `B_φ`, `B̃_φ`.
//!
//! Multipliers are formed in log space so families whose spectra span
//! hundreds of decades (regular Gaussians) stay finite.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{cell_extremes, l2_norm_torus, Side, TorusGrid};
use crate::kernel::{kernel_constants, Kernel};
use crate::nodes::{riesz_estimate, span_operator_norm, ExponentialBasis, NodeSet};
use crate::tolerances;

/// `ln δ_φ = ln inf_T φ̂`.
pub fn ln_torus_delta(kernel: &Kernel) -> f64 {
    if kernel.is_monotone() {
        kernel.spectrum_limit(PI, Side::Below).ln()
    } else {
        cell_extremes(kernel, &TorusGrid::scan(), 0).0.ln()
    }
}

/// `δ_φ`.
pub fn torus_delta(kernel: &Kernel) -> f64 {
    ln_torus_delta(kernel).exp()
}

/// Pointwise multipliers of one kernel on one torus grid.
#[derive(Clone, Debug)]
pub struct Multipliers {
    kernel: Kernel,
    grid: TorusGrid,
    ln_delta: f64,
}

impl Multipliers {
    pub fn new(kernel: &Kernel, grid: &TorusGrid) -> Result<Self> {
        let ln_delta = ln_torus_delta(kernel);
        if !ln_delta.is_finite() {
            return Err(Error::Domain(format!(
                "{} has δ = 0 on the torus",
                kernel.name()
            )));
        }
        Ok(Self {
            kernel: kernel.clone(),
            grid: grid.clone(),
            ln_delta,
        })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn delta(&self) -> f64 {
        self.ln_delta.exp()
    }

    /// `δ_φ / φ̂(ξ_m)`.
    pub fn m_factors(&self) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .map(|&xi| (self.ln_delta - self.kernel.ln_spectrum(xi)).exp())
            .collect()
    }

    /// `δ_φ⁻¹ φ̂(ξ_m + 2πk)`.
    pub fn t_factors(&self, k: i64) -> Vec<f64> {
        let shift = 2.0 * PI * k as f64;
        self.grid
            .nodes()
            .iter()
            .map(|&xi| (self.kernel.ln_spectrum(xi + shift) - self.ln_delta).exp())
            .collect()
    }

    /// `T` factors for `0 < |k| ≤ K`.
    pub fn t_table(&self, depth: usize) -> Vec<(i64, Vec<f64>)> {
        let k = depth as i64;
        (-k..=k)
            .filter(|&j| j != 0)
            .map(|j| (j, self.t_factors(j)))
            .collect()
    }

    pub fn apply_m(&self, values: &[C64]) -> Vec<C64> {
        scale(&self.m_factors(), values)
    }

    pub fn apply_t(&self, k: i64, values: &[C64]) -> Vec<C64> {
        scale(&self.t_factors(k), values)
    }
}

pub(crate) fn scale(factors: &[f64], values: &[C64]) -> Vec<C64> {
    factors
        .iter()
        .zip(values)
        .map(|(f, v)| {
            if *f == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                v * *f
            }
        })
        .collect()
}

fn check_len(values: &[C64], grid: &TorusGrid) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::Usage(format!(
            "{} values for a torus grid of {} nodes",
            values.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// `M_φ g = (δ_φ/φ̂) g`.
pub fn apply_m(kernel: &Kernel, grid: &TorusGrid, values: &[C64]) -> Result<Vec<C64>> {
    check_len(values, grid)?;
    Ok(Multipliers::new(kernel, grid)?.apply_m(values))
}

/// `T_{φ,k} g = δ_φ⁻¹ φ̂(· + 2πk) g`.
pub fn apply_t(kernel: &Kernel, k: i64, grid: &TorusGrid, values: &[C64]) -> Result<Vec<C64>> {
    check_len(values, grid)?;
    Ok(Multipliers::new(kernel, grid)?.apply_t(k, values))
}

/// `Σ_{0<|k|≤K} ‖T_{φ,k} g‖`.
pub fn t_sum(multipliers: &Multipliers, values: &[C64], depth: usize) -> f64 {
    t_sum_with(&multipliers.t_table(depth), multipliers.grid(), values)
}

/// [`t_sum`] with the factors from [`Multipliers::t_table`].
pub fn t_sum_with(table: &[(i64, Vec<f64>)], grid: &TorusGrid, values: &[C64]) -> f64 {
    table
        .iter()
        .map(|(_, t)| l2_norm_torus(&scale(t, values), grid).expect("lengths match"))
        .sum()
}

/// Truncation depth for off-center sums: the joint support when bounded,
/// otherwise [`DEFAULT_DEPTH`].
pub fn sum_depth<'a>(kernels: impl IntoIterator<Item = &'a Kernel>) -> usize {
    let mut depth = 1;
    for k in kernels {
        match k.support().cells() {
            Some(n) => depth = depth.max(n),
            None => return DEFAULT_DEPTH,
        }
    }
    depth
}

/// Cells kept in off-center sums of unbounded spectra.
pub const DEFAULT_DEPTH: usize = 16;

/// Coefficients over the `𝒴` window of `Σ_{0<|k|≤K} A_𝒴^{*k} T_{φ,k} A_𝒳^k c`.
pub fn apply_b_coefficients(
    multipliers: &Multipliers,
    source: &ExponentialBasis,
    target: &ExponentialBasis,
    coefficients: &[C64],
    depth: usize,
) -> Vec<C64> {
    b_terms(multipliers, source, target, coefficients, depth)
        .into_iter()
        .fold(
            vec![C64::new(0.0, 0.0); target.nodes().len()],
            |mut acc, (_, t)| {
                acc.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
                acc
            },
        )
}

/// The individual `k` terms of [`apply_b_coefficients`].
pub fn b_terms(
    multipliers: &Multipliers,
    source: &ExponentialBasis,
    target: &ExponentialBasis,
    coefficients: &[C64],
    depth: usize,
) -> Vec<(i64, Vec<C64>)> {
    let k = depth as i64;
    (-k..=k)
        .filter(|&j| j != 0)
        .map(|j| {
            let image = multipliers.apply_t(j, &source.prolong(coefficients, j));
            (j, target.adjoint_prolong(&image, j))
        })
        .collect()
}

/// `B_φ` on an `𝒳`-coefficient vector, sampled on the grid of the bases.
pub fn apply_b(
    kernel: &Kernel,
    source: &ExponentialBasis,
    target: &ExponentialBasis,
    coefficients: &[C64],
    depth: usize,
) -> Result<Vec<C64>> {
    if coefficients.len() != source.nodes().len() {
        return Err(Error::Usage(format!(
            "{} coefficients for a window of {} nodes",
            coefficients.len(),
            source.nodes().len()
        )));
    }
    let m = Multipliers::new(kernel, source.grid())?;
    Ok(target.prolong(
        &apply_b_coefficients(&m, source, target, coefficients, depth),
        0,
    ))
}

/// Realized coefficient matrix of the windowed operator.
pub fn b_matrix(
    multipliers: &Multipliers,
    source: &ExponentialBasis,
    target: &ExponentialBasis,
    depth: usize,
) -> DMatrix<C64> {
    let n = source.nodes().len();
    let mut m = DMatrix::<C64>::zeros(target.nodes().len(), n);
    for j in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[j] = C64::new(1.0, 0.0);
        let col = apply_b_coefficients(multipliers, source, target, &e, depth);
        m.set_column(j, &DVector::from_vec(col));
    }
    m
}

/// Realized norms of `B_φ`, `B̃_φ` against `C_𝒴²C_𝒳²C_φ` and `C_𝒴⁴C_φ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BOperatorCheck {
    pub depth: usize,
    pub c_phi: f64,
    pub c_x: f64,
    pub c_y: f64,
    pub norm_b: f64,
    pub bound_b: f64,
    pub norm_b_tilde: f64,
    pub bound_b_tilde: f64,
    pub slack: f64,
}

impl BOperatorCheck {
    pub fn holds(&self) -> bool {
        self.norm_b <= self.slack * self.bound_b
            && self.norm_b_tilde <= self.slack * self.bound_b_tilde
    }
}

pub fn b_operator_check(
    kernel: &Kernel,
    x: &NodeSet,
    y: &NodeSet,
    depth: usize,
) -> Result<BOperatorCheck> {
    let grid = TorusGrid::quadrature();
    let bx = ExponentialBasis::new(x, &grid)?;
    let by = ExponentialBasis::new(y, &grid)?;
    let m = Multipliers::new(kernel, &grid)?;
    let c_phi = kernel_constants(kernel)?.c;
    let c_x = riesz_estimate(x)?.c;
    let c_y = riesz_estimate(y)?.c;
    let norm_b = span_operator_norm(&b_matrix(&m, &bx, &by, depth), &bx, &by);
    let norm_b_tilde = span_operator_norm(&b_matrix(&m, &by, &by, depth), &by, &by);
    Ok(BOperatorCheck {
        depth,
        c_phi,
        c_x,
        c_y,
        norm_b,
        bound_b: c_y * c_y * c_x * c_x * c_phi,
        norm_b_tilde,
        bound_b_tilde: c_y.powi(4) * c_phi,
        slack: tolerances::B_BOUND_SLACK,
    })
}
