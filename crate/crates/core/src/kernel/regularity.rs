use serde::{Deserialize, Serialize};

use super::Kernel;
use crate::error::{Error, Result};
use crate::fourier::{cell_extremes, Side, TorusGrid};
use crate::tolerances;

/// Constants of conditions (A1)/(A2) for one spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// `inf_T ψ̂`.
    pub delta: f64,
    /// `Σ_{|k|≤K} ‖ψ̂(· + 2πk)‖_{L∞(T)}`.
    pub amalgam_full: f64,
    /// Same sum without `k = 0`.
    pub amalgam_offcenter: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Envelope bound on the cells `|k| > K`.
    pub tail_bound: f64,
    pub cells_used: usize,
    pub grid_points_per_cell: usize,
    #[serde(rename = "pass_A1")]
    pub pass_a1: bool,
    #[serde(rename = "pass_A2")]
    pub pass_a2: bool,
}

fn scan_grid(points: usize) -> Result<TorusGrid> {
    if points < 2 {
        return Err(Error::Range(format!(
            "regularity scan needs M >= 2 points per cell, got {points}"
        )));
    }
    TorusGrid::uniform((points.max(8) + 1) & !1)
}

/// Closed-cell sups `‖ψ̂(· + 2πk)‖_{L∞(T)}` for `k = -K..=K`.
pub fn cell_sup_norms(kernel: &Kernel, cells: usize, points: usize) -> Result<Vec<f64>> {
    let grid = scan_grid(points)?;
    let k = cells as i64;
    Ok((-k..=k)
        .map(|j| cell_extremes(kernel, &grid, j).1)
        .collect())
}

/// Grid estimate of `δ`, the cell sups and the amalgam sums.
///
/// Never fails on a bad kernel; failures show up in the pass flags. Only
/// out-of-range `K`/`M` are rejected.
pub fn regularity_report(kernel: &Kernel, cells: usize, points: usize) -> Result<RegularityReport> {
    if cells == 0 {
        return Err(Error::Range("regularity scan needs K >= 1".into()));
    }
    let grid = scan_grid(points)?;
    let k = cells as i64;
    let mut lowest = f64::INFINITY;
    let mut sups = Vec::with_capacity(2 * cells + 1);
    let mut delta = f64::NAN;
    let mut negative = false;
    for j in -k..=k {
        let (lo, hi) = cell_extremes(kernel, &grid, j);
        // cell_extremes works on |ψ̂|; look for sign problems separately
        negative |= grid.nodes().iter().any(|&xi| {
            let v = kernel.spectrum(xi + 2.0 * std::f64::consts::PI * j as f64);
            v < -tolerances::NONNEGATIVE_SLACK * hi.max(1.0)
        });
        lowest = lowest.min(lo);
        sups.push(hi);
        if j == 0 {
            delta = lo;
        }
    }
    if kernel.is_monotone() {
        let edge = kernel.spectrum_limit(std::f64::consts::PI, Side::Below);
        assert!(
            (delta - edge).abs() <= 1e-12 * edge.abs().max(f64::MIN_POSITIVE),
            "grid minimum {delta} disagrees with the edge value {edge} of a monotone spectrum"
        );
    }
    let amalgam_full: f64 = sups.iter().sum();
    let amalgam_offcenter: f64 = sups
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != cells)
        .map(|(_, s)| s)
        .sum();
    let tail_bound = kernel.tail_bound(cells);
    let pass_a1 = !negative && lowest >= 0.0;
    let pass_a2 = delta > 0.0
        && amalgam_full.is_finite()
        && tail_bound.is_finite()
        && tail_bound <= tolerances::AMALGAM_TAIL_REL * amalgam_full;
    Ok(RegularityReport {
        delta,
        amalgam_full,
        amalgam_offcenter,
        c: amalgam_offcenter / delta,
        tail_bound,
        cells_used: cells,
        grid_points_per_cell: grid.len(),
        pass_a1,
        pass_a2,
    })
}

/// Constants entering the sampling, coefficient and norm bounds.
///
/// Amalgam quantities include the envelope tail, so they are upper bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    pub delta: f64,
    /// `‖ψ̂‖_{L∞(T)}`.
    pub torus_sup: f64,
    /// `‖ψ̂‖_{W(L∞,ℓ1)}`.
    pub amalgam: f64,
    /// `C_ψ`.
    pub c: f64,
    pub cells: usize,
}

/// Constants from a scan deep enough that the tail is below `1e-6` of the
/// amalgam norm (or the full support for bandlimited spectra).
pub fn kernel_constants(kernel: &Kernel) -> Result<KernelConstants> {
    let cells = match kernel.support().cells() {
        Some(n) => n.max(1),
        None => {
            let scale = kernel.sup_norm();
            [4usize, 8, 16, 32, 64, 128, 256, 512]
                .into_iter()
                .find(|&k| kernel.tail_bound(k) <= 1e-6 * scale)
                .unwrap_or(512)
        }
    };
    let report = regularity_report(kernel, cells, tolerances::TORUS_POINTS)?;
    let sups = cell_sup_norms(kernel, 0, tolerances::TORUS_POINTS)?;
    Ok(KernelConstants {
        delta: report.delta,
        torus_sup: sups[0],
        amalgam: report.amalgam_full + report.tail_bound,
        c: (report.amalgam_offcenter + report.tail_bound) / report.delta,
        cells,
    })
}
