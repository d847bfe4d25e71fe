//! Lattice cardinal functions `L̂_φ = (2π)^{-1/2} φ̂ / Σ_j φ̂(· + 2πj)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{
    l2_norm_line, reduce_to_torus, LineGrid, Side, SpectralTable, TorusGrid, INV_SQRT_2PI,
};
use crate::kernel::{
    kernel_constants, ln_periodized, regularity_report, Decay, Family, Kernel, RegularityReport,
};
use crate::tolerances;

/// Smallest depth used for kernels with unbounded spectral support.
const MIN_DEPTH: usize = 4;
/// Depth cap for envelope-driven choices.
const MAX_DEPTH: usize = 64;
/// Cells per unit of Poisson shape.
const POISSON_DEPTH_PER_ALPHA: usize = 32;
/// Relative size below which lattice-series terms are dropped.
const SERIES_CUTOFF: f64 = 1e-17;
/// Torus points for the lattice-series coefficients.
const SERIES_POINTS: usize = 4096;

/// Periodization depth for `base`: exact for bandlimited spectra, otherwise
/// deep enough that the dropped cells are `< 1e-12` of the symbol minimum.
pub fn cardinal_depth(base: &Kernel) -> usize {
    if let Some(n) = base.support().cells() {
        return n.max(1);
    }
    if let Some(alpha) = poisson_shape(base) {
        return POISSON_DEPTH_PER_ALPHA * alpha.max(1.0).ceil() as usize;
    }
    let grid = TorusGrid::scan();
    let floor = grid
        .nodes()
        .iter()
        .map(|&xi| ln_periodized(base, xi, 2))
        .fold(f64::INFINITY, f64::min)
        .exp();
    (MIN_DEPTH..=MAX_DEPTH)
        .find(|&k| base.tail_bound(k) <= 1e-12 * floor)
        .unwrap_or(MAX_DEPTH)
}

/// Effective `α` of a (possibly dilated) Poisson kernel.
fn poisson_shape(kernel: &Kernel) -> Option<f64> {
    match kernel.family() {
        Family::Poisson { alpha } => Some(*alpha),
        Family::Dilated { base, alpha } => poisson_shape(base).map(|a| a * alpha),
        _ => None,
    }
}

/// `(2π)^{-1/2} φ̂(ξ) / Σ_{|k|≤K} φ̂(ξ + 2πk)`, zero beyond `(2K+1)π`.
pub fn cardinal_spectrum(base: &Kernel, xi: f64, depth: usize) -> Result<f64> {
    let ln_sigma = ln_periodized(base, reduce_to_torus(xi), depth);
    check_denominator(ln_sigma)?;
    Ok(Kernel::cardinal(base.clone(), depth)?.spectrum(xi))
}

fn check_denominator(ln_sigma: f64) -> Result<()> {
    if ln_sigma.is_nan() || ln_sigma == f64::NEG_INFINITY {
        return Err(Error::Degenerate(ln_sigma.exp()));
    }
    Ok(())
}

/// Quadrature window `Ξ` and total interval count `M` for [`cardinal_eval`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    #[serde(rename = "Xi")]
    pub cutoff: f64,
    #[serde(rename = "M")]
    pub points: usize,
}

impl Quadrature {
    /// `Ξ = (2K+1)π` and at least `points` intervals, rounded up so every
    /// cell edge is a node.
    pub fn aligned(depth: usize, points: usize) -> Self {
        let cells = 2 * (2 * depth + 1);
        Self {
            cutoff: (2 * depth + 1) as f64 * PI,
            points: points.div_ceil(cells) * cells,
        }
    }

    pub fn default_for(depth: usize) -> Self {
        Self::aligned(depth, tolerances::CARDINAL_POINTS)
    }
}

/// Composite Simpson rule for `L_φ` over the cells inside `Ξ`.
///
/// Each cell `T + 2πk` gets its own panel with one-sided limits at the
/// edges, so jumps on cell boundaries cost nothing and integer
/// frequencies integrate exactly.
pub fn cardinal_table(
    base: &Kernel,
    quadrature: Quadrature,
    depth: usize,
) -> Result<SpectralTable> {
    let kernel = Kernel::cardinal(base.clone(), depth)?;
    let reach = ((quadrature.cutoff / PI * (1.0 + 1e-12) - 1.0) / 2.0).floor();
    if !(reach >= 0.0) || quadrature.points < 2 {
        return Err(Error::Range(format!(
            "cardinal quadrature needs Ξ >= π and M >= 2, got Ξ={}, M={}",
            quadrature.cutoff, quadrature.points
        )));
    }
    let used = (reach as usize).min(depth);
    if used < depth {
        let probe = TorusGrid::uniform(64)?;
        let mass: f64 = (used + 1..=depth)
            .map(|k| 2.0 * 2.0 * PI * crate::fourier::cell_sup(&kernel, &probe, k as i64))
            .sum();
        let estimate = INV_SQRT_2PI * mass;
        if estimate > tolerances::INVERSE_FT_TAIL {
            return Err(Error::Accuracy {
                estimate,
                tolerance: tolerances::INVERSE_FT_TAIL,
            });
        }
    }
    let cells = 2 * used + 1;
    let panel = quadrature.points.div_ceil(cells).max(2).next_multiple_of(2);
    let h = 2.0 * PI / panel as f64;
    let k = used as i64;
    let mut freqs = Vec::with_capacity(cells * (panel + 1));
    let mut weighted = Vec::with_capacity(freqs.capacity());
    for j in -k..=k {
        let shift = 2.0 * PI * j as f64;
        for i in 0..=panel {
            let xi = if i == panel {
                shift + PI
            } else {
                shift - PI + h * i as f64
            };
            let value = match i {
                0 => kernel.spectrum_limit(xi, Side::Above),
                i if i == panel => kernel.spectrum_limit(xi, Side::Below),
                _ => kernel.spectrum(xi),
            };
            let w = match i {
                0 => 1.0,
                i if i == panel => 1.0,
                i if i % 2 == 1 => 4.0,
                _ => 2.0,
            } * h
                / 3.0;
            if value != 0.0 {
                freqs.push(xi);
                weighted.push(w * value);
            }
        }
    }
    Ok(SpectralTable::from_parts(freqs, weighted))
}

/// `L_φ(x)` from [`cardinal_table`].
pub fn cardinal_eval(base: &Kernel, x: f64, quadrature: Quadrature, depth: usize) -> Result<f64> {
    Ok(cardinal_table(base, quadrature, depth)?.eval(x))
}

/// How [`CardinalFunction::eval`] reaches space values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CardinalRoute {
    /// Cellwise Gauss–Legendre inversion of the spectrum.
    Spectral,
    /// `L = Σ_n b_n φ(· − n)` with `Σ_n b_n e^{-inξ} = (2π)^{-1/2}/σ(ξ)`.
    LatticeSeries,
}

#[derive(Clone, Debug)]
pub struct CardinalFunction {
    base: Kernel,
    depth: usize,
    kernel: Kernel,
    grid: TorusGrid,
    symbol: Vec<f64>,
    route: CardinalRoute,
    /// `b_0, b_1, …` (the series is even).
    series: Vec<f64>,
}

impl CardinalFunction {
    pub fn new(base: &Kernel) -> Result<Self> {
        Self::with_depth(base, cardinal_depth(base))
    }

    pub fn with_depth(base: &Kernel, depth: usize) -> Result<Self> {
        let kernel = Kernel::cardinal(base.clone(), depth)?;
        let grid = TorusGrid::scan();
        let mut symbol = Vec::with_capacity(grid.len());
        for &xi in grid.nodes() {
            let ln_sigma = ln_periodized(base, xi, depth);
            check_denominator(ln_sigma)?;
            symbol.push(ln_sigma.exp());
        }
        let exact = match base.support().cells() {
            Some(n) => n <= depth,
            None => {
                let floor = symbol.iter().cloned().fold(f64::INFINITY, f64::min);
                base.tail_bound(depth) <= 1e-12 * floor
            }
        };
        let lattice_ready = base.space_closed_form() && base.spatial_decay() == Decay::Exponential;
        let (route, series) = if !exact && lattice_ready {
            (CardinalRoute::LatticeSeries, lattice_series(base)?)
        } else {
            (CardinalRoute::Spectral, Vec::new())
        };
        Ok(Self {
            base: base.clone(),
            depth,
            kernel,
            grid,
            symbol,
            route,
            series,
        })
    }

    pub fn base(&self) -> &Kernel {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn route(&self) -> CardinalRoute {
        self.route
    }

    /// The cardinal function as a catalog kernel.
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// `σ_K` on the scan grid.
    pub fn symbol(&self) -> (&TorusGrid, &[f64]) {
        (&self.grid, &self.symbol)
    }

    pub fn spectrum(&self, xi: f64) -> f64 {
        self.kernel.spectrum(xi)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.route {
            CardinalRoute::Spectral => self.kernel.eval_space(x),
            CardinalRoute::LatticeSeries => {
                let mut s = self.series[0] * self.base.eval_space(x)?;
                for (n, b) in self.series.iter().enumerate().skip(1) {
                    let n = n as f64;
                    s += b * (self.base.eval_space(x - n)? + self.base.eval_space(x + n)?);
                }
                Ok(s)
            }
        }
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }

    /// `Σ_j f(j) L_φ(x − j)` over the window `j = −J..J`.
    pub fn lattice_interpolant(&self, samples: &[f64], x: f64) -> Result<f64> {
        if samples.len().is_multiple_of(2) {
            return Err(Error::Usage(format!(
                "lattice samples need an odd window, got {}",
                samples.len()
            )));
        }
        let half = (samples.len() / 2) as f64;
        let mut s = 0.0;
        for (i, f) in samples.iter().enumerate() {
            if *f != 0.0 {
                s += f * self.eval(x - (i as f64 - half))?;
            }
        }
        Ok(s)
    }

    /// CSV with columns `x,L(x)`.
    pub fn space_csv(&self, xs: &[f64]) -> Result<String> {
        let values = self.eval_many(xs)?;
        let mut out = String::from("x,L(x)\n");
        for (x, v) in xs.iter().zip(values) {
            out.push_str(&crate::table::row(&[*x, v]));
        }
        Ok(out)
    }

    /// CSV with columns `xi,L_hat(xi)`.
    pub fn spectrum_csv(&self, xis: &[f64]) -> String {
        let mut out = String::from("xi,L_hat(xi)\n");
        for &xi in xis {
            out.push_str(&crate::table::row(&[xi, self.spectrum(xi)]));
        }
        out
    }
}

/// Coefficients of `(2π)^{-1/2}/σ`, with `σ(ξ) = (2π)^{-1/2} Σ_n φ(n) cos(nξ)`
/// from Poisson summation.
fn lattice_series(base: &Kernel) -> Result<Vec<f64>> {
    let head = base.eval_space(0.0)?;
    let mut samples = vec![head];
    for n in 1..SERIES_POINTS / 2 {
        let v = base.eval_space(n as f64)?;
        if v.abs() < SERIES_CUTOFF * head.abs() {
            break;
        }
        samples.push(v);
    }
    let m = SERIES_POINTS;
    let xi: Vec<f64> = (0..m)
        .map(|i| -PI + 2.0 * PI * i as f64 / m as f64)
        .collect();
    let inverse: Vec<f64> = xi
        .iter()
        .map(|&t| {
            let sigma = INV_SQRT_2PI
                * (samples[0]
                    + 2.0
                        * samples
                            .iter()
                            .enumerate()
                            .skip(1)
                            .map(|(n, v)| v * (n as f64 * t).cos())
                            .sum::<f64>());
            INV_SQRT_2PI / sigma
        })
        .collect();
    if inverse.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Degenerate(
            inverse.iter().cloned().fold(f64::INFINITY, f64::min),
        ));
    }
    let coefficient = |n: usize| {
        inverse
            .iter()
            .zip(&xi)
            .map(|(v, t)| v * (n as f64 * t).cos())
            .sum::<f64>()
            / m as f64
    };
    let b0 = coefficient(0);
    let mut series = vec![b0];
    for n in 1..m / 4 {
        let b = coefficient(n);
        if b.abs() < SERIES_CUTOFF * b0.abs() {
            break;
        }
        series.push(b);
    }
    Ok(series)
}

/// `Σ_j f(j) L_φ(x − j)` for samples over the window `j = −J..J`.
pub fn lattice_interpolant_via_cardinal(samples: &[f64], base: &Kernel, x: f64) -> Result<f64> {
    CardinalFunction::new(base)?.lattice_interpolant(samples, x)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CardinalRegularity {
    pub report: RegularityReport,
    /// `C_φ (δ_φ⁻¹ ‖φ̂‖_{L∞(T)} + C_φ)`.
    pub bound: f64,
    pub bound_holds: bool,
}

/// Regularity of `L_φ` and the bound on its `C` from the constants of `φ`.
pub fn cardinal_regularity(base: &Kernel) -> Result<CardinalRegularity> {
    let depth = cardinal_depth(base);
    let kernel = Kernel::cardinal(base.clone(), depth)?;
    let cells = kernel.support().cells().unwrap_or(depth).max(1);
    let report = regularity_report(&kernel, cells, tolerances::TORUS_POINTS)?;
    let k = kernel_constants(base)?;
    let bound = k.c * (k.torus_sup / k.delta + k.c);
    let bound_holds = report.c <= bound * (1.0 + 1e-12);
    Ok(CardinalRegularity {
        report,
        bound,
        bound_holds,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CardinalSweepRow {
    pub alpha: f64,
    pub l2_error: f64,
    pub sup_error: f64,
    /// `sup |φ_α − ψ|` on the grid, when `φ_α` has space values.
    pub generator_distance: Option<f64>,
}

/// Distances between `L_{φ_α}` and `L_ψ` on `grid`.
pub fn cardinal_convergence_sweep<F>(
    family: F,
    target: &Kernel,
    alphas: &[f64],
    grid: &LineGrid,
) -> Result<Vec<CardinalSweepRow>>
where
    F: Fn(f64) -> Result<Kernel> + Sync,
{
    let xs = grid.nodes();
    let reference = CardinalFunction::new(target)?.eval_many(&xs)?;
    let psi: Option<Vec<f64>> = xs
        .par_iter()
        .map(|&x| target.eval_space(x))
        .collect::<Result<_>>()
        .ok();
    alphas
        .par_iter()
        .map(|&alpha| {
            let phi = family(alpha)?;
            let values = CardinalFunction::new(&phi)?.eval_many(&xs)?;
            let diff: Vec<f64> = values.iter().zip(&reference).map(|(a, b)| a - b).collect();
            let generator_distance = match &psi {
                Some(p) => xs
                    .iter()
                    .zip(p)
                    .map(|(&x, v)| phi.eval_space(x).map(|w| (w - v).abs()))
                    .collect::<Result<Vec<f64>>>()
                    .ok()
                    .map(|d| d.into_iter().fold(0.0, f64::max)),
                None => None,
            };
            Ok(CardinalSweepRow {
                alpha,
                l2_error: l2_norm_line(&diff, grid)?,
                sup_error: diff.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
                generator_distance,
            })
        })
        .collect()
}
