//! Grid Fourier utilities on the torus `T = [-π, π)` and on the line.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// `(2π)^{-1/2}`, the transform normalization.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Which side a one-sided limit is taken from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

/// A real spectrum `ξ ↦ ŝ(ξ)` on the line.
///
/// `limit` matters only for spectra with jumps: cell sups and infima are
/// taken over closed cells, so endpoints use the one-sided value.
pub trait Spectrum: Sync {
    fn value(&self, xi: f64) -> f64;

    fn limit(&self, xi: f64, side: Side) -> f64 {
        let _ = side;
        self.value(xi)
    }
}

impl<F: Fn(f64) -> f64 + Sync> Spectrum for F {
    fn value(&self, xi: f64) -> f64 {
        self(xi)
    }
}

/// `sin(πx)`, exact zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let s = (PI * (x - n)).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        sin_pi(x) / (PI * x)
    }
}

/// Map `ξ` to its representative in `[-π, π)`.
pub fn reduce_to_torus(xi: f64) -> f64 {
    let r = xi - 2.0 * PI * ((xi + PI) / (2.0 * PI)).floor();
    if r >= PI {
        r - 2.0 * PI
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorusRule {
    /// Equispaced nodes `-π + 2πm/M`, weight `2π/M`.
    Trapezoid,
    /// Composite Gauss–Legendre, graded toward `±π`.
    GaussLegendre,
}

/// Quadrature nodes on the torus.
///
/// The trapezoid layout is what scans (minima, sups, symbols) use. Inner
/// products of non-integer exponentials are not periodic on `T`, so norms
/// and projections use the Gauss–Legendre layout instead.
#[derive(Clone, Debug)]
pub struct TorusGrid {
    rule: TorusRule,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TorusGridInfo {
    #[serde(rename = "M")]
    pub m: usize,
    pub rule: TorusRule,
}

impl TorusGrid {
    pub fn uniform(m: usize) -> Result<Self> {
        if m < 8 || !m.is_multiple_of(2) {
            return Err(Error::Range(format!(
                "torus grid needs even M >= 8, got {m}"
            )));
        }
        let h = 2.0 * PI / m as f64;
        let nodes = (0..m).map(|i| -PI + h * i as f64).collect();
        Ok(Self {
            rule: TorusRule::Trapezoid,
            nodes,
            weights: vec![h; m],
        })
    }

    /// Composite Gauss–Legendre rule.
    ///
    /// Each half torus is split into `panels` equal panels with breakpoints
    /// at `0` and `±π`; the panel touching `±π` is refined geometrically
    /// `grading` times.
    pub fn gauss(panels: usize, order: usize, grading: usize) -> Result<Self> {
        if panels == 0 || order < 2 {
            return Err(Error::Range(
                "gauss torus grid needs panels >= 1 and order >= 2".into(),
            ));
        }
        let rule = GaussLegendre::new(order).map_err(|e| Error::Numeric(e.to_string()))?;
        let reference: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();

        let width = PI / panels as f64;
        let mut breaks: Vec<f64> = (0..panels).map(|i| i as f64 * width).collect();
        let edge = PI - width;
        for level in 1..=grading {
            breaks.push(PI - width / 2f64.powi(level as i32));
        }
        breaks.push(PI);
        debug_assert!(breaks.windows(2).all(|w| w[0] < w[1]) && breaks[panels - 1] <= edge + 1e-15);

        let mut right = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(t, wt) in &reference {
                right.push((mid + half * t, half * wt));
            }
        }
        right.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut pairs: Vec<(f64, f64)> = right.iter().rev().map(|&(x, w)| (-x, w)).collect();
        pairs.extend(right);
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self {
            rule: TorusRule::GaussLegendre,
            nodes,
            weights,
        })
    }

    /// Default scan grid.
    pub fn scan() -> Self {
        Self::uniform(tolerances::TORUS_POINTS).expect("default grid is valid")
    }

    /// Default quadrature grid.
    pub fn quadrature() -> Self {
        Self::gauss(
            tolerances::GAUSS_PANELS,
            tolerances::GAUSS_ORDER,
            tolerances::GAUSS_GRADING,
        )
        .expect("default grid is valid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rule(&self) -> TorusRule {
        self.rule
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn info(&self) -> TorusGridInfo {
        TorusGridInfo {
            m: self.len(),
            rule: self.rule,
        }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// `⟨u, v⟩ = ∫_T u · conj(v)`.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(w, (a, b))| a * b.conj() * *w)
            .sum()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len() {
            return Err(Error::Usage(format!(
                "{} values for a torus grid of {} nodes",
                n,
                self.len()
            )));
        }
        Ok(())
    }
}

/// Symmetric equispaced grid `-X, -X+h, …, X`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LineGrid {
    #[serde(rename = "X")]
    pub half_width: f64,
    pub h: f64,
}

impl LineGrid {
    pub fn new(half_width: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && half_width > 0.0 && h.is_finite() && half_width.is_finite()) {
            return Err(Error::Range(format!(
                "line grid needs X > 0 and h > 0, got X={half_width}, h={h}"
            )));
        }
        let ratio = half_width / h;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Range(format!("X/h = {ratio} is not an integer")));
        }
        Ok(Self { half_width, h })
    }

    /// Nodes on each side of zero.
    pub fn half_count(&self) -> usize {
        (self.half_width / self.h).round() as usize
    }

    pub fn len(&self) -> usize {
        2 * self.half_count() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.half_count() as f64) * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Sub-grid covering `|x| ≤ fraction · X`.
    pub fn central(&self, fraction: f64) -> Result<LineGrid> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Range(format!(
                "central fraction must lie in (0, 1], got {fraction}"
            )));
        }
        let n = ((fraction * self.half_count() as f64) + 1e-9)
            .floor()
            .max(1.0);
        LineGrid::new(n * self.h, self.h)
    }
}

/// `σ(ξ_m) = Σ_{|k|≤K} ŝ(ξ_m + 2πk)` on each grid node.
pub fn periodize<S: Spectrum + ?Sized>(spectrum: &S, grid: &TorusGrid, depth: usize) -> Vec<f64> {
    let k = depth as i64;
    grid.nodes()
        .iter()
        .map(|&xi| {
            (-k..=k)
                .map(|j| spectrum.value(xi + 2.0 * PI * j as f64))
                .sum()
        })
        .collect()
}

/// Supremum of `|ŝ|` over the closed cell `T + 2πk`.
///
/// Interior values come from the grid, the two endpoints from one-sided
/// limits taken inside the cell.
pub fn cell_sup<S: Spectrum + ?Sized>(spectrum: &S, grid: &TorusGrid, k: i64) -> f64 {
    cell_extremes(spectrum, grid, k).1
}

/// Infimum and supremum of `|ŝ|` over the closed cell `T + 2πk`.
pub fn cell_extremes<S: Spectrum + ?Sized>(spectrum: &S, grid: &TorusGrid, k: i64) -> (f64, f64) {
    let shift = 2.0 * PI * k as f64;
    let left = spectrum.limit(-PI + shift, Side::Above).abs();
    let right = spectrum.limit(PI + shift, Side::Below).abs();
    let (mut lo, mut hi) = (left.min(right), left.max(right));
    for &xi in grid.nodes() {
        if xi <= -PI {
            continue;
        }
        let v = spectrum.value(xi + shift).abs();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Trapezoid approximation of `(2π)^{-1/2} ∫_{-Ξ}^{Ξ} ŝ(ξ) e^{ixξ} dξ`.
///
/// `tail_mass` is the caller's bound on `∫_{|ξ|>Ξ} |ŝ|`; if it would move
/// the result by more than the tolerance an accuracy error is returned.
pub fn inverse_ft<S: Spectrum + ?Sized>(
    spectrum: &S,
    x: f64,
    cutoff: f64,
    intervals: usize,
    tail_mass: f64,
) -> Result<f64> {
    if !(cutoff > 0.0) || intervals < 2 {
        return Err(Error::Range(format!(
            "inverse_ft needs cutoff > 0 and M >= 2, got {cutoff}, {intervals}"
        )));
    }
    let estimate = INV_SQRT_2PI * tail_mass.abs();
    if !(estimate <= tolerances::INVERSE_FT_TAIL) {
        return Err(Error::Accuracy {
            estimate,
            tolerance: tolerances::INVERSE_FT_TAIL,
        });
    }
    let h = 2.0 * cutoff / intervals as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    let mut scale = 0.0f64;
    for m in 0..=intervals {
        let xi = -cutoff + h * m as f64;
        let w = if m == 0 || m == intervals { 0.5 * h } else { h };
        let s = spectrum.value(xi) * w;
        let (sn, cs) = (x * xi).sin_cos();
        re += s * cs;
        im += s * sn;
        scale += s.abs();
    }
    re *= INV_SQRT_2PI;
    im *= INV_SQRT_2PI;
    if im.abs() > tolerances::IMAGINARY_RESIDUE * (INV_SQRT_2PI * scale).max(1.0) {
        return Err(Error::ImaginaryResidue(im));
    }
    Ok(re)
}

/// `‖u‖_{L2(ℝ)}` by the trapezoid rule with half-weight endpoints.
pub fn l2_norm_line(samples: &[f64], grid: &LineGrid) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::Usage(format!(
            "{} samples for a line grid of {} nodes",
            samples.len(),
            grid.len()
        )));
    }
    let n = samples.len();
    let sum: f64 = samples
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i == 0 || i + 1 == n {
                0.5 * v * v
            } else {
                v * v
            }
        })
        .sum();
    Ok((grid.h * sum).sqrt())
}

/// `‖u‖_{L2(T)}` with the grid's own weights.
pub fn l2_norm_torus(values: &[Complex64], grid: &TorusGrid) -> Result<f64> {
    grid.check_len(values.len())?;
    Ok(grid
        .weights()
        .iter()
        .zip(values)
        .map(|(w, v)| w * v.norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Real-valued variant of [`l2_norm_torus`].
pub fn l2_norm_torus_real(values: &[f64], grid: &TorusGrid) -> Result<f64> {
    grid.check_len(values.len())?;
    Ok(grid
        .weights()
        .iter()
        .zip(values)
        .map(|(w, v)| w * v * v)
        .sum::<f64>()
        .sqrt())
}

/// Frequencies and weighted spectrum values for repeated inversion.
///
/// Holds `(ξ, w·ŝ(ξ))` over the cells `|k| ≤ K` of a quadrature torus grid,
/// so `f(x) = (2π)^{-1/2} Σ w ŝ(ξ) cos(xξ)` for an even real spectrum.
#[derive(Clone, Debug)]
pub struct SpectralTable {
    freqs: Vec<f64>,
    weighted: Vec<f64>,
}

impl SpectralTable {
    pub fn new<S: Spectrum + ?Sized>(spectrum: &S, grid: &TorusGrid, depth: usize) -> Self {
        let k = depth as i64;
        let mut freqs = Vec::with_capacity(grid.len() * (2 * depth + 1));
        let mut weighted = Vec::with_capacity(freqs.capacity());
        for j in -k..=k {
            let shift = 2.0 * PI * j as f64;
            for (&xi, &w) in grid.nodes().iter().zip(grid.weights()) {
                let s = spectrum.value(xi + shift);
                if s != 0.0 {
                    freqs.push(xi + shift);
                    weighted.push(w * s);
                }
            }
        }
        Self { freqs, weighted }
    }

    /// Table from precomputed frequencies and weighted spectrum values.
    pub fn from_parts(freqs: Vec<f64>, weighted: Vec<f64>) -> Self {
        assert_eq!(freqs.len(), weighted.len());
        Self { freqs, weighted }
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        INV_SQRT_2PI
            * self
                .freqs
                .iter()
                .zip(&self.weighted)
                .map(|(xi, s)| s * (x * xi).cos())
                .sum::<f64>()
    }
}
