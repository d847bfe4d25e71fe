//! Generators with exact Fourier pairs.
//!
//! Every catalog spectrum is real, even and nonnegative. Closed forms are
//! stated for `f̂(ξ) = (2π)^{-1/2} ∫ f(x) e^{-iξx} dx`.

mod bessel;
mod regularity;
mod spec;

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_k, ln_bessel_k};
pub use regularity::{
    cell_sup_norms, kernel_constants, regularity_report, KernelConstants, RegularityReport,
};
pub use spec::KernelSpec;

use crate::error::{Error, Result};
use crate::fourier::{
    reduce_to_torus, sin_pi, Side, SpectralTable, Spectrum, TorusGrid, INV_SQRT_2PI,
};
use crate::tolerances;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Support of the spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    Line,
    /// `[-A, A]`.
    Interval(f64),
}

impl Support {
    fn intersect(self, other: Support) -> Support {
        match (self, other) {
            (Support::Line, s) | (s, Support::Line) => s,
            (Support::Interval(a), Support::Interval(b)) => Support::Interval(a.min(b)),
        }
    }

    /// Cells `T + 2πk` with `|k| ≤ N` covering the support, if bounded.
    pub fn cells(self) -> Option<usize> {
        match self {
            Support::Line => None,
            Support::Interval(a) => Some(((a - PI) / (2.0 * PI)).ceil().max(0.0) as usize),
        }
    }
}

/// How fast `|ψ(x)|` decays in space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    Exponential,
    /// `|ψ(x)| ~ |x|^{-p}`.
    Algebraic(f64),
}

impl Decay {
    fn slower(self, other: Decay) -> Decay {
        match (self, other) {
            (Decay::Exponential, d) | (d, Decay::Exponential) => d,
            (Decay::Algebraic(a), Decay::Algebraic(b)) => Decay::Algebraic(a.min(b)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `sin(πx)/(πx)`.
    Sinc,
    /// `e^{-αx²}`.
    Gaussian { alpha: f64 },
    /// `e^{-α|x|}`.
    Poisson { alpha: f64 },
    /// `(1 + x²)^{-α}`.
    InverseMultiquadric { alpha: f64 },
    /// Spectrum `max(2π − |ξ|, 0)`.
    TriangleSpectrum,
    /// `√(x² + c²)`, spectrum only (generalized transform, sign dropped).
    Multiquadric { c: f64 },
    /// `α φ(αx)`, spectrum `φ̂(ξ/α)`.
    Dilated { base: Box<Kernel>, alpha: f64 },
    /// Spectrum `φ̂ ψ̂`.
    Convolution {
        left: Box<Kernel>,
        right: Box<Kernel>,
    },
    /// Lattice cardinal function of `base`, periodized over `|k| ≤ depth`.
    Cardinal { base: Box<Kernel>, depth: usize },
}

/// A generator with space- and Fourier-domain evaluators.
///
/// Kernels are immutable; the only interior state is a lazily built
/// quadrature table used by spectrum-backed space evaluation.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "KernelSpec", into = "KernelSpec")]
pub struct Kernel {
    family: Family,
    table: Arc<OnceLock<Result<SpectralTable>>>,
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kernel({})", self.name())
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Range(format!(
            "{name} must be a positive finite number, got {v}"
        )))
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl Kernel {
    fn from_family(family: Family) -> Self {
        Self {
            family,
            table: Arc::new(OnceLock::new()),
        }
    }

    pub fn sinc() -> Self {
        Self::from_family(Family::Sinc)
    }

    pub fn gaussian(alpha: f64) -> Result<Self> {
        Ok(Self::from_family(Family::Gaussian {
            alpha: positive("gaussian alpha", alpha)?,
        }))
    }

    pub fn poisson(alpha: f64) -> Result<Self> {
        Ok(Self::from_family(Family::Poisson {
            alpha: positive("poisson alpha", alpha)?,
        }))
    }

    /// Orders `α − 1/2` are kept inside the validated Bessel range.
    pub fn inverse_multiquadric(alpha: f64) -> Result<Self> {
        let (lo, hi) = bessel::ORDER_RANGE;
        if !(alpha >= lo + 0.5 && alpha <= hi + 0.5) {
            return Err(Error::Range(format!(
                "inverse-multiquadric alpha must lie in [1, 40.5], got {alpha}"
            )));
        }
        Ok(Self::from_family(Family::InverseMultiquadric { alpha }))
    }

    pub fn triangle_spectrum() -> Self {
        Self::from_family(Family::TriangleSpectrum)
    }

    pub fn multiquadric(c: f64) -> Result<Self> {
        Ok(Self::from_family(Family::Multiquadric {
            c: positive("multiquadric c", c)?,
        }))
    }

    pub fn dilated(base: Kernel, alpha: f64) -> Result<Self> {
        let alpha = positive("dilation alpha", alpha)?;
        Ok(Self::from_family(Family::Dilated {
            base: Box::new(base),
            alpha,
        }))
    }

    pub fn cardinal(base: Kernel, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Range(
                "cardinal periodization depth must be >= 1".into(),
            ));
        }
        Ok(Self::from_family(Family::Cardinal {
            base: Box::new(base),
            depth,
        }))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Shape parameter, where the family has one.
    pub fn shape(&self) -> Option<f64> {
        match &self.family {
            Family::Gaussian { alpha }
            | Family::Poisson { alpha }
            | Family::InverseMultiquadric { alpha }
            | Family::Dilated { alpha, .. } => Some(*alpha),
            Family::Multiquadric { c } => Some(*c),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.family {
            Family::Sinc => "sinc".into(),
            Family::Gaussian { alpha } => format!("gaussian({})", fmt_num(*alpha)),
            Family::Poisson { alpha } => format!("poisson({})", fmt_num(*alpha)),
            Family::InverseMultiquadric { alpha } => {
                format!("inverse-multiquadric({})", fmt_num(*alpha))
            }
            Family::TriangleSpectrum => "triangle-spectrum".into(),
            Family::Multiquadric { c } => format!("multiquadric({})", fmt_num(*c)),
            Family::Dilated { base, alpha } => {
                format!("dilated({}, {})", base.name(), fmt_num(*alpha))
            }
            Family::Convolution { left, right } => {
                format!("convolution({}, {})", left.name(), right.name())
            }
            Family::Cardinal { base, depth } => format!("cardinal({}, {})", base.name(), depth),
        }
    }

    pub fn support(&self) -> Support {
        match &self.family {
            Family::Sinc => Support::Interval(PI),
            Family::TriangleSpectrum => Support::Interval(2.0 * PI),
            Family::Gaussian { .. }
            | Family::Poisson { .. }
            | Family::InverseMultiquadric { .. }
            | Family::Multiquadric { .. } => Support::Line,
            Family::Dilated { base, alpha } => match base.support() {
                Support::Line => Support::Line,
                Support::Interval(a) => Support::Interval(a * alpha),
            },
            Family::Convolution { left, right } => left.support().intersect(right.support()),
            Family::Cardinal { base, depth } => base
                .support()
                .intersect(Support::Interval((2 * depth + 1) as f64 * PI)),
        }
    }

    /// True when the Fourier evaluator needs no quadrature.
    pub fn fourier_closed_form(&self) -> bool {
        match &self.family {
            Family::InverseMultiquadric { .. } | Family::Multiquadric { .. } => false,
            Family::Dilated { base, .. } | Family::Cardinal { base, .. } => {
                base.fourier_closed_form()
            }
            Family::Convolution { left, right } => {
                left.fourier_closed_form() && right.fourier_closed_form()
            }
            _ => true,
        }
    }

    /// True when the space evaluator is a closed form.
    pub fn space_closed_form(&self) -> bool {
        match &self.family {
            Family::Convolution { .. } | Family::Cardinal { .. } | Family::Multiquadric { .. } => {
                false
            }
            Family::Dilated { base, .. } => base.space_closed_form(),
            _ => true,
        }
    }

    /// Even and nonincreasing in `|ξ|`.
    pub fn is_monotone(&self) -> bool {
        match &self.family {
            Family::Cardinal { .. } => false,
            Family::Dilated { base, .. } => base.is_monotone(),
            Family::Convolution { left, right } => left.is_monotone() && right.is_monotone(),
            _ => true,
        }
    }

    /// Spatial decay class, used to size line grids.
    pub fn spatial_decay(&self) -> Decay {
        match &self.family {
            Family::Sinc => Decay::Algebraic(1.0),
            Family::TriangleSpectrum => Decay::Algebraic(2.0),
            Family::InverseMultiquadric { alpha } => Decay::Algebraic(2.0 * alpha),
            Family::Multiquadric { .. } => Decay::Algebraic(-1.0),
            Family::Gaussian { .. } | Family::Poisson { .. } => Decay::Exponential,
            Family::Dilated { base, .. } | Family::Cardinal { base, .. } => base.spatial_decay(),
            Family::Convolution { left, right } => {
                left.spatial_decay().slower(right.spatial_decay())
            }
        }
    }

    /// `ψ(x)`.
    pub fn eval_space(&self, x: f64) -> Result<f64> {
        match &self.family {
            Family::Sinc => Ok(crate::fourier::sinc(x)),
            Family::Gaussian { alpha } => Ok((-alpha * x * x).exp()),
            Family::Poisson { alpha } => Ok((-alpha * x.abs()).exp()),
            Family::InverseMultiquadric { alpha } => Ok((1.0 + x * x).powf(-alpha)),
            Family::TriangleSpectrum => Ok(if x == 0.0 {
                4.0 * PI * PI * INV_SQRT_2PI
            } else {
                4.0 * INV_SQRT_2PI * sin_pi(x).powi(2) / (x * x)
            }),
            Family::Multiquadric { .. } => Err(Error::Domain(
                "multiquadric generator grows and has no space evaluation here".into(),
            )),
            Family::Dilated { base, alpha } => Ok(alpha * base.eval_space(alpha * x)?),
            Family::Convolution { .. } | Family::Cardinal { .. } => Ok(self.space_table()?.eval(x)),
        }
    }

    /// `ψ̂(ξ)`, with a domain error at removable or true singularities.
    pub fn eval_fourier(&self, xi: f64) -> Result<f64> {
        if !xi.is_finite() {
            return Err(Error::Domain(format!("frequency must be finite, got {xi}")));
        }
        match &self.family {
            Family::InverseMultiquadric { .. } if xi == 0.0 => Err(Error::Domain(
                "inverse-multiquadric spectrum is evaluated through |xi|^nu K_nu(|xi|), singular at xi = 0".into(),
            )),
            Family::Multiquadric { .. } if xi == 0.0 => {
                Err(Error::Domain("multiquadric spectrum has a pole at xi = 0".into()))
            }
            _ => Ok(self.spectrum(xi)),
        }
    }

    /// Total spectrum: removable singularities filled by their limits,
    /// `+∞` at the multiquadric pole.
    pub fn spectrum(&self, xi: f64) -> f64 {
        match &self.family {
            Family::Sinc => {
                let a = xi.abs();
                if a < PI {
                    INV_SQRT_2PI
                } else if a == PI {
                    0.5 * INV_SQRT_2PI
                } else {
                    0.0
                }
            }
            Family::Gaussian { alpha } => (-xi * xi / (4.0 * alpha)).exp() / (2.0 * alpha).sqrt(),
            Family::Poisson { alpha } => (2.0 / PI).sqrt() * alpha / (alpha * alpha + xi * xi),
            Family::TriangleSpectrum => (2.0 * PI - xi.abs()).max(0.0),
            Family::Dilated { base, alpha } => base.spectrum(xi / alpha),
            Family::Convolution { left, right } => {
                let l = left.spectrum(xi);
                if l == 0.0 {
                    0.0
                } else {
                    l * right.spectrum(xi)
                }
            }
            Family::InverseMultiquadric { .. }
            | Family::Multiquadric { .. }
            | Family::Cardinal { .. } => self.ln_spectrum(xi).exp(),
        }
    }

    /// `ln ψ̂(ξ)`, `-∞` where the spectrum vanishes.
    pub fn ln_spectrum(&self, xi: f64) -> f64 {
        match &self.family {
            Family::Gaussian { alpha } => -xi * xi / (4.0 * alpha) - 0.5 * (2.0 * alpha).ln(),
            Family::Poisson { alpha } => {
                0.5 * (2.0 / PI).ln() + alpha.ln() - (alpha * alpha + xi * xi).ln()
            }
            Family::InverseMultiquadric { alpha } => {
                let nu = alpha - 0.5;
                let z = xi.abs();
                if z == 0.0 {
                    -0.5 * std::f64::consts::LN_2 + libm::lgamma(nu) - libm::lgamma(*alpha)
                } else {
                    (1.0 - alpha) * std::f64::consts::LN_2 - libm::lgamma(*alpha)
                        + nu * z.ln()
                        + ln_bessel_k(nu, z)
                }
            }
            Family::Multiquadric { c } => {
                let z = xi.abs();
                if z == 0.0 {
                    f64::INFINITY
                } else {
                    0.5 * (2.0 / PI).ln() + c.ln() + ln_bessel_k(1.0, c * z) - z.ln()
                }
            }
            Family::Dilated { base, alpha } => base.ln_spectrum(xi / alpha),
            Family::Convolution { left, right } => {
                let l = left.ln_spectrum(xi);
                if l == f64::NEG_INFINITY {
                    l
                } else {
                    l + right.ln_spectrum(xi)
                }
            }
            Family::Cardinal { base, depth } => {
                let xi = xi.abs();
                if xi > (2 * depth + 1) as f64 * PI {
                    return f64::NEG_INFINITY;
                }
                let top = base.ln_spectrum(xi);
                if top == f64::NEG_INFINITY {
                    return top;
                }
                if top == f64::INFINITY {
                    // the pole dominates its own periodization
                    return -LN_SQRT_2PI;
                }
                let r = reduce_to_torus(xi);
                -LN_SQRT_2PI + top - ln_periodized(base, r, *depth)
            }
            Family::Sinc | Family::TriangleSpectrum => self.spectrum(xi).ln(),
        }
    }

    /// One-sided limit of the spectrum at `ξ`.
    pub fn spectrum_limit(&self, xi: f64, side: Side) -> f64 {
        match &self.family {
            Family::Sinc if xi.abs() == PI => {
                let inside = (xi > 0.0) == (side == Side::Below);
                if inside {
                    INV_SQRT_2PI
                } else {
                    0.0
                }
            }
            Family::Dilated { base, alpha } => base.spectrum_limit(xi / alpha, side),
            Family::Convolution { left, right } => {
                let l = left.spectrum_limit(xi, side);
                if l == 0.0 {
                    0.0
                } else {
                    l * right.spectrum_limit(xi, side)
                }
            }
            Family::Cardinal { base, depth } => {
                let edge = (2 * depth + 1) as f64 * PI;
                let a = xi.abs();
                if a > edge || (a == edge && (xi > 0.0) == (side == Side::Above)) {
                    return 0.0;
                }
                let top = base.spectrum_limit(xi, side);
                if top == 0.0 {
                    return 0.0;
                }
                // Reduce toward the side the limit comes from.
                let mut r = reduce_to_torus(xi);
                if r == -PI && side == Side::Below {
                    r = PI;
                }
                let k = *depth as i64;
                let sum: f64 = (-k..=k)
                    .map(|j| base.spectrum_limit(r + 2.0 * PI * j as f64, side))
                    .sum();
                INV_SQRT_2PI * top / sum
            }
            _ => self.spectrum(xi),
        }
    }

    /// `‖ψ̂‖_{L∞(ℝ)}`.
    pub fn sup_norm(&self) -> f64 {
        if self.is_monotone() {
            return self.spectrum(0.0);
        }
        let grid = TorusGrid::scan();
        let cells = self.support().cells().unwrap_or(16) as i64;
        (-cells..=cells)
            .map(|k| crate::fourier::cell_sup(self, &grid, k))
            .fold(0.0, f64::max)
    }

    /// Bound on `Σ_{|k|>K} ‖ψ̂(· + 2πk)‖_{L∞(T)}` from the decay envelope.
    pub fn tail_bound(&self, cells: usize) -> f64 {
        if let Some(n) = self.support().cells() {
            if cells >= n {
                return 0.0;
            }
        }
        match &self.family {
            Family::Poisson { alpha } => poisson_tail(*alpha, cells),
            Family::Dilated { base, alpha } if matches!(base.family, Family::Poisson { .. }) => {
                let Family::Poisson { alpha: a } = base.family else {
                    unreachable!()
                };
                alpha * poisson_tail(a * alpha, cells)
            }
            Family::Convolution { left, right } => {
                let a = left.sup_norm() * right.tail_bound(cells);
                let b = right.sup_norm() * left.tail_bound(cells);
                a.min(b)
            }
            _ if self.is_monotone() => self.monotone_tail(cells),
            _ => {
                let grid = TorusGrid::scan();
                let n = self.support().cells().unwrap_or(cells + 64) as i64;
                (cells as i64 + 1..=n)
                    .map(|k| {
                        crate::fourier::cell_sup(self, &grid, k)
                            + crate::fourier::cell_sup(self, &grid, -k)
                    })
                    .sum()
            }
        }
    }

    /// Sum of left-edge values over cells `k > K`, doubled for both sides.
    fn monotone_tail(&self, cells: usize) -> f64 {
        let edge = |k: usize| self.spectrum_limit((2 * k - 1) as f64 * PI, Side::Above);
        let mut total = 0.0;
        let mut prev = f64::NAN;
        let start = cells + 1;
        for k in start..start + 4096 {
            let t = edge(k);
            if t == 0.0 {
                return 2.0 * total;
            }
            total += t;
            if prev.is_finite() && t < 1e-17 * total {
                let r = t / prev;
                if r < 1.0 {
                    return 2.0 * (total + t * r / (1.0 - r));
                }
            }
            prev = t;
        }
        // Algebraic decay: fit t_k ~ k^{-p} from the last two terms.
        let k = (start + 4095) as f64;
        let p = (prev / edge(start + 4096)).ln() / ((k + 1.0) / k).ln();
        if p > 1.0 {
            2.0 * (total + prev * k / (p - 1.0))
        } else {
            f64::INFINITY
        }
    }

    /// Cells needed so the spectrum beyond them moves space values by
    /// less than the quadrature tolerance.
    pub fn space_depth(&self) -> Result<usize> {
        if let Some(n) = self.support().cells() {
            return Ok(n);
        }
        let scale = self.sup_norm().max(f64::MIN_POSITIVE);
        for k in 1..=64 {
            let t = self.tail_bound(k);
            if 2.0 * PI * INV_SQRT_2PI * t <= tolerances::SPACE_QUADRATURE_TAIL * scale {
                return Ok(k);
            }
        }
        let estimate = 2.0 * PI * INV_SQRT_2PI * self.tail_bound(64) / scale;
        Err(Error::Accuracy {
            estimate,
            tolerance: tolerances::SPACE_QUADRATURE_TAIL,
        })
    }

    fn space_table(&self) -> Result<&SpectralTable> {
        self.table
            .get_or_init(|| {
                let depth = self.space_depth()?;
                Ok(SpectralTable::new(self, &TorusGrid::quadrature(), depth))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `convolve(self, other)`.
    pub fn convolve(&self, other: &Kernel) -> Kernel {
        convolve(self, other)
    }

    pub fn spec(&self) -> KernelSpec {
        KernelSpec::from_kernel(self)
    }
}

impl Spectrum for Kernel {
    fn value(&self, xi: f64) -> f64 {
        self.spectrum(xi)
    }

    fn limit(&self, xi: f64, side: Side) -> f64 {
        self.spectrum_limit(xi, side)
    }
}

/// Kernel whose spectrum is `φ̂ ψ̂`.
///
/// With the unitary transform this is `(2π)^{-1/2} (φ ∗ ψ)` in space; the
/// constant drops out of every δ-normalized quantity.
pub fn convolve(left: &Kernel, right: &Kernel) -> Kernel {
    Kernel::from_family(Family::Convolution {
        left: Box::new(left.clone()),
        right: Box::new(right.clone()),
    })
}

/// `ln Σ_{|k|≤K} φ̂(r + 2πk)` by log-sum-exp.
pub(crate) fn ln_periodized(base: &Kernel, r: f64, depth: usize) -> f64 {
    let k = depth as i64;
    let logs: Vec<f64> = (-k..=k)
        .map(|j| base.ln_spectrum(r + 2.0 * PI * j as f64))
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

/// Poisson envelope: `2 Σ_{k>K} √(2/π) α / (α² + (2k−1)²π²) ≤ √(2/π) α / (π²(2K−1))`.
fn poisson_tail(alpha: f64, cells: usize) -> f64 {
    if cells == 0 {
        return f64::INFINITY;
    }
    (2.0 / PI).sqrt() * alpha / (PI * PI * (2 * cells - 1) as f64)
}

#[cfg(test)]
mod tests;
