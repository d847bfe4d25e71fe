//! Finite-window members of `V(ψ, X)`: `f = Σ_j c_j ψ(· − x_j)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{l2_norm_line, LineGrid, TorusGrid, INV_SQRT_2PI};
use crate::kernel::{kernel_constants, Decay, Kernel, KernelConstants};
use crate::nodes::{kadec_check, prolong, riesz_estimate, KadecVerdict, NodeSet};
use crate::random::unit_coefficients;
use crate::tolerances;

/// Half-width added beyond the outermost node for exponentially decaying kernels.
pub const EXPONENTIAL_MARGIN: f64 = 48.0;
/// Same for algebraically decaying kernels.
pub const ALGEBRAIC_MARGIN: f64 = 256.0;

/// Largest relative energy left outside an exponential-decay grid.
const EXPONENTIAL_TAIL_REL: f64 = 1e-6;
/// Largest relative size of the algebraic tail correction.
const ALGEBRAIC_TAIL_REL: f64 = 1e-2;
/// Block length between fresh phase evaluations in grid sweeps.
const PHASE_BLOCK: usize = 256;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "QsisRepr", into = "QsisRepr")]
pub struct QsisFunction {
    kernel: Kernel,
    nodes: NodeSet,
    coefficients: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QsisRepr {
    kernel: Kernel,
    nodes: NodeSet,
    coefficients: Vec<f64>,
}

impl TryFrom<QsisRepr> for QsisFunction {
    type Error = Error;
    fn try_from(r: QsisRepr) -> Result<Self> {
        QsisFunction::new(r.kernel, r.nodes, r.coefficients)
    }
}

impl From<QsisFunction> for QsisRepr {
    fn from(f: QsisFunction) -> Self {
        QsisRepr {
            kernel: f.kernel,
            nodes: f.nodes,
            coefficients: f.coefficients,
        }
    }
}

impl QsisFunction {
    pub fn new(kernel: Kernel, nodes: NodeSet, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != nodes.len() {
            return Err(Error::Usage(format!(
                "{} coefficients for a window of {} nodes",
                coefficients.len(),
                nodes.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Range("coefficients must be finite".into()));
        }
        Ok(Self {
            kernel,
            nodes,
            coefficients,
        })
    }

    /// `ψ(· − x_j)` for the node with window index `j`.
    pub fn translate(kernel: Kernel, nodes: NodeSet, j: i64) -> Result<Self> {
        let half = nodes.half() as i64;
        if j.abs() > half {
            return Err(Error::Range(format!(
                "index {j} outside the window [-{half}, {half}]"
            )));
        }
        let mut c = vec![0.0; nodes.len()];
        c[(j + half) as usize] = 1.0;
        Self::new(kernel, nodes, c)
    }

    /// Unit-norm Gaussian coefficients from `seed`.
    pub fn random(kernel: Kernel, nodes: NodeSet, seed: u64) -> Result<Self> {
        let c = unit_coefficients(nodes.len(), seed);
        Self::new(kernel, nodes, c)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient_norm(&self) -> f64 {
        norm(&self.coefficients)
    }

    /// `Σ_j c_j ψ(x − x_j)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut s = 0.0;
        for (c, xj) in self.coefficients.iter().zip(self.nodes.nodes()) {
            if *c != 0.0 {
                s += c * self.kernel.eval_space(x - xj)?;
            }
        }
        Ok(s)
    }

    /// `f` at many points, in order.
    ///
    /// Kernels without a closed form in space go through the Fourier side.
    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if self.kernel.space_closed_form() {
            xs.par_iter().map(|&x| self.eval(x)).collect()
        } else {
            let side = self.fourier_side(self.kernel.space_depth()?)?;
            Ok(xs.par_iter().map(|&x| side.eval(x)).collect())
        }
    }

    /// `f` on every node of a line grid.
    pub fn eval_grid(&self, grid: &LineGrid) -> Result<Vec<f64>> {
        if self.kernel.space_closed_form() {
            return self.eval_many(&grid.nodes());
        }
        let side = self.fourier_side(self.kernel.space_depth()?)?;
        Ok(side.eval_grid(grid))
    }

    /// `(f(y_j))` over the sample window.
    pub fn sample(&self, samples: &NodeSet) -> Result<Vec<f64>> {
        self.eval_many(samples.nodes())
    }

    /// Grid wide enough for [`QsisFunction::l2_norm`] on this kernel.
    pub fn default_line_grid(&self) -> LineGrid {
        let margin = match self.kernel.spatial_decay() {
            Decay::Exponential => EXPONENTIAL_MARGIN,
            Decay::Algebraic(_) => ALGEBRAIC_MARGIN,
        };
        let extent = self
            .nodes
            .nodes()
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
            .ceil();
        LineGrid::new(margin + extent, tolerances::LINE_SPACING)
            .expect("positive width and spacing")
    }

    /// `‖f‖_{L2(ℝ)}` on `grid`, with the decay tail added for slowly decaying kernels.
    pub fn l2_norm(&self, grid: &LineGrid) -> Result<f64> {
        let values = self.eval_grid(grid)?;
        let base = l2_norm_line(&values, grid)?.powi(2);
        if base == 0.0 {
            return Ok(0.0);
        }
        let n = grid.half_count();
        let outer = |from: usize| -> f64 {
            let left: f64 = values[..=n - from].iter().map(|v| v * v).sum();
            let right: f64 = values[n + from..].iter().map(|v| v * v).sum();
            grid.h * (left + right)
        };
        match self.kernel.spatial_decay() {
            Decay::Exponential => {
                let tail = outer(n / 2);
                if tail > EXPONENTIAL_TAIL_REL * base {
                    return Err(Error::Accuracy {
                        estimate: tail / base,
                        tolerance: EXPONENTIAL_TAIL_REL,
                    });
                }
                Ok(base.sqrt())
            }
            Decay::Algebraic(p) => {
                if p <= 0.5 {
                    return Err(Error::Domain(format!(
                        "{} is not square integrable",
                        self.kernel.name()
                    )));
                }
                // ∫_X^∞ x^{-2p} = ∫_{X/2}^X x^{-2p} / (2^{2p-1} − 1)
                let correction = outer(n / 2) / (2f64.powf(2.0 * p - 1.0) - 1.0);
                if correction > ALGEBRAIC_TAIL_REL * base {
                    return Err(Error::Accuracy {
                        estimate: correction / base,
                        tolerance: ALGEBRAIC_TAIL_REL,
                    });
                }
                Ok((base + correction).sqrt())
            }
        }
    }

    /// `‖f‖_{L2}` on [`QsisFunction::default_line_grid`].
    pub fn norm(&self) -> Result<f64> {
        self.l2_norm(&self.default_line_grid())
    }

    /// Spectrum of `f` split into cells `|k| ≤ depth` on the quadrature grid.
    pub fn fourier_side(&self, depth: usize) -> Result<FourierSide> {
        FourierSide::new(self, &TorusGrid::quadrature(), depth)
    }

    /// CSV with columns `x,f(x)` over the grid.
    pub fn grid_csv(&self, grid: &LineGrid) -> Result<String> {
        let values = self.eval_grid(grid)?;
        let mut out = String::from("x,f(x)\n");
        for (i, v) in values.iter().enumerate() {
            out.push_str(&crate::table::row(&[grid.node(i), *v]));
        }
        Ok(out)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `f̂(ξ + 2πk) = ψ̂(ξ + 2πk) (A^k c)(ξ)` on the cells `|k| ≤ K`.
#[derive(Clone, Debug)]
pub struct FourierSide {
    depth: usize,
    freqs: Vec<f64>,
    /// `w · f̂(t)` for each frequency `t`.
    weighted: Vec<C64>,
    /// `Σ w |f̂|²` per cell, `k = −K..K`.
    cell_energy: Vec<f64>,
}

impl FourierSide {
    pub fn new(f: &QsisFunction, grid: &TorusGrid, depth: usize) -> Result<Self> {
        let c: Vec<C64> = f.coefficients.iter().map(|&v| C64::new(v, 0.0)).collect();
        let k = depth as i64;
        let cells: Vec<(Vec<f64>, Vec<C64>, f64)> = (-k..=k)
            .into_par_iter()
            .map(|j| {
                let p = prolong(&c, &f.nodes, j, grid);
                let shift = 2.0 * PI * j as f64;
                let mut freqs = Vec::new();
                let mut weighted = Vec::new();
                let mut energy = 0.0;
                for ((&xi, &w), pk) in grid.nodes().iter().zip(grid.weights()).zip(&p) {
                    let s = f.kernel.spectrum(xi + shift);
                    if s != 0.0 {
                        let v = s * pk;
                        freqs.push(xi + shift);
                        weighted.push(w * v);
                        energy += w * v.norm_sqr();
                    }
                }
                (freqs, weighted, energy)
            })
            .collect();
        if cells.iter().any(|(_, _, e)| !e.is_finite()) {
            return Err(Error::Numeric(
                "non-finite spectrum on the quadrature grid".into(),
            ));
        }
        let mut side = Self {
            depth,
            freqs: Vec::new(),
            weighted: Vec::new(),
            cell_energy: Vec::new(),
        };
        for (f, w, e) in cells {
            side.freqs.extend(f);
            side.weighted.extend(w);
            side.cell_energy.push(e);
        }
        Ok(side)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `‖f̂‖²` over the cell `T + 2πk`.
    pub fn cell_energy(&self, k: i64) -> f64 {
        let i = k + self.depth as i64;
        if i < 0 || i as usize >= self.cell_energy.len() {
            return 0.0;
        }
        self.cell_energy[i as usize]
    }

    /// `Σ_k ‖f̂‖²_{T+2πk}`, the Plancherel value of `‖f‖²` up to the depth.
    pub fn total_energy(&self) -> f64 {
        self.cell_energy.iter().sum()
    }

    /// `(2π)^{-1/2} ∫ f̂(t) e^{ixt} dt`.
    pub fn eval(&self, x: f64) -> f64 {
        let s: f64 = self
            .freqs
            .iter()
            .zip(&self.weighted)
            .map(|(t, w)| {
                let (sin, cos) = (x * t).sin_cos();
                w.re * cos - w.im * sin
            })
            .sum();
        INV_SQRT_2PI * s
    }

    /// [`FourierSide::eval`] on a line grid by phase recurrence.
    pub fn eval_grid(&self, grid: &LineGrid) -> Vec<f64> {
        let n = grid.len();
        let blocks: Vec<usize> = (0..n).step_by(PHASE_BLOCK).collect();
        let parts: Vec<Vec<f64>> = blocks
            .par_iter()
            .map(|&start| {
                let len = PHASE_BLOCK.min(n - start);
                let x0 = grid.node(start);
                let mut out = vec![0.0; len];
                for (t, w) in self.freqs.iter().zip(&self.weighted) {
                    let step = C64::from_polar(1.0, grid.h * t);
                    let mut z = w * C64::from_polar(1.0, x0 * t);
                    for o in out.iter_mut() {
                        *o += z.re;
                        z *= step;
                    }
                }
                out.iter_mut().for_each(|o| *o *= INV_SQRT_2PI);
                out
            })
            .collect();
        parts.concat()
    }
}

/// Constants for the norm and sampling bounds of one kernel and node set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormConstants {
    pub kernel: KernelConstants,
    /// Riesz constant `C_X` of the window exponentials.
    pub basis: f64,
    pub kadec_pass: bool,
}

impl NormConstants {
    pub fn new(kernel: &Kernel, nodes: &NodeSet) -> Result<Self> {
        let riesz = riesz_estimate(nodes)?;
        Ok(Self {
            kernel: kernel_constants(kernel)?,
            basis: riesz.basis_constant,
            kadec_pass: kadec_check(nodes).verdict == KadecVerdict::GuaranteedCis,
        })
    }

    /// `(δ_ψ / C_X², C_X² ‖ψ̂‖_W)`, the sandwich for `‖f‖ / ‖c‖`.
    pub fn coefficient_sandwich(&self) -> (f64, f64) {
        let b2 = self.basis * self.basis;
        (self.kernel.delta / b2, b2 * self.kernel.amalgam)
    }

    /// `1 + C_X⁴ C_ψ²`, the factor in `‖f‖² ≤ (…) ‖f̂‖²_{L2(T)}`.
    pub fn torus_energy_factor(&self) -> f64 {
        1.0 + self.basis.powi(4) * self.kernel.c.powi(2)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormEquivalence {
    pub f_norm: f64,
    pub coefficient_norm: f64,
    pub sample_norm: f64,
    pub f_over_c: f64,
    pub samples_over_c: f64,
    pub f_over_samples: f64,
    pub lower: f64,
    pub upper: f64,
    pub within_sandwich: bool,
    pub kadec_pass: bool,
}

/// The three norm ratios, sampling at the generating nodes.
pub fn norm_equivalence_report(f: &QsisFunction) -> Result<NormEquivalence> {
    let constants = NormConstants::new(&f.kernel, &f.nodes)?;
    norm_equivalence_with(f, &constants)
}

/// [`norm_equivalence_report`] with precomputed constants.
pub fn norm_equivalence_with(
    f: &QsisFunction,
    constants: &NormConstants,
) -> Result<NormEquivalence> {
    let f_norm = f.norm()?;
    let coefficient_norm = f.coefficient_norm();
    let sample_norm = norm(&f.sample(&f.nodes)?);
    let (lower, upper) = constants.coefficient_sandwich();
    let f_over_c = f_norm / coefficient_norm;
    Ok(NormEquivalence {
        f_norm,
        coefficient_norm,
        sample_norm,
        f_over_c,
        samples_over_c: sample_norm / coefficient_norm,
        f_over_samples: f_norm / sample_norm,
        lower,
        upper,
        within_sandwich: f_over_c >= lower && f_over_c <= upper,
        kadec_pass: constants.kadec_pass,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BandlimitReport {
    /// Energy outside `T` over total energy.
    pub tail_fraction: f64,
    /// `‖f̂‖²_{L2(T)}`.
    pub torus_energy: f64,
    /// `‖f‖²` by Plancherel over the scanned cells.
    pub total_energy: f64,
    pub cells: usize,
}

impl BandlimitReport {
    /// `‖f̂‖²_T ≤ ‖f‖² ≤ factor · ‖f̂‖²_T`.
    pub fn sandwich_holds(&self, factor: f64) -> bool {
        let slack = 1e-12 * self.total_energy;
        self.torus_energy <= self.total_energy + slack
            && self.total_energy <= factor * self.torus_energy + slack
    }
}

/// Fourier-side energy of `f` outside `T`, over the cells reaching `|ξ| ≤ Ξ`.
pub fn bandlimit_check(f: &QsisFunction, cutoff: f64) -> Result<BandlimitReport> {
    if !(cutoff >= PI && cutoff.is_finite()) {
        return Err(Error::Range(format!(
            "cutoff must be a finite value ≥ π, got {cutoff}"
        )));
    }
    let mut cells = ((cutoff - PI) / (2.0 * PI)).ceil() as usize;
    if let Some(n) = f.kernel.support().cells() {
        cells = cells.min(n);
    }
    let side = f.fourier_side(cells)?;
    let total = side.total_energy();
    let torus = side.cell_energy(0);
    Ok(BandlimitReport {
        tail_fraction: if total > 0.0 {
            (total - torus).max(0.0) / total
        } else {
            0.0
        },
        torus_energy: torus,
        total_energy: total,
        cells,
    })
}

/// Both sides of the sampling bound at a second node set `Y`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleBound {
    pub sample_norm: f64,
    /// `(2π)^{-1/2} C_X² C_Y³ (‖ψ̂‖_{L∞(T)}/δ_ψ + C_ψ) ‖f‖`.
    pub f_form: f64,
    /// `(2π)^{-1/2} C_X³ C_Y³ ‖ψ̂‖_W ‖c‖`.
    pub c_form: f64,
}

impl SampleBound {
    pub fn holds(&self) -> bool {
        self.sample_norm <= self.f_form && self.sample_norm <= self.c_form
    }
}

pub fn sample_bound(
    f: &QsisFunction,
    samples: &NodeSet,
    constants: &NormConstants,
    sample_basis: f64,
) -> Result<SampleBound> {
    let k = &constants.kernel;
    let bx = constants.basis;
    let by3 = sample_basis.powi(3);
    Ok(SampleBound {
        sample_norm: norm(&f.sample(samples)?),
        f_form: INV_SQRT_2PI * bx * bx * by3 * (k.torus_sup / k.delta + k.c) * f.norm()?,
        c_form: INV_SQRT_2PI * bx.powi(3) * by3 * k.amalgam * f.coefficient_norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gauss() -> Kernel {
        Kernel::gaussian(1.0).unwrap()
    }

    #[test]
    fn unit_coefficient_gives_kernel_value() {
        let z = NodeSet::lattice(3);
        let f = QsisFunction::translate(Kernel::triangle_spectrum(), z.clone(), 0).unwrap();
        let psi0 = Kernel::triangle_spectrum().eval_space(0.0).unwrap();
        assert_eq!(f.eval(0.0).unwrap(), psi0);
    }

    #[test]
    fn two_gaussians_at_midpoint() {
        let nodes = NodeSet::new(vec![0.0, 1.0, 2.0]).unwrap();
        // window [x_{-1}, x_0, x_1] = [0, 1, 2]; put ones on 0 and 1
        let f = QsisFunction::new(gauss(), nodes, vec![1.0, 1.0, 0.0]).unwrap();
        let hand = 2.0 * (-0.25f64).exp();
        assert!((f.eval(0.5).unwrap() - hand).abs() < 1e-15);
    }

    #[test]
    fn zero_coefficients_vanish() {
        let z = NodeSet::lattice(4);
        let f = QsisFunction::new(gauss(), z.clone(), vec![0.0; 9]).unwrap();
        for x in [-3.0, 0.1, 7.5] {
            assert_eq!(f.eval(x).unwrap(), 0.0);
        }
        assert_eq!(f.norm().unwrap(), 0.0);
    }

    #[test]
    fn window_mismatch_is_usage() {
        assert!(
            QsisFunction::new(gauss(), NodeSet::lattice(2), vec![1.0; 4])
                .unwrap_err()
                .is_usage()
        );
    }

    #[test]
    fn translate_sampled_at_nodes_is_collocation_column() {
        let x = NodeSet::kadec_alternating(4, 0.2).unwrap();
        let f = QsisFunction::translate(gauss(), x.clone(), 1).unwrap();
        let s = f.sample(&x).unwrap();
        let x1 = x.nodes()[5];
        for (v, xi) in s.iter().zip(x.nodes()) {
            assert_eq!(*v, (-(xi - x1) * (xi - x1)).exp());
        }
    }

    #[test]
    fn sinc_interpolates_on_lattice() {
        let z = NodeSet::lattice(6);
        let f = QsisFunction::random(Kernel::sinc(), z.clone(), 3).unwrap();
        let s = f.sample(&z).unwrap();
        for (a, b) in s.iter().zip(f.coefficients()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_bump_norm() {
        let f = QsisFunction::translate(gauss(), NodeSet::lattice(2), 0).unwrap();
        let expected = (PI / 2.0).powf(0.25);
        assert!((f.norm().unwrap() - expected).abs() < 1e-6);
    }

    #[test]
    fn sinc_norm_needs_wide_grid() {
        let f = QsisFunction::translate(Kernel::sinc(), NodeSet::lattice(2), 0).unwrap();
        let g = f.default_line_grid();
        assert!(g.half_width >= 256.0);
        assert!((f.l2_norm(&g).unwrap() - 1.0).abs() < 1e-4);
        let narrow = LineGrid::new(4.0, 1.0 / 64.0).unwrap();
        assert!(matches!(f.l2_norm(&narrow), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn narrow_grid_is_accuracy_error_for_gaussians() {
        let f = QsisFunction::translate(Kernel::gaussian(0.05).unwrap(), NodeSet::lattice(2), 0)
            .unwrap();
        let narrow = LineGrid::new(6.0, 1.0 / 64.0).unwrap();
        assert!(matches!(f.l2_norm(&narrow), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn sinc_lattice_ratios_are_one() {
        let f = QsisFunction::random(Kernel::sinc(), NodeSet::lattice(8), 11).unwrap();
        let r = norm_equivalence_report(&f).unwrap();
        for v in [r.f_over_c, r.samples_over_c, r.f_over_samples] {
            assert!((v - 1.0).abs() < 1e-4, "{r:?}");
        }
        assert!(r.within_sandwich && r.kadec_pass);
    }

    #[test]
    fn gaussian_lattice_sandwich_over_draws() {
        let z = NodeSet::lattice(8);
        let constants = NormConstants::new(&gauss(), &z).unwrap();
        for seed in 0..100 {
            let f = QsisFunction::random(gauss(), z.clone(), seed).unwrap();
            let r = norm_equivalence_with(&f, &constants).unwrap();
            assert!(r.within_sandwich, "seed {seed}: {r:?}");
        }
    }

    #[test]
    fn triangle_kadec_ratios_stay_bounded() {
        let x = NodeSet::kadec_alternating(8, 0.2).unwrap();
        let psi = Kernel::triangle_spectrum();
        let constants = NormConstants::new(&psi, &x).unwrap();
        let mut ratios = Vec::new();
        for seed in 0..12 {
            let f = QsisFunction::random(psi.clone(), x.clone(), seed).unwrap();
            let r = norm_equivalence_with(&f, &constants).unwrap();
            for v in [r.f_over_c, r.samples_over_c, r.f_over_samples] {
                assert!(v.is_finite() && v > 0.0);
            }
            assert!(r.within_sandwich, "{r:?}");
            ratios.push(r.f_over_c);
        }
        let (lo, hi) = ratios
            .iter()
            .fold((f64::MAX, 0.0_f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo < 10.0, "{lo} {hi}");
    }

    #[test]
    fn sinc_has_no_energy_off_torus() {
        let x = NodeSet::kadec_alternating(6, 0.2).unwrap();
        let f = QsisFunction::random(Kernel::sinc(), x, 5).unwrap();
        assert!(bandlimit_check(&f, 9.0 * PI).unwrap().tail_fraction < 1e-10);
    }

    #[test]
    fn triangle_leaks_past_torus() {
        let f = QsisFunction::random(Kernel::triangle_spectrum(), NodeSet::lattice(6), 5).unwrap();
        let r = bandlimit_check(&f, 3.0 * PI).unwrap();
        assert!(r.tail_fraction > 1e-3, "{r:?}");
        // single translate: cellwise energies of |ψ̂|² integrate in closed form
        let one =
            QsisFunction::translate(Kernel::triangle_spectrum(), NodeSet::lattice(2), 0).unwrap();
        let r = bandlimit_check(&one, 3.0 * PI).unwrap();
        // ∫_{-π}^{π}(2π−|ξ|)² = 14π³/3, ∫ over π<|ξ|<2π = 2π³/3
        let expected = (2.0 / 3.0) / (14.0 / 3.0 + 2.0 / 3.0);
        assert!((r.tail_fraction - expected).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn torus_energy_sandwich_over_draws() {
        let x = NodeSet::kadec_alternating(6, 0.2).unwrap();
        let psi = Kernel::triangle_spectrum();
        let constants = NormConstants::new(&psi, &x).unwrap();
        let factor = constants.torus_energy_factor();
        for seed in 0..50 {
            let f = QsisFunction::random(psi.clone(), x.clone(), seed).unwrap();
            let r = bandlimit_check(&f, 3.0 * PI).unwrap();
            assert!(
                r.sandwich_holds(factor),
                "seed {seed}: {r:?} factor {factor}"
            );
        }
    }

    #[test]
    fn plancherel_matches_line_norm() {
        let x = NodeSet::kadec_alternating(5, 0.2).unwrap();
        let f = QsisFunction::random(gauss(), x, 9).unwrap();
        let planch = f
            .fourier_side(gauss().space_depth().unwrap())
            .unwrap()
            .total_energy()
            .sqrt();
        assert!((planch - f.norm().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn fourier_side_samples_match_space_side() {
        let x = NodeSet::kadec_alternating(6, 0.2).unwrap();
        let y = NodeSet::half_shift(6);
        for psi in [
            gauss(),
            Kernel::poisson(2.0)
                .unwrap()
                .convolve(&Kernel::triangle_spectrum()),
        ] {
            let f = QsisFunction::random(psi.clone(), x.clone(), 21).unwrap();
            let side = f.fourier_side(psi.space_depth().unwrap()).unwrap();
            for &yj in y.nodes() {
                let direct = f.eval(yj).unwrap();
                assert!(
                    (side.eval(yj) - direct).abs() < 1e-6,
                    "{} at {yj}",
                    psi.name()
                );
            }
        }
    }

    #[test]
    fn grid_recurrence_matches_pointwise() {
        let psi = gauss().convolve(&Kernel::triangle_spectrum());
        let f = QsisFunction::random(psi.clone(), NodeSet::lattice(4), 2).unwrap();
        let side = f.fourier_side(psi.space_depth().unwrap()).unwrap();
        let grid = LineGrid::new(40.0, 1.0 / 16.0).unwrap();
        let fast = side.eval_grid(&grid);
        for i in (0..grid.len()).step_by(97) {
            assert!((fast[i] - side.eval(grid.node(i))).abs() < 1e-11);
        }
    }

    #[test]
    fn sample_bound_holds_for_random_functions() {
        let x = NodeSet::kadec_alternating(6, 0.2).unwrap();
        let y = NodeSet::half_shift(6);
        let by = riesz_estimate(&y).unwrap().basis_constant;
        for psi in [
            gauss(),
            Kernel::triangle_spectrum(),
            Kernel::poisson(1.0).unwrap(),
        ] {
            let constants = NormConstants::new(&psi, &x).unwrap();
            for seed in 0..20 {
                let f = QsisFunction::random(psi.clone(), x.clone(), seed).unwrap();
                let b = sample_bound(&f, &y, &constants, by).unwrap();
                assert!(b.holds(), "{} seed {seed}: {b:?}", psi.name());
            }
        }
    }

    #[test]
    fn json_round_trip_and_csv() {
        let f = QsisFunction::random(gauss(), NodeSet::lattice(2), 1).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(
            v.get("kernel").is_some()
                && v.get("nodes").is_some()
                && v.get("coefficients").is_some()
        );
        let back: QsisFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back.coefficients(), f.coefficients());
        let csv = f.grid_csv(&LineGrid::new(1.0, 0.5).unwrap()).unwrap();
        assert_eq!(csv.lines().next(), Some("x,f(x)"));
        assert_eq!(csv.lines().count(), 6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn eval_is_linear(a in proptest::collection::vec(-3.0f64..3.0, 7),
                          b in proptest::collection::vec(-3.0f64..3.0, 7),
                          x in -10.0f64..10.0) {
            let z = NodeSet::kadec_alternating(3, 0.1).unwrap();
            let psi = Kernel::poisson(1.5).unwrap();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
            let fa = QsisFunction::new(psi.clone(), z.clone(), a).unwrap().eval(x).unwrap();
            let fb = QsisFunction::new(psi.clone(), z.clone(), b).unwrap().eval(x).unwrap();
            let fs = QsisFunction::new(psi, z, sum).unwrap().eval(x).unwrap();
            prop_assert!((fs - fa - fb).abs() <= 1e-14 * (1.0 + fa.abs() + fb.abs()));
        }
    }
}
