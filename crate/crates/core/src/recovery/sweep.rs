use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{BaseFamily, Construction, FamilySpec};
use super::{nonincreasing_top_half, strictly_decreasing};
use crate::cardinal::cardinal_depth;
use crate::error::{Error, Result};
use crate::fourier::{LineGrid, TorusGrid};
use crate::interp::{assemble, compare};
use crate::kernel::{kernel_constants, ln_periodized, Kernel};
use crate::nodes::{riesz_estimate, NodeSet};
use crate::qsis::QsisFunction;
use crate::random::unit_coefficients;

/// How a sweep row was interpolated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Dense collocation solve on the `𝒴` window.
    Collocation,
    /// `Σ_j f(y_j) L_{φ_α}(· − y_j)` on a lattice window.
    Cardinal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowValues {
    pub l2_error: f64,
    pub sup_error: f64,
    pub relative_l2: f64,
    pub relative_sup: f64,
    pub kappa: f64,
    pub coeff_norm: f64,
    /// `max_j |I f(y_j) − f(y_j)|`.
    pub node_residual: f64,
    /// `‖(I f)^‖_{L2(T)}`.
    pub torus_norm: f64,
    /// `(1 + C_𝒴⁴C_φ)(1 + C_𝒳²C_𝒴²C_ψ) ‖f̂‖_{L2(T)}`.
    pub torus_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub route: Route,
    pub values: Option<RowValues>,
    pub error: Option<RowError>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: FamilySpec,
    pub seed: Option<u64>,
    pub grid: LineGrid,
    pub central_fraction: f64,
    pub window_x: usize,
    pub window_y: usize,
    /// `‖f‖` on the central grid.
    pub f_l2: f64,
    pub f_torus_norm: f64,
    pub rows: Vec<SweepRow>,
}

/// Frozen CSV header of sweep tables.
pub const SWEEP_CSV_HEADER: &str = "alpha,l2_error,sup_error,kappa,coeff_norm";

impl SweepReport {
    fn column(&self, f: impl Fn(&RowValues) -> f64) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.values.as_ref().map_or(f64::NAN, &f))
            .collect()
    }

    pub fn l2_errors(&self) -> Vec<f64> {
        self.column(|v| v.l2_error)
    }

    pub fn sup_errors(&self) -> Vec<f64> {
        self.column(|v| v.sup_error)
    }

    pub fn all_rows_ok(&self) -> bool {
        self.rows.iter().all(|r| r.values.is_some())
    }

    /// Last over first central L2 error.
    pub fn final_ratio(&self) -> f64 {
        let e = self.l2_errors();
        e[e.len() - 1] / e[0]
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.all_rows_ok()
            && strictly_decreasing(&self.l2_errors())
            && strictly_decreasing(&self.sup_errors())
    }

    /// Errors nonincreasing over the top half of the `α` list.
    pub fn converging(&self) -> bool {
        self.all_rows_ok() && nonincreasing_top_half(&self.l2_errors())
    }

    /// The torus bound on `‖(I f)^‖` holds on every row.
    pub fn torus_bound_holds(&self) -> bool {
        self.rows
            .iter()
            .filter_map(|r| r.values.as_ref())
            .all(|v| v.torus_norm <= v.torus_bound)
    }

    pub fn max_node_residual(&self) -> f64 {
        self.column(|v| v.node_residual)
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn csv(&self) -> String {
        let mut out = format!("{SWEEP_CSV_HEADER}\n");
        for r in &self.rows {
            let v = r.values.as_ref();
            let get = |f: fn(&RowValues) -> f64| v.map_or(f64::NAN, f);
            out.push_str(&crate::table::row(&[
                r.alpha,
                get(|v| v.l2_error),
                get(|v| v.sup_error),
                get(|v| v.kappa),
                get(|v| v.coeff_norm),
            ]));
        }
        out
    }
}

/// Lattice windows with a regular Gaussian family use the cardinal form;
/// dense collocation is singular to working precision there.
fn route_for(spec: &FamilySpec) -> Route {
    if *spec.construction() == Construction::RegularGaussian && spec.nodes_y().is_lattice() {
        Route::Cardinal
    } else {
        Route::Collocation
    }
}

/// `κ = max σ / min σ` and `‖a‖` for the bi-infinite lattice interpolant
/// with data `f_j` on the window, from the symbol `σ = Σ_k φ̂(· + 2πk)`.
///
/// `Σ_n a_n e^{-inξ} = (2π)^{-1/2} F(ξ)/σ(ξ)`, so
/// `‖a‖² = (2π)^{-2} ∫_T |F|²/σ²`, evaluated in log space.
pub fn lattice_symbol_stats(
    phi: &Kernel,
    depth: usize,
    nodes: &NodeSet,
    data: &[f64],
) -> (f64, f64) {
    let scan = TorusGrid::scan();
    let ln_sigma: Vec<f64> = scan
        .nodes()
        .iter()
        .map(|&xi| ln_periodized(phi, xi, depth))
        .collect();
    let hi = ln_sigma.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ln_sigma.iter().cloned().fold(f64::INFINITY, f64::min);
    let grid = TorusGrid::quadrature();
    let terms: Vec<f64> = grid
        .nodes()
        .par_iter()
        .zip(grid.weights())
        .map(|(&xi, &w)| {
            let f: C64 = data
                .iter()
                .zip(nodes.nodes())
                .map(|(d, y)| C64::from_polar(*d, -y * xi))
                .sum();
            w.ln() + f.norm_sqr().ln() - 2.0 * ln_periodized(phi, xi, depth) - 2.0 * (2.0 * PI).ln()
        })
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let coeff = if top.is_finite() {
        let s: f64 = terms.iter().map(|t| (t - top).exp()).sum();
        (0.5 * (top + s.ln())).exp()
    } else {
        0.0
    };
    ((hi - lo).exp(), coeff)
}

struct Shared<'a> {
    spec: &'a FamilySpec,
    samples: Vec<f64>,
    central: LineGrid,
    fv: Vec<f64>,
    f_torus: f64,
    basis_x: f64,
    basis_y: f64,
    c_psi: f64,
}

fn sweep_row(shared: &Shared, alpha: f64, route: Route) -> Result<RowValues> {
    let spec = shared.spec;
    let y = spec.nodes_y();
    let member = spec.member(alpha)?;
    let (g, kappa, coeff_norm) = match route {
        Route::Collocation => {
            let interpolant = assemble(&member, y)?.solve(&shared.samples)?;
            let norm = interpolant.coefficient_norm();
            (interpolant.function(), interpolant.kappa, norm)
        }
        Route::Cardinal => {
            let depth = cardinal_depth(&member);
            let (kappa, coeff) = lattice_symbol_stats(&member, depth, y, &shared.samples);
            let cardinal = Kernel::cardinal(member.clone(), depth)?;
            (
                QsisFunction::new(cardinal, y.clone(), shared.samples.clone())?,
                kappa,
                coeff,
            )
        }
    };
    let at_nodes = g.sample(y)?;
    let node_residual = at_nodes
        .iter()
        .zip(&shared.samples)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let gv = g.eval_grid(&shared.central)?;
    let report = compare(&shared.fv, &gv, shared.central.clone());
    let torus_norm = g.fourier_side(0)?.cell_energy(0).sqrt();
    let c_phi = kernel_constants(&member)?.c;
    let (bx2, by2) = (shared.basis_x.powi(2), shared.basis_y.powi(2));
    let torus_bound = (1.0 + by2 * by2 * c_phi) * (1.0 + bx2 * by2 * shared.c_psi) * shared.f_torus;
    Ok(RowValues {
        l2_error: report.l2_error,
        sup_error: report.sup_error,
        relative_l2: report.relative_l2,
        relative_sup: report.relative_sup,
        kappa,
        coeff_norm,
        node_residual,
        torus_norm,
        torus_bound,
    })
}

/// Interpolate `f ∈ V(ψ, 𝒳)` from its `𝒴` samples with every member of the
/// family and record central errors. Rows are independent; a failing row
/// records its error and the sweep continues.
pub fn recovery_sweep(
    spec: &FamilySpec,
    f: &QsisFunction,
    grid: &LineGrid,
    central_fraction: f64,
    seed: Option<u64>,
) -> Result<SweepReport> {
    if f.kernel() != spec.target() || f.nodes() != spec.nodes_x() {
        return Err(Error::Usage(
            "test function must lie in V(target, X) of the family".into(),
        ));
    }
    let central = grid.central(central_fraction)?;
    let fv = f.eval_grid(&central)?;
    let f_l2 = crate::fourier::l2_norm_line(&fv, &central)?;
    let shared = Shared {
        spec,
        samples: f.sample(spec.nodes_y())?,
        central,
        fv,
        f_torus: f.fourier_side(0)?.cell_energy(0).sqrt(),
        basis_x: riesz_estimate(spec.nodes_x())?.basis_constant,
        basis_y: riesz_estimate(spec.nodes_y())?.basis_constant,
        c_psi: kernel_constants(spec.target())?.c,
    };
    let route = route_for(spec);
    let rows = spec
        .alphas()
        .par_iter()
        .map(|&alpha| match sweep_row(&shared, alpha, route) {
            Ok(v) => SweepRow {
                alpha,
                route,
                values: Some(v),
                error: None,
            },
            Err(e) => SweepRow {
                alpha,
                route,
                values: None,
                error: Some(RowError {
                    kind: e.kind().into(),
                    message: e.to_string(),
                }),
            },
        })
        .collect();
    Ok(SweepReport {
        family: spec.clone(),
        seed,
        grid: grid.clone(),
        central_fraction,
        window_x: spec.nodes_x().half(),
        window_y: spec.nodes_y().half(),
        f_l2,
        f_torus_norm: shared.f_torus,
        rows,
    })
}

/// [`recovery_sweep`] on a seeded unit-coefficient member of `V(ψ, 𝒳)`
/// over its default grid and the default central fraction.
pub fn random_recovery_sweep(spec: &FamilySpec, seed: u64) -> Result<SweepReport> {
    let f = QsisFunction::random(spec.target().clone(), spec.nodes_x().clone(), seed)?;
    recovery_sweep(
        spec,
        &f,
        &f.default_line_grid(),
        crate::tolerances::CENTRAL_FRACTION,
        Some(seed),
    )
}

/// Required share of the initial error left at the last `α`.
pub const COUNTEREXAMPLE_FLOOR: f64 = 0.5;

/// Weight of the seeded perturbation added to `ψ(· − √2)`.
pub const COUNTEREXAMPLE_NOISE: f64 = 0.5;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub runs: Vec<SweepReport>,
    pub control: SweepReport,
    pub floor: f64,
    /// Every run keeps more than `floor` of its initial error.
    pub persistent_floor: bool,
    pub control_strictly_decreasing: bool,
    pub control_final_ratio: f64,
    pub max_node_residual: f64,
}

/// `ψ = gaussian(1)`, `𝒳` = lattice with `1 → √2`, `𝒴 = Z`,
/// `f = ψ(· − √2) + 0.5 · (seeded unit combination)`, gaussian-convolution
/// family. The control run uses `𝒳 = 𝒴 = Z` and `f = ψ`.
pub fn counterexample_run(
    alphas: &[f64],
    half: usize,
    seeds: &[u64],
) -> Result<CounterexampleReport> {
    let psi = Kernel::gaussian(1.0)?;
    let x = NodeSet::sqrt2_swap(half)?;
    let z = NodeSet::lattice(half);
    let family = Construction::Convolution {
        base: BaseFamily::Gaussian,
    };
    let spec = FamilySpec::new(
        family.clone(),
        alphas.to_vec(),
        psi.clone(),
        x.clone(),
        z.clone(),
    )?;
    let fraction = crate::tolerances::CENTRAL_FRACTION;
    let runs = seeds
        .iter()
        .map(|&seed| {
            let mut c = unit_coefficients(x.len(), seed);
            c.iter_mut().for_each(|v| *v *= COUNTEREXAMPLE_NOISE);
            c[half + 1] += 1.0;
            let f = QsisFunction::new(psi.clone(), x.clone(), c)?;
            recovery_sweep(&spec, &f, &f.default_line_grid(), fraction, Some(seed))
        })
        .collect::<Result<Vec<_>>>()?;
    let control_spec = spec.with_nodes(z.clone(), z.clone());
    let f0 = QsisFunction::translate(psi, z, 0)?;
    let control = recovery_sweep(&control_spec, &f0, &f0.default_line_grid(), fraction, None)?;
    let persistent_floor = runs
        .iter()
        .all(|r| r.all_rows_ok() && r.final_ratio() > COUNTEREXAMPLE_FLOOR);
    let max_node_residual = runs
        .iter()
        .chain(std::iter::once(&control))
        .map(|r| r.max_node_residual())
        .fold(0.0, f64::max);
    Ok(CounterexampleReport {
        persistent_floor,
        control_strictly_decreasing: control.strictly_decreasing(),
        control_final_ratio: control.final_ratio(),
        floor: COUNTEREXAMPLE_FLOOR,
        max_node_residual,
        runs,
        control,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfShiftRow {
    #[serde(rename = "J")]
    pub half: usize,
    /// `κ₂` of `[ψ(y_j − x_k)]` with `𝒳 = Z`, `𝒴 = Z + 1/2`.
    pub kappa_mixed: f64,
    /// `κ₂` of `[ψ(x_j − x_k)]` on `Z`.
    pub kappa_control: f64,
    pub solvable: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfShiftTable {
    pub kernel: Kernel,
    pub rows: Vec<HalfShiftRow>,
    pub mixed_increasing: bool,
    /// Relative change of the control `κ` over the last step.
    pub control_last_change: f64,
}

/// Control sections count as stable when the last step moves `κ` by less.
pub const CONTROL_STABLE_REL: f64 = 0.05;

impl HalfShiftTable {
    pub fn control_stable(&self) -> bool {
        self.control_last_change <= CONTROL_STABLE_REL
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("J,kappa_mixed,kappa_control\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{}",
                r.half,
                crate::table::row(&[r.kappa_mixed, r.kappa_control])
            ));
        }
        out
    }
}

fn kappa2(m: &DMatrix<f64>) -> f64 {
    let s = m.singular_values();
    s.max() / s.min()
}

/// Condition numbers of the half-shifted Gaussian sections as `J` grows.
pub fn half_shift_conditioning(halves: &[usize]) -> Result<HalfShiftTable> {
    if halves.is_empty() || halves.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage(
            "window sizes must be nonempty and strictly increasing".into(),
        ));
    }
    let psi = Kernel::gaussian(1.0)?;
    let rows = halves
        .par_iter()
        .map(|&half| {
            let x = NodeSet::lattice(half);
            let y = NodeSet::half_shift(half);
            let n = x.len();
            let build = |rows: &NodeSet| -> Result<DMatrix<f64>> {
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    for k in 0..n {
                        m[(i, k)] = psi.eval_space(rows.nodes()[i] - x.nodes()[k])?;
                    }
                }
                Ok(m)
            };
            let mixed = build(&y)?;
            let control = build(&x)?;
            let rhs = nalgebra::DVector::from_element(n, 1.0);
            let solvable = mixed
                .clone()
                .lu()
                .solve(&rhs)
                .is_some_and(|a| a.iter().all(|v| v.is_finite()));
            Ok(HalfShiftRow {
                half,
                kappa_mixed: kappa2(&mixed),
                kappa_control: kappa2(&control),
                solvable,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mixed_increasing = rows.windows(2).all(|w| w[1].kappa_mixed > w[0].kappa_mixed);
    let control_last_change = match rows.len() {
        0 | 1 => 0.0,
        n => (rows[n - 1].kappa_control / rows[n - 2].kappa_control - 1.0).abs(),
    };
    Ok(HalfShiftTable {
        kernel: psi,
        rows,
        mixed_increasing,
        control_last_change,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleCheck {
    /// `f(y_j)` from the cellwise Fourier expansion.
    pub fourier: Vec<f64>,
    /// `f(y_j)` evaluated in space.
    pub space: Vec<f64>,
    pub max_discrepancy: f64,
}

/// `f(y_j) = (2π)^{-1/2} Σ_{|k|≤K} ∫_T f̂(ξ + 2πk) e^{i y_j (ξ + 2πk)} dξ`
/// against space-side values.
pub fn fourier_side_sample_check(
    f: &QsisFunction,
    y: &NodeSet,
    depth: usize,
) -> Result<SampleCheck> {
    let side = f.fourier_side(depth)?;
    let fourier: Vec<f64> = y.nodes().par_iter().map(|&t| side.eval(t)).collect();
    let space = y
        .nodes()
        .iter()
        .map(|&t| f.eval(t))
        .collect::<Result<Vec<_>>>()?;
    let max_discrepancy = fourier
        .iter()
        .zip(&space)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SampleCheck {
        fourier,
        space,
        max_discrepancy,
    })
}
