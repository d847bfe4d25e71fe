//! Collocation interpolation `I f(x) = Σ_j a_j φ(x − y_j)` with `I f(y_k) = f(y_k)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{l2_norm_line, LineGrid};
use crate::kernel::Kernel;
use crate::nodes::NodeSet;
use crate::qsis::{NormConstants, QsisFunction};
use crate::tolerances;

/// The collocation matrix `A[j,k] = φ(y_j − y_k)`.
#[derive(Clone, Debug)]
pub struct CollocationSystem {
    kernel: Kernel,
    nodes: NodeSet,
    matrix: DMatrix<f64>,
}

pub fn assemble(kernel: &Kernel, nodes: &NodeSet) -> Result<CollocationSystem> {
    let y = nodes.nodes();
    if y.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("collocation nodes must be distinct".into()));
    }
    let n = y.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (j..n)
                .map(|k| kernel.eval_space(y[j] - y[k]))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut matrix = DMatrix::zeros(n, n);
    for (j, row) in rows.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            matrix[(j, j + offset)] = v;
            matrix[(j + offset, j)] = v;
        }
    }
    Ok(CollocationSystem {
        kernel: kernel.clone(),
        nodes: nodes.clone(),
        matrix,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorKind {
    Cholesky,
    Lu,
}

/// A factored system ready for repeated right-hand sides.
#[derive(Clone, Debug)]
pub struct Factorization {
    system: CollocationSystem,
    kind: FactorKind,
    inverse: DMatrix<f64>,
    kappa: f64,
}

impl CollocationSystem {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Cholesky, falling back to pivoted LU; singular systems carry their κ.
    pub fn factorize(&self) -> Result<Factorization> {
        let n = self.matrix.nrows();
        let identity = DMatrix::<f64>::identity(n, n);
        let (kind, inverse) = match self.matrix.clone().cholesky() {
            Some(ch) => (FactorKind::Cholesky, ch.solve(&identity)),
            None => {
                let lu = self.matrix.clone().full_piv_lu();
                match lu.solve(&identity) {
                    Some(inv) => (FactorKind::Lu, inv),
                    None => {
                        return Err(Error::Singular {
                            condition: f64::INFINITY,
                        })
                    }
                }
            }
        };
        let kappa = one_norm(&self.matrix) * one_norm(&inverse);
        if !kappa.is_finite() || kappa >= tolerances::SINGULAR_CONDITION {
            return Err(Error::Singular { condition: kappa });
        }
        Ok(Factorization {
            system: self.clone(),
            kind,
            inverse,
            kappa,
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Interpolant> {
        self.factorize()?.solve(rhs)
    }
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl Factorization {
    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    /// 1-norm condition number.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn system(&self) -> &CollocationSystem {
        &self.system
    }

    /// Coefficients with one step of iterative refinement.
    pub fn coefficients(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let a = &self.system.matrix;
        if rhs.len() != a.nrows() {
            return Err(Error::Usage(format!(
                "{} samples for {} collocation nodes",
                rhs.len(),
                a.nrows()
            )));
        }
        let b = DVector::from_column_slice(rhs);
        let mut x = &self.inverse * &b;
        let r = &b - a * &x;
        x += &self.inverse * r;
        Ok(x.iter().copied().collect())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Interpolant> {
        let coefficients = self.coefficients(rhs)?;
        let a = &self.system.matrix;
        let fitted = a * DVector::from_column_slice(&coefficients);
        let residual = fitted
            .iter()
            .zip(rhs)
            .map(|(g, f)| (g - f).abs())
            .fold(0.0, f64::max);
        let scale = rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if residual > self.kappa * tolerances::SOLVER_CONTRACT * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Numeric(format!(
                "collocation residual {residual:e} exceeds κ·{:e}·{scale:e} with κ = {:e}",
                tolerances::SOLVER_CONTRACT,
                self.kappa
            )));
        }
        Ok(Interpolant {
            kernel: self.system.kernel.clone(),
            nodes: self.system.nodes.clone(),
            coefficients,
            kappa: self.kappa,
            residual,
        })
    }
}

/// Solved collocation coefficients with their conditioning.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Interpolant {
    pub kernel: Kernel,
    pub nodes: NodeSet,
    pub coefficients: Vec<f64>,
    pub kappa: f64,
    /// `max_j |I f(y_j) − f(y_j)|`.
    pub residual: f64,
}

impl Interpolant {
    /// The interpolant as a member of `V(φ, Y)`.
    pub fn function(&self) -> QsisFunction {
        QsisFunction::new(
            self.kernel.clone(),
            self.nodes.clone(),
            self.coefficients.clone(),
        )
        .expect("solved coefficients match the node window")
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.function().eval(x)
    }

    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Sample `f` at the nodes and solve the collocation system.
pub fn interpolate(f: &QsisFunction, kernel: &Kernel, nodes: &NodeSet) -> Result<Interpolant> {
    let samples = f.sample(nodes)?;
    assemble(kernel, nodes)?.solve(&samples)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub l2_error: f64,
    pub sup_error: f64,
    pub f_l2: f64,
    pub f_sup: f64,
    pub relative_l2: f64,
    pub relative_sup: f64,
    pub central: LineGrid,
}

/// Errors of `g` against `f` on the central part of `grid`.
pub fn residual_report(
    f: &QsisFunction,
    g: &Interpolant,
    grid: &LineGrid,
    fraction: f64,
) -> Result<ResidualReport> {
    let central = grid.central(fraction)?;
    let fv = f.eval_grid(&central)?;
    let gv = g.function().eval_grid(&central)?;
    Ok(compare(&fv, &gv, central))
}

pub(crate) fn compare(fv: &[f64], gv: &[f64], central: LineGrid) -> ResidualReport {
    let diff: Vec<f64> = fv.iter().zip(gv).map(|(a, b)| a - b).collect();
    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let l2_error = l2_norm_line(&diff, &central).expect("sizes match");
    let f_l2 = l2_norm_line(fv, &central).expect("sizes match");
    let (sup_error, f_sup) = (sup(&diff), sup(fv));
    let rel = |e: f64, s: f64| if s > 0.0 { e / s } else { e };
    ResidualReport {
        l2_error,
        sup_error,
        f_l2,
        f_sup,
        relative_l2: rel(l2_error, f_l2),
        relative_sup: rel(sup_error, f_sup),
        central,
    }
}

/// CSV with columns `x,f,g,f-g` over the central grid.
pub fn residual_table_csv(
    f: &QsisFunction,
    g: &Interpolant,
    grid: &LineGrid,
    fraction: f64,
) -> Result<String> {
    let central = grid.central(fraction)?;
    let fv = f.eval_grid(&central)?;
    let gv = g.function().eval_grid(&central)?;
    let mut out = String::from("x,f,g,f-g\n");
    for (i, (a, b)) in fv.iter().zip(&gv).enumerate() {
        out.push_str(&crate::table::row(&[central.node(i), *a, *b, a - b]));
    }
    Ok(out)
}

/// Both sides of the coefficient bound for a solved interpolant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientBound {
    pub coefficient_norm: f64,
    /// `C⁴ (‖φ̂‖_{L∞(T)}/δ_φ + C² C_φ) ‖(f(y_j))‖`.
    pub bound: f64,
}

impl CoefficientBound {
    pub fn holds(&self) -> bool {
        self.coefficient_norm <= self.bound
    }
}

/// `constants` must describe the interpolation kernel and nodes.
pub fn coefficient_bound(
    g: &Interpolant,
    samples: &[f64],
    constants: &NormConstants,
) -> CoefficientBound {
    let k = &constants.kernel;
    let b2 = constants.basis * constants.basis;
    let sample_norm = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
    CoefficientBound {
        coefficient_norm: g.coefficient_norm(),
        bound: b2 * b2 * (k.torus_sup / k.delta + b2 * k.c) * sample_norm,
    }
}
