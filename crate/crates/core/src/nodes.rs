//! Finite windows of interpolation nodes and nonharmonic exponentials.
//!
//! A window `x_{-J} < … < x_J` stands in for a complete interpolating
//! sequence. The exponentials `e_j(ξ) = e^{-i x_j ξ}` on the torus, their
//! Gram matrix, and the prolongation `A^k` (shift of the expansion by
//! `2πk`) are realized on the span of the window.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{sin_pi, TorusGrid};
use crate::tolerances;

type C64 = Complex64;

/// Strictly increasing nodes indexed `-J..=J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NodeSetRepr", into = "NodeSetRepr")]
pub struct NodeSet {
    nodes: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct NodeSetRepr {
    #[serde(rename = "J")]
    half: usize,
    nodes: Vec<f64>,
}

impl TryFrom<NodeSetRepr> for NodeSet {
    type Error = Error;

    fn try_from(r: NodeSetRepr) -> Result<Self> {
        let set = NodeSet::new(r.nodes)?;
        if set.half() != r.half {
            return Err(Error::Usage(format!(
                "J = {} does not match {} nodes",
                r.half,
                set.len()
            )));
        }
        Ok(set)
    }
}

impl From<NodeSet> for NodeSetRepr {
    fn from(s: NodeSet) -> Self {
        NodeSetRepr {
            half: s.half(),
            nodes: s.nodes,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KadecVerdict {
    GuaranteedCis,
    /// Kadec's condition is sufficient only; this is not a disproof.
    NotGuaranteed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KadecCheck {
    pub deviation: f64,
    pub verdict: KadecVerdict,
}

impl NodeSet {
    /// Odd number of finite, strictly increasing nodes.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len().is_multiple_of(2) {
            return Err(Error::Usage(format!(
                "a symmetric window needs an odd node count, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Usage("nodes must be finite".into()));
        }
        if let Some(w) = nodes.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Usage(format!(
                "nodes must be strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { nodes })
    }

    fn from_fn(half: usize, f: impl Fn(i64) -> f64) -> Result<Self> {
        let j = half as i64;
        Self::new((-j..=j).map(f).collect())
    }

    /// `x_j = j`.
    pub fn lattice(half: usize) -> Self {
        Self::from_fn(half, |j| j as f64).expect("lattice is valid")
    }

    /// `x_j = j + ε(-1)^j`, valid for `|ε| < 1/2`.
    pub fn kadec_alternating(half: usize, eps: f64) -> Result<Self> {
        if !(eps.abs() < 0.5) {
            return Err(Error::Range(format!(
                "alternating perturbation must satisfy |eps| < 1/2, got {eps}"
            )));
        }
        Self::from_fn(half, |j| j as f64 + if j % 2 == 0 { eps } else { -eps })
    }

    /// The lattice with `1` replaced by `√2`.
    pub fn sqrt2_swap(half: usize) -> Result<Self> {
        if half < 2 {
            return Err(Error::Range("sqrt2-swap needs J >= 2".into()));
        }
        Self::from_fn(half, |j| if j == 1 { SQRT_2 } else { j as f64 })
    }

    /// `x_j = j + 1/2`.
    pub fn half_shift(half: usize) -> Self {
        Self::from_fn(half, |j| j as f64 + 0.5).expect("shifted lattice is valid")
    }

    /// Parse `lattice`, `kadec-alternating:0.2`, `sqrt2-swap`, `half-shift`
    /// or an explicit list `[x, y, …]`.
    pub fn parse(text: &str, half: usize) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('[') {
            let inner = t.trim_start_matches('[').trim_end_matches(']');
            let nodes = inner
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Usage(format!("bad node {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::new(nodes);
        }
        let (name, arg) = match t.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (t, None),
        };
        let arg = |default: f64| -> Result<f64> {
            arg.map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Usage(format!("bad node parameter {a:?}")))
            })
            .unwrap_or(Ok(default))
        };
        match name {
            "lattice" => Ok(Self::lattice(half)),
            "kadec-alternating" => Self::kadec_alternating(half, arg(0.2)?),
            "sqrt2-swap" => Self::sqrt2_swap(half),
            "half-shift" => Ok(Self::half_shift(half)),
            other => Err(Error::Usage(format!("unknown node set {other:?}"))),
        }
    }

    /// `J`.
    pub fn half(&self) -> usize {
        self.nodes.len() / 2
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Window indices `-J..=J` in storage order.
    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let j = self.half() as i64;
        -j..=j
    }

    /// Smallest gap `q`.
    pub fn separation(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest gap `Q`.
    pub fn spread(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn is_lattice(&self) -> bool {
        self.indices().zip(&self.nodes).all(|(j, &x)| x == j as f64)
    }
}

/// `max_j |x_j − j|` against the Kadec 1/4 bound.
pub fn kadec_check(nodes: &NodeSet) -> KadecCheck {
    let deviation = nodes
        .indices()
        .zip(nodes.nodes())
        .map(|(j, x)| (x - j as f64).abs())
        .fold(0.0, f64::max);
    let verdict = if deviation < 0.25 {
        KadecVerdict::GuaranteedCis
    } else {
        KadecVerdict::NotGuaranteed
    };
    KadecCheck { deviation, verdict }
}

/// `G_jk = ⟨e^{-i x_j ·}, e^{-i x_k ·}⟩_{L2(T)} = 2 sin(π(x_j − x_k))/(x_j − x_k)`.
pub fn gram_exponentials(nodes: &NodeSet) -> DMatrix<f64> {
    let x = nodes.nodes();
    DMatrix::from_fn(x.len(), x.len(), |j, k| {
        if j == k {
            2.0 * PI
        } else {
            let d = x[j] - x[k];
            2.0 * sin_pi(d) / d
        }
    })
}

/// Riesz bounds of the exponential window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `max(√(λmax/2π), √(2π/λmin))`; the lattice gives exactly 1.
    #[serde(rename = "C")]
    pub c: f64,
    /// Unnormalized constant `max(√λmax, 1/√λmin)`, the convention of the
    /// classical sampling and coefficient bounds.
    pub basis_constant: f64,
    pub kadec_deviation: f64,
    pub kadec_pass: bool,
}

/// Eigen-extremes of the Gram section.
pub fn riesz_estimate(nodes: &NodeSet) -> Result<RieszEstimate> {
    let eig = gram_exponentials(nodes).symmetric_eigenvalues();
    if eig.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(
            "eigensolve of the Gram matrix produced non-finite values".into(),
        ));
    }
    let lambda_min = eig.min();
    let lambda_max = eig.max();
    if !(lambda_min > 0.0) {
        return Err(Error::Conditioning {
            condition: f64::INFINITY,
            context: "Gram section is not positive".into(),
        });
    }
    let two_pi = 2.0 * PI;
    let c = (lambda_max / two_pi)
        .sqrt()
        .max((two_pi / lambda_min).sqrt());
    let basis_constant = lambda_max.sqrt().max(1.0 / lambda_min.sqrt());
    let kadec = kadec_check(nodes);
    Ok(RieszEstimate {
        lambda_min,
        lambda_max,
        c,
        basis_constant,
        kadec_deviation: kadec.deviation,
        kadec_pass: kadec.verdict == KadecVerdict::GuaranteedCis,
    })
}

/// The exponential window sampled on a torus grid.
///
/// Holds `E[m, j] = e^{-i x_j ξ_m}` and a Cholesky factor of the closed-form
/// Gram matrix; `A^k` multiplies coefficient `j` by `e^{-2πik x_j}`.
#[derive(Clone, Debug)]
pub struct ExponentialBasis {
    nodes: NodeSet,
    grid: TorusGrid,
    phases: DMatrix<C64>,
    gram: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
    condition: f64,
}

impl ExponentialBasis {
    pub fn new(nodes: &NodeSet, grid: &TorusGrid) -> Result<Self> {
        let gram = gram_exponentials(nodes);
        let eig = gram.clone().symmetric_eigenvalues();
        let condition = eig.max() / eig.min();
        if !(condition.is_finite()
            && condition > 0.0
            && condition <= tolerances::GRAM_CONDITION_MAX)
        {
            return Err(Error::Conditioning {
                condition: if condition > 0.0 {
                    condition
                } else {
                    f64::INFINITY
                },
                context: "exponential Gram section".into(),
            });
        }
        let factor = Cholesky::new(gram.clone()).ok_or_else(|| {
            Error::Numeric("Cholesky factorization of the Gram matrix failed".into())
        })?;
        let x = nodes.nodes();
        let xi = grid.nodes();
        let phases = DMatrix::from_fn(xi.len(), x.len(), |m, j| {
            C64::from_polar(1.0, -x[j] * xi[m])
        });
        Ok(Self {
            nodes: nodes.clone(),
            grid: grid.clone(),
            phases,
            gram,
            factor,
            condition,
        })
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Spectral condition number of the Gram section.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Lower Cholesky factor `L`, `G = L Lᵀ`.
    pub fn gram_factor(&self) -> DMatrix<f64> {
        self.factor.l()
    }

    /// `e^{-2πik x_j}`.
    pub fn shift_phases(&self, k: i64) -> Vec<C64> {
        self.nodes
            .nodes()
            .iter()
            .map(|x| C64::from_polar(1.0, -2.0 * PI * k as f64 * x))
            .collect()
    }

    /// `(A^k c)(ξ_m) = Σ_j c_j e^{-i x_j (ξ_m + 2πk)}`.
    pub fn prolong(&self, coefficients: &[C64], k: i64) -> Vec<C64> {
        let p = self.shift_phases(k);
        let v = DVector::from_iterator(p.len(), coefficients.iter().zip(&p).map(|(c, q)| c * q));
        (&self.phases * v).iter().copied().collect()
    }

    /// `m_j = ⟨u, A^k e_j⟩_{L2(T)}`.
    pub fn moments(&self, values: &[C64], k: i64) -> Vec<C64> {
        let wu = DVector::from_iterator(
            values.len(),
            values.iter().zip(self.grid.weights()).map(|(u, w)| u * *w),
        );
        let raw = self.phases.ad_mul(&wu);
        raw.iter()
            .zip(self.shift_phases(k))
            .map(|(m, q)| m * q.conj())
            .collect()
    }

    /// Solve `G b = m`.
    pub fn solve_gram(&self, rhs: &[C64]) -> Vec<C64> {
        let re = DVector::from_iterator(rhs.len(), rhs.iter().map(|z| z.re));
        let im = DVector::from_iterator(rhs.len(), rhs.iter().map(|z| z.im));
        let (re, im) = (self.factor.solve(&re), self.factor.solve(&im));
        re.iter()
            .zip(im.iter())
            .map(|(a, b)| C64::new(*a, *b))
            .collect()
    }

    /// Coefficients of the orthogonal projection onto the window span.
    pub fn expand(&self, values: &[C64]) -> Vec<C64> {
        self.solve_gram(&self.moments(values, 0))
    }

    /// Coefficients of `A^{*k} u = Σ_j ⟨u, A^k e_j⟩ ẽ_j`.
    pub fn adjoint_prolong(&self, values: &[C64], k: i64) -> Vec<C64> {
        self.solve_gram(&self.moments(values, k))
    }

    /// `‖Σ c_j e_j‖_{L2(T)}` from the Gram matrix.
    pub fn norm(&self, coefficients: &[C64]) -> f64 {
        let n = coefficients.len();
        let mut s = 0.0;
        for j in 0..n {
            for l in 0..n {
                s += (coefficients[j].conj() * coefficients[l]).re * self.gram[(j, l)];
            }
        }
        s.max(0.0).sqrt()
    }
}

/// Expansion coefficients of grid values in the window exponentials.
pub fn exponential_expand(values: &[C64], grid: &TorusGrid, nodes: &NodeSet) -> Result<Vec<C64>> {
    check_len(values, grid)?;
    Ok(ExponentialBasis::new(nodes, grid)?.expand(values))
}

/// `A^k` applied to a coefficient sequence, sampled on the grid.
pub fn prolong(coefficients: &[C64], nodes: &NodeSet, k: i64, grid: &TorusGrid) -> Vec<C64> {
    let x = nodes.nodes();
    grid.nodes()
        .iter()
        .map(|&xi| {
            let t = xi + 2.0 * PI * k as f64;
            coefficients
                .iter()
                .zip(x)
                .map(|(c, xj)| c * C64::from_polar(1.0, -xj * t))
                .sum()
        })
        .collect()
}

/// `A^{*k} u` on the window span, sampled on the grid.
pub fn adjoint_prolong(
    values: &[C64],
    grid: &TorusGrid,
    nodes: &NodeSet,
    k: i64,
) -> Result<Vec<C64>> {
    check_len(values, grid)?;
    let basis = ExponentialBasis::new(nodes, grid)?;
    let b = basis.adjoint_prolong(values, k);
    Ok(basis.prolong(&b, 0))
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

/// Largest singular value of an operator between two window spans, given
/// its coefficient matrix (columns = images of the source basis).
pub fn span_operator_norm(
    matrix: &DMatrix<C64>,
    source: &ExponentialBasis,
    target: &ExponentialBasis,
) -> f64 {
    let to_c = |m: DMatrix<f64>| m.map(|v| C64::new(v, 0.0));
    let lt = to_c(target.gram_factor()).transpose();
    let ls = to_c(source.gram_factor());
    // ‖Lₜᵀ B Lₛ^{-ᵀ}‖₂
    let ls_inv_t = ls
        .transpose()
        .try_inverse()
        .expect("Cholesky factor is invertible");
    let weighted = lt * matrix * ls_inv_t;
    weighted.singular_values().max()
}
