use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{Construction, FamilySpec};
use super::operators::{ln_torus_delta, sum_depth, Multipliers, DEFAULT_DEPTH};
use super::{trend_verdict, Verdict};
use crate::error::Result;
use crate::fourier::{cell_extremes, l2_norm_torus, TorusGrid};
use crate::kernel::{kernel_constants, Kernel};
use crate::nodes::ExponentialBasis;
use crate::random::unit_complex;
use crate::tolerances;

/// Condition quantities at one `α`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaConditions {
    pub alpha: f64,
    /// `δ_{φ_α}` of the generator.
    pub delta: f64,
    /// `C_{φ_α}` of the generator.
    #[serde(rename = "C")]
    pub c: f64,
    /// Truncated (B3) sums, one per test vector.
    pub b3: Vec<f64>,
    /// Truncated (B4) sums, one per test vector.
    pub b4: Vec<f64>,
    /// `max_g ‖(M_{φ_α} − M_ψ) g‖`, logged only.
    pub m_distance: f64,
    /// `δ⁻¹ Σ_{0<|k|≤N} ‖φ̂_α(·+2πk)‖_{L∞(T)}` of the convolution factor.
    pub b2_prime: Option<f64>,
    /// Same sum including `k = 0`.
    pub b2_prime_full: Option<f64>,
    /// Full off-center constant of the convolution factor.
    pub base_c: Option<f64>,
    /// `‖δ_φ⁻¹φ̂_α − δ_τ/(δ_φ δ_ψ)‖` over the cells `|k| ≤ N`.
    pub b3_prime: Option<f64>,
    /// `‖δ_φ⁻¹φ̂_α − 1‖` over `|k| ≤ N`, for monotone factors.
    pub b3_prime_monotone: Option<f64>,
    /// `max δ/φ̂_α` over the interior of the torus.
    pub regular_ratio: f64,
    pub regular_ratio_at_zero: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionReport {
    pub family: String,
    pub construction: Construction,
    pub target: Kernel,
    pub alphas: Vec<f64>,
    /// Cells `K` kept in the (B3)/(B4) sums.
    pub depth: usize,
    /// Envelope bound on the dropped cells, relative to `δ`.
    pub tail_bound: f64,
    /// Cells `N` of the target's support, when bounded.
    pub cells: Option<usize>,
    /// `C_Φ = max_α C_{φ_α}`.
    pub c_family: f64,
    pub expansion_condition_x: f64,
    pub expansion_condition_y: f64,
    pub test_vectors: usize,
    pub seed: u64,
    pub rows: Vec<AlphaConditions>,
    pub verdicts: Vec<Verdict>,
}

impl ConditionReport {
    pub fn verdict(&self, condition: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.condition == condition)
    }
}

/// Seeded random vectors added to the basis elements.
pub const RANDOM_TEST_VECTORS: usize = 8;

/// The `2J+1` exponentials of the `𝒳` window plus seeded random
/// combinations, each with unit `L2(T)` norm.
pub fn test_vectors(basis: &ExponentialBasis, seed: u64) -> Vec<Vec<C64>> {
    let n = basis.nodes().len();
    let grid = basis.grid();
    let mut out = Vec::with_capacity(n + RANDOM_TEST_VECTORS);
    for j in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[j] = C64::new(1.0, 0.0);
        out.push(basis.prolong(&e, 0));
    }
    for r in 0..RANDOM_TEST_VECTORS as u64 {
        out.push(basis.prolong(&unit_complex(n, seed.wrapping_add(r)), 0));
    }
    for v in out.iter_mut() {
        let s = l2_norm_torus(v, grid).expect("lengths match");
        v.iter_mut().for_each(|z| *z /= s);
    }
    out
}

fn norm(v: &[C64], grid: &TorusGrid) -> f64 {
    l2_norm_torus(v, grid).expect("lengths match")
}

fn sub_scaled(a: &[f64], b: &[f64], g: &[C64]) -> Vec<C64> {
    a.iter()
        .zip(b)
        .zip(g)
        .map(|((x, y), z)| z * (x - y))
        .collect()
}

fn mul(f: &[f64], g: &[C64]) -> Vec<C64> {
    super::operators::scale(f, g)
}

struct Shifted {
    k: i64,
    psi: Vec<f64>,
    phi: Vec<f64>,
}

/// (B3) and (B4) sums for each test vector at one `α`, plus the `M` distance.
fn b3_b4(
    psi: &Multipliers,
    phi: &Multipliers,
    bx: &ExponentialBasis,
    by: &ExponentialBasis,
    vectors: &[Vec<C64>],
    depth: usize,
) -> (Vec<f64>, Vec<f64>, f64) {
    let grid = psi.grid();
    let (m_psi, m_phi) = (psi.m_factors(), phi.m_factors());
    let k = depth as i64;
    let shifts: Vec<Shifted> = (-k..=k)
        .filter(|&j| j != 0)
        .map(|j| Shifted {
            k: j,
            psi: psi.t_factors(j),
            phi: phi.t_factors(j),
        })
        .collect();
    let zero = |v: &[f64]| v.iter().all(|&x| x == 0.0);
    let rows: Vec<(f64, f64, f64)> = vectors
        .par_iter()
        .map(|g| {
            let h = sub_scaled(&m_psi, &m_phi, g);
            let dist = norm(&h, grid);
            let cx = bx.expand(&h);
            let b3: f64 = shifts
                .iter()
                .filter(|s| !zero(&s.psi))
                .map(|s| norm(&mul(&s.psi, &bx.prolong(&cx, s.k)), grid))
                .sum();
            let mg = mul(&m_phi, g);
            let (gx, gy) = (bx.expand(&mg), by.expand(&mg));
            let b4: f64 = shifts
                .iter()
                .filter(|s| !(zero(&s.psi) && zero(&s.phi)))
                .map(|s| {
                    let a = mul(&s.phi, &by.prolong(&gy, s.k));
                    let b = mul(&s.psi, &bx.prolong(&gx, s.k));
                    let d: Vec<C64> = a.iter().zip(&b).map(|(p, q)| p - q).collect();
                    norm(&d, grid)
                })
                .sum();
            (b3, b4, dist)
        })
        .collect();
    let b3 = rows.iter().map(|r| r.0).collect();
    let b4 = rows.iter().map(|r| r.1).collect();
    let dist = rows.iter().fold(0.0_f64, |m, r| m.max(r.2));
    (b3, b4, dist)
}

/// Finite-cell surrogates for a convolution factor `φ` and `τ = φ ∗ ψ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeStatistics {
    /// `δ_φ⁻¹ Σ_{0<|k|≤N} ‖φ̂(·+2πk)‖_{L∞(T)}`.
    pub b2: f64,
    /// Same sum including `k = 0`.
    pub b2_full: f64,
    /// `Σ_{|k|≤N} ‖δ_φ⁻¹φ̂(·+2πk) − δ_τ/(δ_φ δ_ψ)‖_{L∞(T)}`.
    pub b3: f64,
    /// `Σ_{|k|≤N} ‖δ_φ⁻¹φ̂(·+2πk) − 1‖_{L∞(T)}` for monotone `φ̂`.
    pub b3_monotone: Option<f64>,
}

pub fn prime_statistics(
    base: &Kernel,
    member: &Kernel,
    target: &Kernel,
    cells: usize,
) -> PrimeStatistics {
    let grid = TorusGrid::scan();
    let delta_phi = ln_torus_delta(base).exp();
    let delta_tau = ln_torus_delta(member).exp();
    let delta_psi = ln_torus_delta(target).exp();
    let level = delta_tau / (delta_phi * delta_psi);
    let n = cells as i64;
    let mut b2 = 0.0;
    let mut center = 0.0;
    let mut b3 = 0.0;
    let mut b3_monotone = 0.0;
    for k in -n..=n {
        let sup = cell_extremes(base, &grid, k).1 / delta_phi;
        if k == 0 {
            center = sup;
        } else {
            b2 += sup;
        }
        let shift = 2.0 * PI * k as f64;
        let (mut d, mut dm) = (0.0_f64, 0.0_f64);
        for &xi in grid.nodes() {
            let r = base.spectrum(xi + shift) / delta_phi;
            d = d.max((r - level).abs());
            dm = dm.max((r - 1.0).abs());
        }
        b3 += d;
        b3_monotone += dm;
    }
    PrimeStatistics {
        b2,
        b2_full: b2 + center,
        b3,
        b3_monotone: base.is_monotone().then_some(b3_monotone),
    }
}

/// `(max over |ξ| ≤ ρπ, value at 0)` of `δ/φ̂`.
fn regular_ratio(kernel: &Kernel) -> (f64, f64) {
    let ln_delta = ln_torus_delta(kernel);
    let grid = TorusGrid::scan();
    let edge = tolerances::REGULAR_INTERIOR * PI;
    let max = grid
        .nodes()
        .iter()
        .filter(|xi| xi.abs() <= edge)
        .map(|&xi| (ln_delta - kernel.ln_spectrum(xi)).exp())
        .fold(0.0, f64::max);
    (max, (ln_delta - kernel.ln_spectrum(0.0)).exp())
}

/// Screens a family: (B2)–(B4) on test vectors, the finite-cell
/// surrogates for convolution families and the regular-interpolator ratio.
pub fn check_conditions(spec: &FamilySpec, seed: u64, threshold: f64) -> Result<ConditionReport> {
    let grid = TorusGrid::quadrature();
    let target = spec.target();
    let bx = ExponentialBasis::new(spec.nodes_x(), &grid)?;
    let by_owned;
    let by = if spec.nodes_x() == spec.nodes_y() {
        &bx
    } else {
        by_owned = ExponentialBasis::new(spec.nodes_y(), &grid)?;
        &by_owned
    };
    let members: Vec<Kernel> = spec
        .alphas()
        .iter()
        .map(|&a| spec.member(a))
        .collect::<Result<_>>()?;
    let depth = sum_depth(members.iter().chain(std::iter::once(target)));
    let psi = Multipliers::new(target, &grid)?;
    let vectors = test_vectors(&bx, seed);
    let cells = target.support().cells();

    let mut rows = Vec::with_capacity(members.len());
    let mut tail_bound = 0.0_f64;
    for (&alpha, member) in spec.alphas().iter().zip(&members) {
        let phi = Multipliers::new(member, &grid)?;
        let constants = kernel_constants(member)?;
        if depth == DEFAULT_DEPTH {
            tail_bound = tail_bound.max(member.tail_bound(depth) / phi.delta());
        }
        let (b3, b4, m_distance) = b3_b4(&psi, &phi, &bx, by, &vectors, depth);
        let prime = match (spec.base(alpha)?, cells) {
            (Some(base), Some(n)) => Some((
                prime_statistics(&base, member, target, n.max(1)),
                kernel_constants(&base)?.c,
            )),
            _ => None,
        };
        let (regular, at_zero) = regular_ratio(member);
        rows.push(AlphaConditions {
            alpha,
            delta: phi.delta(),
            c: constants.c,
            b3,
            b4,
            m_distance,
            b2_prime: prime.as_ref().map(|p| p.0.b2),
            b2_prime_full: prime.as_ref().map(|p| p.0.b2_full),
            base_c: prime.as_ref().map(|p| p.1),
            b3_prime: prime.as_ref().map(|p| p.0.b3),
            b3_prime_monotone: prime.as_ref().and_then(|p| p.0.b3_monotone),
            regular_ratio: regular,
            regular_ratio_at_zero: at_zero,
        });
    }
    if depth == DEFAULT_DEPTH {
        tail_bound = tail_bound.max(target.tail_bound(depth) / psi.delta());
    }

    let worst = |f: &dyn Fn(&AlphaConditions) -> &Vec<f64>| -> Vec<f64> {
        rows.iter()
            .map(|r| f(r).iter().cloned().fold(0.0, f64::max))
            .collect()
    };
    let mut verdicts = vec![
        trend_verdict("B3", &worst(&|r| &r.b3), threshold, true),
        trend_verdict("B4", &worst(&|r| &r.b4), threshold, true),
    ];
    if rows.iter().all(|r| r.b2_prime.is_some()) {
        let b2: Vec<f64> = rows.iter().map(|r| r.b2_prime.unwrap()).collect();
        let mut v = trend_verdict("B2'", &b2, f64::INFINITY, false);
        v.pass = v.nonincreasing_top_half && b2.iter().all(|x| x.is_finite());
        verdicts.push(v);
        let b3: Vec<f64> = rows.iter().map(|r| r.b3_prime.unwrap()).collect();
        verdicts.push(trend_verdict("B3'", &b3, threshold, true));
    }
    let ratio: Vec<f64> = rows.iter().map(|r| r.regular_ratio).collect();
    verdicts.push(trend_verdict(
        "regular-interpolator",
        &ratio,
        threshold,
        false,
    ));

    Ok(ConditionReport {
        family: spec.name(),
        construction: spec.construction().clone(),
        target: target.clone(),
        alphas: spec.alphas().to_vec(),
        depth,
        tail_bound,
        cells,
        c_family: rows.iter().map(|r| r.c).fold(0.0, f64::max),
        expansion_condition_x: bx.condition(),
        expansion_condition_y: by.condition(),
        test_vectors: vectors.len(),
        seed,
        rows,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::NodeSet;
    use crate::recovery::family::BaseFamily;

    fn family(
        construction: Construction,
        target: Kernel,
        alphas: &[f64],
        nodes: NodeSet,
    ) -> FamilySpec {
        FamilySpec::new(construction, alphas.to_vec(), target, nodes.clone(), nodes).unwrap()
    }

    #[test]
    fn bandlimited_to_torus_makes_b3_vacuous() {
        let f = family(
            Construction::RegularGaussian,
            Kernel::sinc(),
            &[1.0, 2.0, 4.0],
            NodeSet::lattice(4),
        );
        let r = check_conditions(&f, 1, 1e-3).unwrap();
        assert_eq!(r.depth, DEFAULT_DEPTH);
        assert_eq!(r.test_vectors, 9 + RANDOM_TEST_VECTORS);
        for row in &r.rows {
            assert!(row.b3.iter().all(|&v| v == 0.0));
            assert!(row.b4.iter().all(|&v| v >= 0.0));
        }
        assert!(r.verdict("B3").unwrap().pass);
    }

    #[test]
    fn constant_family_has_zero_sums() {
        let f = family(
            Construction::Constant,
            Kernel::triangle_spectrum(),
            &[1.0, 2.0, 4.0],
            NodeSet::kadec_alternating(4, 0.2).unwrap(),
        );
        let r = check_conditions(&f, 2, 1e-3).unwrap();
        assert_eq!(r.depth, 1);
        for row in &r.rows {
            assert!(row.b3.iter().chain(&row.b4).all(|&v| v == 0.0));
            assert_eq!(row.m_distance, 0.0);
        }
        // ratio ≡ δ/ψ̂ is independent of α
        assert!(!r.verdict("regular-interpolator").unwrap().pass);
    }

    #[test]
    fn gaussian_convolution_on_triangle_decreases() {
        let f = family(
            Construction::Convolution {
                base: BaseFamily::Gaussian,
            },
            Kernel::triangle_spectrum(),
            &[1.0, 2.0, 4.0, 8.0, 16.0],
            NodeSet::lattice(6),
        );
        let r = check_conditions(&f, 3, 1e-3).unwrap();
        let (first, last) = (&r.rows[0], r.rows.last().unwrap());
        for i in 0..first.b3.len() {
            let b3: Vec<f64> = r.rows.iter().map(|row| row.b3[i]).collect();
            let b4: Vec<f64> = r.rows.iter().map(|row| row.b4[i]).collect();
            assert!(
                crate::recovery::nonincreasing_top_half(&b3) && last.b3[i] < 0.2 * first.b3[i],
                "{b3:?}"
            );
            assert!(
                crate::recovery::nonincreasing_top_half(&b4) && last.b4[i] < first.b4[i],
                "{b4:?}"
            );
        }
        assert!(r.verdict("B3").unwrap().nonincreasing_top_half);
        assert!(r.verdict("B4").unwrap().nonincreasing_top_half);
    }

    #[test]
    fn poisson_prime_statistics() {
        let f = family(
            Construction::Convolution {
                base: BaseFamily::Poisson,
            },
            Kernel::triangle_spectrum(),
            &[1.0, 4.0, 16.0, 64.0],
            NodeSet::lattice(2),
        );
        let r = check_conditions(&f, 4, 1e-3).unwrap();
        assert_eq!(r.cells, Some(1));
        for row in &r.rows {
            let a = row.alpha;
            // δ⁻¹ sup over the cells ±1 equals 1 each, k = 0 gives (α²+π²)/α²
            let full = 2.0 + (a * a + PI * PI) / (a * a);
            assert!((row.b2_prime_full.unwrap() - full).abs() < 1e-10 * full);
            assert!((row.b2_prime.unwrap() - 2.0).abs() < 1e-10);
        }
        let last = r.rows.last().unwrap();
        assert!((last.b2_prime_full.unwrap() - 3.0).abs() < 0.02 * 3.0);
        // the full off-center constant grows with α
        let cs: Vec<f64> = r.rows.iter().map(|row| row.base_c.unwrap()).collect();
        assert!(cs.windows(2).all(|w| w[1] > w[0]), "{cs:?}");
        assert!(cs[3] > 4.0 * cs[1], "{cs:?}");
        let d: Vec<f64> = r
            .rows
            .iter()
            .map(|row| row.b3_prime_monotone.unwrap())
            .collect();
        // α = 64: π²/α² at the center plus 8π²/(α²+9π²) from each side cell
        let a2 = 64.0f64 * 64.0;
        let oracle = PI * PI / a2 + 2.0 * 8.0 * PI * PI / (a2 + 9.0 * PI * PI);
        assert!(
            d.windows(2).all(|w| w[1] < w[0]) && (d[3] - oracle).abs() < 1e-3 * oracle,
            "{d:?} {oracle}"
        );
    }

    #[test]
    fn gaussian_dilation_monotone_distance_vanishes() {
        let f = family(
            Construction::DilatedApproxIdentity {
                base: Kernel::gaussian(1.0).unwrap(),
            },
            Kernel::triangle_spectrum(),
            &[1.0, 4.0, 16.0, 64.0],
            NodeSet::lattice(2),
        );
        let r = check_conditions(&f, 5, 1e-3).unwrap();
        for row in &r.rows {
            // φ̂_α(ξ) = 2^{-1/2} e^{-ξ²/(4α²)}; sup over |k| ≤ 1 of |φ̂/δ − 1| is at ξ = 0 and at 3π
            let a2 = row.alpha * row.alpha;
            // cell +1 is scanned up to 3π − h only
            let h = 2.0 * PI / 1024.0;
            let edge = |t: f64| 1.0 - ((PI * PI - t * t) / (4.0 * a2)).exp();
            let oracle = ((PI * PI / (4.0 * a2)).exp() - 1.0) + edge(3.0 * PI) + edge(3.0 * PI - h);
            assert!(
                (row.b3_prime_monotone.unwrap() - oracle).abs() < 1e-9 * oracle.max(1.0),
                "{} {oracle}",
                row.b3_prime_monotone.unwrap()
            );
        }
        let d: Vec<f64> = r
            .rows
            .iter()
            .map(|row| row.b3_prime_monotone.unwrap())
            .collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]) && d[3] < 0.02, "{d:?}");
    }

    #[test]
    fn regular_gaussian_ratio() {
        for alpha in [1.0, 2.0, 4.0] {
            let k = Kernel::gaussian(1.0 / (alpha * alpha)).unwrap();
            let (max, at_zero) = regular_ratio(&k);
            let expected = (-alpha * alpha * PI * PI / 4.0).exp();
            assert!((at_zero - expected).abs() < 1e-12 * expected);
            assert!(max >= at_zero);
        }
        let (_, two) = regular_ratio(&Kernel::gaussian(0.25).unwrap());
        assert!((two - 5.17e-5).abs() < 1e-7);
        let (max, at_zero) = regular_ratio(&Kernel::sinc());
        assert_eq!((max, at_zero), (1.0, 1.0));
    }
}
