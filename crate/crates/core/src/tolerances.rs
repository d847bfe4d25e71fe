//! Numerical thresholds and default resolutions.
//!
//! Everything a verdict depends on lives here so reports can cite a single
//! source and configs can override by name.

// ── grids ──────────────────────────────────────────────────────────────

/// Uniform torus points used for `δ`, cell sups and symbols.
pub const TORUS_POINTS: usize = 1024;

/// Panels per half torus in the Gauss–Legendre rule.
pub const GAUSS_PANELS: usize = 128;

/// Nodes per Gauss–Legendre panel.
pub const GAUSS_ORDER: usize = 16;

/// Geometric refinement levels toward `±π`.
///
/// Resolves spectra whose torus ratio switches within `2^-24` of the edge
/// (regular Gaussians at large shape).
pub const GAUSS_GRADING: usize = 24;

/// Default line grid half-width and spacing.
pub const LINE_HALF_WIDTH: f64 = 64.0;
pub const LINE_SPACING: f64 = 1.0 / 64.0;

/// Default node window half-size.
pub const WINDOW_J: usize = 24;

/// Minimum trapezoid intervals for cardinal evaluation.
pub const CARDINAL_POINTS: usize = 1 << 15;

// ── quadrature accuracy ────────────────────────────────────────────────

/// Largest admissible neglected spectral mass in `inverse_ft`.
pub const INVERSE_FT_TAIL: f64 = 1e-9;

/// Imaginary residue allowed for transforms of even spectra.
pub const IMAGINARY_RESIDUE: f64 = 1e-9;

/// Relative tail allowed when a kernel is evaluated through its spectrum.
pub const SPACE_QUADRATURE_TAIL: f64 = 1e-13;

/// Bessel quadrature agreement between successive step halvings.
pub const BESSEL_REL: f64 = 1e-14;

// ── linear algebra ─────────────────────────────────────────────────────

/// Gram sections with a larger condition number are refused.
pub const GRAM_CONDITION_MAX: f64 = 1e12;

/// Collocation solves are refused once `κ·ε ≥ 1`.
pub const SINGULAR_CONDITION: f64 = 1.0 / f64::EPSILON;

/// Solver contract: residual ≤ κ · this · scale.
pub const SOLVER_CONTRACT: f64 = 1e-12;

// ── regularity ─────────────────────────────────────────────────────────

/// `pass-A2` requires the amalgam tail below this fraction of the sum.
pub const AMALGAM_TAIL_REL: f64 = 1e-3;

/// Grid values above `-this · max` count as nonnegative.
pub const NONNEGATIVE_SLACK: f64 = 1e-13;

/// Cardinal denominators must exceed this fraction of the sum scale.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-14;

// ── verdicts ───────────────────────────────────────────────────────────

/// Limit verdicts: last value must be below this, relative to the first.
pub const LIMIT_THRESHOLD_REL: f64 = 1e-3;

/// Slack applied to the realized `B` operator norm bounds.
pub const B_BOUND_SLACK: f64 = 2.0;

/// Central fraction of a line grid used for recovery errors.
pub const CENTRAL_FRACTION: f64 = 0.5;

/// Regular-interpolator ratios are maximized over `|ξ| ≤ this · π`; the
/// ratio tends to 1 at the edge for every continuous spectrum.
pub const REGULAR_INTERIOR: f64 = 0.875;
