use qsis_core::cardinal::CardinalFunction;
use qsis_core::interp::{interpolate, residual_report, residual_table_csv};
use qsis_core::kernel::regularity_report;
use qsis_core::nodes::riesz_estimate;
use qsis_core::recovery::{
    check_conditions, counterexample_run, half_shift_conditioning, recovery_sweep, FamilySpec,
    PRESET_ALPHAS,
};
use qsis_core::tolerances::{
    AMALGAM_TAIL_REL, CENTRAL_FRACTION, LIMIT_THRESHOLD_REL, TORUS_POINTS, WINDOW_J,
};
use qsis_core::{Error, Kernel, KernelSpec, LineGrid, NodeSet, QsisFunction, Result};
use serde_json::{json, Value};

use crate::config::Config;

/// Result of one command before it is written out.
pub struct Outcome {
    pub report: Value,
    /// `(file suffix, contents)`; the empty suffix is the main table.
    pub tables: Vec<(&'static str, String)>,
    pub pass: bool,
    pub verdict: String,
}

const DEFAULT_HALVES: [usize; 4] = [4, 8, 16, 32];
const CARDINALITY_TOL: f64 = 1e-6;

fn kernel(c: &Config) -> Result<Kernel> {
    c.kernel
        .as_ref()
        .ok_or_else(|| Error::Usage("--kernel is required".into()))?
        .build()
}

fn half(c: &Config) -> usize {
    c.half.unwrap_or(WINDOW_J)
}

fn nodes(text: Option<&String>, half: usize) -> Result<NodeSet> {
    NodeSet::parse(text.map_or("lattice", |s| s.as_str()), half)
}

fn line_grid(c: &Config, default: LineGrid) -> Result<LineGrid> {
    match (c.half_width, c.h) {
        (None, None) => Ok(default),
        (x, h) => LineGrid::new(x.unwrap_or(default.half_width), h.unwrap_or(default.h)),
    }
}

/// Full support, or the first power of two from 8 whose envelope tail
/// is within the amalgam tolerance.
fn default_cells(k: &Kernel) -> usize {
    if let Some(n) = k.support().cells() {
        return n.max(1);
    }
    let scale = k.sup_norm();
    (3..=12)
        .map(|p| 1usize << p)
        .find(|&n| k.tail_bound(n) <= AMALGAM_TAIL_REL * scale)
        .unwrap_or(1 << 12)
}

pub fn verify_kernel(c: &Config) -> Result<Outcome> {
    let k = kernel(c)?;
    let cells = c.cells.unwrap_or_else(|| default_cells(&k));
    let report = regularity_report(&k, cells, c.points.unwrap_or(TORUS_POINTS))?;
    let pass = report.pass_a1 && report.pass_a2;
    Ok(Outcome {
        verdict: format!("A1 {}, A2 {}", report.pass_a1, report.pass_a2),
        report: json!({ "kernel": k.spec(), "regularity": report }),
        tables: vec![],
        pass,
    })
}

pub fn riesz(c: &Config) -> Result<Outcome> {
    let x = nodes(c.nodes.as_ref(), half(c))?;
    let est = riesz_estimate(&x)?;
    Ok(Outcome {
        verdict: format!("C = {}", est.c),
        report: json!({ "nodes": x, "riesz": est }),
        tables: vec![],
        pass: true,
    })
}

pub fn interpolate_cmd(c: &Config) -> Result<Outcome> {
    let psi = kernel(c)?;
    let phi = match &c.interpolator {
        Some(s) => s.build()?,
        None => psi.clone(),
    };
    let j = half(c);
    let x = nodes(c.nodes.as_ref(), j)?;
    let y = match &c.nodes_y {
        Some(s) => NodeSet::parse(s, j)?,
        None => x.clone(),
    };
    let f = QsisFunction::random(psi, x, c.seed.unwrap_or(0))?;
    let g = interpolate(&f, &phi, &y)?;
    let grid = line_grid(c, f.default_line_grid())?;
    let fraction = c.central_fraction.unwrap_or(CENTRAL_FRACTION);
    let residual = residual_report(&f, &g, &grid, fraction)?;
    let table = residual_table_csv(&f, &g, &grid, fraction)?;
    Ok(Outcome {
        verdict: format!(
            "relative L2 error {:.3e}, node residual {:.3e}",
            residual.relative_l2, g.residual
        ),
        report: json!({ "f": f, "interpolant": g, "residual": residual }),
        tables: vec![("", table)],
        pass: true,
    })
}

pub fn cardinal(c: &Config) -> Result<Outcome> {
    let base = kernel(c)?;
    let l = CardinalFunction::new(&base)?;
    let at_integers = l.eval_many(&(-8..=8).map(f64::from).collect::<Vec<_>>())?;
    let cardinality = at_integers
        .iter()
        .enumerate()
        .map(|(i, v)| (v - f64::from(i == 8)).abs())
        .fold(0.0, f64::max);
    let grid = line_grid(c, LineGrid::new(8.0, 1.0 / 16.0)?)?;
    let xs: Vec<f64> = (0..grid.len()).map(|i| grid.node(i)).collect();
    let xis: Vec<f64> = (-300..=300)
        .map(|i| f64::from(i) * std::f64::consts::PI / 100.0)
        .collect();
    let pass = cardinality <= CARDINALITY_TOL;
    Ok(Outcome {
        verdict: format!("max |L(k) - delta_0k| = {cardinality:.3e}"),
        report: json!({
            "base": base.spec(),
            "route": l.route(),
            "depth": l.depth(),
            "values_at_integers": at_integers,
            "cardinality_error": cardinality,
        }),
        tables: vec![
            ("-space", l.space_csv(&xs)?),
            ("-spectrum", l.spectrum_csv(&xis)),
        ],
        pass,
    })
}

fn family(c: &Config) -> Result<FamilySpec> {
    let spec = match (&c.family, &c.preset) {
        (Some(_), Some(_)) => {
            return Err(Error::Usage(
                "give either a family or a preset, not both".into(),
            ))
        }
        (Some(f), None) => f.clone(),
        (None, p) => FamilySpec::preset(p.as_deref().unwrap_or("gaussian-conv-triangle"), half(c))?,
    };
    match &c.alphas {
        Some(a) => spec.with_alphas(a.clone()),
        None => Ok(spec),
    }
}

pub fn recover(c: &Config) -> Result<Outcome> {
    let spec = family(c)?;
    let seed = c.seed.unwrap_or(0);
    let f = QsisFunction::random(spec.target().clone(), spec.nodes_x().clone(), seed)?;
    let grid = line_grid(c, f.default_line_grid())?;
    let sweep = recovery_sweep(
        &spec,
        &f,
        &grid,
        c.central_fraction.unwrap_or(CENTRAL_FRACTION),
        Some(seed),
    )?;
    let conditions = check_conditions(&spec, seed, c.threshold.unwrap_or(LIMIT_THRESHOLD_REL))?;
    let pass = sweep.strictly_decreasing();
    Ok(Outcome {
        verdict: format!(
            "errors strictly decreasing: {pass}, final/initial L2 {:.3e}",
            if sweep.all_rows_ok() {
                sweep.final_ratio()
            } else {
                f64::NAN
            }
        ),
        tables: vec![("", sweep.csv())],
        report: json!({ "sweep": sweep, "conditions": conditions }),
        pass,
    })
}

pub fn counterexample(c: &Config) -> Result<Outcome> {
    let alphas = c.alphas.clone().unwrap_or_else(|| PRESET_ALPHAS.to_vec());
    let seeds = match &c.seeds {
        Some(s) if s.is_empty() => return Err(Error::Usage("seeds must not be empty".into())),
        Some(s) => s.clone(),
        None => {
            let s = c.seed.unwrap_or(1);
            vec![s, s + 1, s + 2]
        }
    };
    let r = counterexample_run(&alphas, half(c), &seeds)?;
    let ratios: Vec<String> = r
        .runs
        .iter()
        .map(|run| format!("{:.3}", run.final_ratio()))
        .collect();
    Ok(Outcome {
        verdict: format!(
            "final/initial L2 [{}], floor {}",
            ratios.join(", "),
            r.floor
        ),
        tables: vec![("", r.runs[0].csv()), ("-control", r.control.csv())],
        pass: r.persistent_floor,
        report: serde_json::to_value(&r).expect("report serializes"),
    })
}

pub fn half_shift(c: &Config) -> Result<Outcome> {
    let halves = c.halves.clone().unwrap_or_else(|| DEFAULT_HALVES.to_vec());
    let t = half_shift_conditioning(&halves)?;
    let pass = t.mixed_increasing && t.control_stable();
    Ok(Outcome {
        verdict: format!(
            "mixed kappa increasing: {}, control last change {:.3e}",
            t.mixed_increasing, t.control_last_change
        ),
        tables: vec![("", t.csv())],
        report: serde_json::to_value(&t).expect("table serializes"),
        pass,
    })
}

/// Kernel spec of the default target for commands that need one.
pub fn default_kernel(command: &str) -> Option<KernelSpec> {
    match command {
        "interpolate" => Some(KernelSpec::named("gaussian").with_alpha(1.0)),
        _ => None,
    }
}
