use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qsis(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsis"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn files(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

fn report(dir: &Path) -> Value {
    let json = files(dir, "json");
    assert_eq!(json.len(), 1, "{json:?}");
    serde_json::from_str(&fs::read_to_string(&json[0]).unwrap()).unwrap()
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

fn csv_column(path: &Path, col: usize) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn verify_poisson_matches_formula() {
    let dir = TempDir::new().unwrap();
    let out = qsis(
        dir.path(),
        &["verify-kernel", "--kernel", "poisson", "--alpha", "2"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    let delta = r["result"]["regularity"]["delta"].as_f64().unwrap();
    let expected = (2.0 / PI).sqrt() * 2.0 / (4.0 + PI * PI);
    assert!((delta - expected).abs() <= 1e-12 * expected);
    assert_eq!(r["result"]["regularity"]["pass_A2"], true);
    let name = files(dir.path(), "json")[0]
        .file_name()
        .unwrap()
        .to_string_lossy()
        .into_owned();
    assert!(name.starts_with("verify-kernel-") && name.len() == "verify-kernel-".len() + 12 + 5);
}

#[test]
fn verify_sinc_has_zero_constant() {
    let dir = TempDir::new().unwrap();
    let out = qsis(dir.path(), &["verify-kernel", "--kernel", "sinc"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        report(dir.path())["result"]["regularity"]["C"].as_f64(),
        Some(0.0)
    );
}

#[test]
fn malformed_alpha_is_a_usage_error() {
    for alpha in ["abc", "-1", "0"] {
        let dir = TempDir::new().unwrap();
        let out = qsis(
            dir.path(),
            &["verify-kernel", "--kernel", "poisson", "--alpha", alpha],
        );
        assert_eq!(out.status.code(), Some(2), "alpha {alpha}");
        assert_eq!(stderr_error(&out)["exit_code"], 2);
        assert!(
            fs::read_dir(dir.path()).unwrap().next().is_none(),
            "no file for alpha {alpha}"
        );
    }
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "J = 4\nbogus = 1\n").unwrap();
    let out = qsis(dir.path(), &["riesz", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"]["kind"], "usage");
}

#[test]
fn config_file_and_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "J = 4\nnodes = \"kadec-alternating:0.1\"\n").unwrap();
    let out = qsis(
        dir.path(),
        &["riesz", "--config", cfg.to_str().unwrap(), "--J", "6"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["config"]["J"], 6);
    assert_eq!(r["result"]["nodes"]["nodes"].as_array().unwrap().len(), 13);
}

#[test]
fn riesz_lattice_is_orthogonal() {
    let dir = TempDir::new().unwrap();
    let out = qsis(dir.path(), &["riesz", "--nodes", "lattice", "--J", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let c = report(dir.path())["result"]["riesz"]["C"].as_f64().unwrap();
    assert!((c - 1.0).abs() <= 1e-12);
}

#[test]
fn singular_collocation_is_numeric_failure() {
    let dir = TempDir::new().unwrap();
    let out = qsis(
        dir.path(),
        &[
            "interpolate",
            "--kernel",
            "gaussian",
            "--alpha",
            "0.001",
            "--J",
            "24",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["error"]["kind"], "singular");
}

#[test]
fn outputs_are_deterministic() {
    let run = |args: &[&str]| {
        let dir = TempDir::new().unwrap();
        assert_eq!(qsis(dir.path(), args).status.code(), Some(0));
        let mut all = files(dir.path(), "csv");
        all.extend(files(dir.path(), "json"));
        let names: Vec<_> = all
            .iter()
            .map(|p| p.file_name().unwrap().to_owned())
            .collect();
        let bytes: Vec<_> = all.iter().map(|p| fs::read(p).unwrap()).collect();
        (names, bytes)
    };
    for args in [
        &[
            "interpolate",
            "--J",
            "6",
            "--nodes",
            "kadec-alternating:0.2",
            "--seed",
            "5",
        ][..],
        &["half-shift", "--halves", "4,8,16"][..],
        &["cardinal", "--kernel", "poisson", "--alpha", "2"][..],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(a, b, "{args:?}");
    }
    let dir = TempDir::new().unwrap();
    qsis(dir.path(), &["interpolate", "--J", "6", "--seed", "5"]);
    qsis(dir.path(), &["interpolate", "--J", "6", "--seed", "6"]);
    assert_eq!(files(dir.path(), "csv").len(), 2);
}

#[test]
fn csv_headers() {
    let dir = TempDir::new().unwrap();
    qsis(
        dir.path(),
        &["cardinal", "--kernel", "gaussian", "--alpha", "1"],
    );
    qsis(dir.path(), &["interpolate", "--J", "4"]);
    qsis(dir.path(), &["half-shift", "--halves", "2,4"]);
    let heads: Vec<String> = files(dir.path(), "csv")
        .iter()
        .map(|p| {
            fs::read_to_string(p)
                .unwrap()
                .lines()
                .next()
                .unwrap()
                .to_string()
        })
        .collect();
    for h in [
        "x,L(x)",
        "xi,L_hat(xi)",
        "x,f,g,f-g",
        "J,kappa_mixed,kappa_control",
    ] {
        assert!(heads.iter().any(|x| x == h), "{h} missing from {heads:?}");
    }
}

#[test]
fn recover_error_column_decreases() {
    let dir = TempDir::new().unwrap();
    let out = qsis(
        dir.path(),
        &[
            "recover",
            "--preset",
            "gaussian-conv-triangle",
            "--J",
            "6",
            "--alphas",
            "1,2,4",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = &files(dir.path(), "csv")[0];
    assert!(fs::read_to_string(csv)
        .unwrap()
        .starts_with("alpha,l2_error,sup_error,kappa,coeff_norm\n"));
    let l2 = csv_column(csv, 1);
    assert_eq!(l2.len(), 3);
    assert!(l2.windows(2).all(|w| w[1] < w[0]), "{l2:?}");
    let r = report(dir.path());
    assert!(r["result"]["conditions"]["verdicts"]
        .as_array()
        .is_some_and(|v| !v.is_empty()));
}

#[test]
fn counterexample_error_column_persists() {
    let dir = TempDir::new().unwrap();
    let out = qsis(
        dir.path(),
        &[
            "counterexample",
            "--J",
            "6",
            "--alphas",
            "1,4,16",
            "--seeds",
            "1",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let main = files(dir.path(), "csv")
        .into_iter()
        .find(|p| !p.to_string_lossy().ends_with("-control.csv"))
        .unwrap();
    let l2 = csv_column(&main, 1);
    assert!(l2[2] > 0.5 * l2[0], "{l2:?}");
}

#[test]
fn unknown_preset_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = qsis(dir.path(), &["recover", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}
