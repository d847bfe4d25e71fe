//! `qsis`: run one experiment and write its JSON report and CSV tables.
//!
//! Exit codes: 0 ok, 1 verdict failed, 2 usage error, 3 numeric failure.
//! Every failure also prints a JSON error object on stderr.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::Outcome;
use config::{kernel_flag, Config};

#[derive(Parser)]
#[command(
    name = "qsis",
    version,
    about = "Interpolation and recovery experiments in quasi shift-invariant spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regularity constants of a kernel spectrum.
    VerifyKernel(Flags),
    /// Riesz bounds of an exponential window.
    Riesz(Flags),
    /// Interpolate a random member of V(psi, X) from samples on Y.
    Interpolate(Flags),
    /// Cardinal function tables on the integer lattice.
    Cardinal(Flags),
    /// Recovery sweep over a kernel family plus condition screening.
    Recover(Flags),
    /// The sqrt(2)-swap non-recovery runs with a lattice control.
    Counterexample(Flags),
    /// Conditioning of half-shifted Gaussian sections.
    HalfShift(Flags),
}

#[derive(Args, Clone)]
struct Flags {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Kernel name or TOML key list.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Interpolation kernel, defaults to --kernel.
    #[arg(long)]
    interpolator: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    interpolator_alpha: Option<f64>,
    /// lattice, kadec-alternating:EPS, sqrt2-swap, half-shift or [x, ...].
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    nodes_y: Option<String>,
    /// Window half-size.
    #[arg(long = "J")]
    half: Option<usize>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alphas: Option<Vec<f64>>,
    /// Spectral scan depth.
    #[arg(long = "K")]
    cells: Option<usize>,
    /// Scan points per cell.
    #[arg(long = "M")]
    points: Option<usize>,
    /// Half-width of the line grid.
    #[arg(long = "X")]
    half_width: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    central_fraction: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    halves: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    threshold: Option<f64>,
}

struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<qsis_core::Error> for Failure {
    fn from(e: qsis_core::Error) -> Self {
        Failure {
            code: if e.is_usage() { 2 } else { 3 },
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

impl Flags {
    fn resolve(&self, command: &str) -> Result<Config, Failure> {
        let file = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let kernel = match &self.kernel {
            Some(k) => Some(kernel_flag(k, self.alpha)?),
            None if self.alpha.is_some() => {
                return Err(qsis_core::Error::Usage("--alpha needs --kernel".into()).into());
            }
            None => None,
        };
        let interpolator = self
            .interpolator
            .as_deref()
            .map(|k| kernel_flag(k, self.interpolator_alpha))
            .transpose()?;
        let flags = Config {
            kernel,
            interpolator,
            nodes: self.nodes.clone(),
            nodes_y: self.nodes_y.clone(),
            half: self.half,
            preset: self.preset.clone(),
            family: None,
            alphas: self.alphas.clone(),
            cells: self.cells,
            points: self.points,
            half_width: self.half_width,
            h: self.h,
            central_fraction: self.central_fraction,
            halves: self.halves.clone(),
            seed: self.seed,
            seeds: self.seeds.clone(),
            threshold: self.threshold,
        };
        let mut c = file.overlay(flags);
        if c.kernel.is_none() {
            c.kernel = commands::default_kernel(command);
        }
        c.validate()?;
        Ok(c)
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<String, Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure {
        code: 3,
        kind: "io".into(),
        message: format!("cannot write {}: {e}", path.display()),
    })?;
    Ok(path.display().to_string())
}

fn execute(command: &str, flags: &Flags) -> Result<(Outcome, Vec<String>), Failure> {
    let config = flags.resolve(command)?;
    let outcome = match command {
        "verify-kernel" => commands::verify_kernel(&config),
        "riesz" => commands::riesz(&config),
        "interpolate" => commands::interpolate_cmd(&config),
        "cardinal" => commands::cardinal(&config),
        "recover" => commands::recover(&config),
        "counterexample" => commands::counterexample(&config),
        "half-shift" => commands::half_shift(&config),
        _ => unreachable!("clap restricts commands"),
    }?;
    std::fs::create_dir_all(&flags.out).map_err(|e| Failure {
        code: 3,
        kind: "io".into(),
        message: format!("cannot create {}: {e}", flags.out.display()),
    })?;
    let stem = format!("{command}-{}", config.digest(command));
    let doc = json!({
        "command": command,
        "config": config,
        "pass": outcome.pass,
        "verdict": outcome.verdict,
        "result": outcome.report,
    });
    let mut files = vec![write(
        &flags.out,
        &format!("{stem}.json"),
        &serde_json::to_string_pretty(&doc).unwrap(),
    )?];
    for (suffix, table) in &outcome.tables {
        files.push(write(&flags.out, &format!("{stem}{suffix}.csv"), table)?);
    }
    Ok((outcome, files))
}

fn fail(f: &Failure) -> ExitCode {
    eprintln!(
        "{}",
        json!({ "error": { "kind": f.kind, "message": f.message }, "exit_code": f.code })
    );
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            return fail(&Failure {
                code: 2,
                kind: "usage".into(),
                message: message.trim_end().into(),
            });
        }
    };
    let (name, flags) = match &cli.command {
        Command::VerifyKernel(f) => ("verify-kernel", f),
        Command::Riesz(f) => ("riesz", f),
        Command::Interpolate(f) => ("interpolate", f),
        Command::Cardinal(f) => ("cardinal", f),
        Command::Recover(f) => ("recover", f),
        Command::Counterexample(f) => ("counterexample", f),
        Command::HalfShift(f) => ("half-shift", f),
    };
    match execute(name, flags) {
        Ok((outcome, files)) => {
            println!(
                "{}",
                json!({ "command": name, "pass": outcome.pass, "verdict": outcome.verdict, "files": files })
            );
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                fail(&Failure {
                    code: 1,
                    kind: "verdict".into(),
                    message: outcome.verdict,
                })
            }
        }
        Err(f) => fail(&f),
    }
}
