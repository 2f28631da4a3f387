//! Thin CLI over the library's driver commands.
//!
//! Exit codes: 0 success, 2 validation/configuration error, 3 verification
//! failure.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wenplaq::driver::{cmd_compile, cmd_correlate, cmd_scan, cmd_sweep, cmd_tomo, RunConfig};
use wenplaq::Error;

#[derive(Parser)]
#[command(name = "wenplaq", about = "Wen-plaquette model simulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Transverse field strength.
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long = "j-min", allow_negative_numbers = true)]
    j_min: Option<f64>,
    #[arg(long = "j-max", allow_negative_numbers = true)]
    j_max: Option<f64>,
    #[arg(long = "j-points")]
    j_points: Option<usize>,
    /// Plaquette coupling for compile/tomo.
    #[arg(long, allow_negative_numbers = true)]
    j: Option<f64>,
    /// Total sweep duration.
    #[arg(long = "T", allow_negative_numbers = true)]
    t_total: Option<f64>,
    /// Number of sweep steps.
    #[arg(long = "M")]
    m_steps: Option<usize>,
    /// Stepper: exact|trotter.
    #[arg(long)]
    stepper: Option<String>,
    /// Trotter slices per step.
    #[arg(long)]
    slices: Option<usize>,
    /// Trotter step length for compile.
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Machine description JSON for compile.
    #[arg(long)]
    machine: Option<PathBuf>,
    /// Measurement noise deviation for tomo.
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Base random seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state phase-diagram curves over a J grid.
    Scan(Common),
    /// Constant-adiabaticity sweep with per-step fidelity records.
    Sweep(Common),
    /// Spin-spin correlations on a 2x6 lattice across J/g ratios.
    Correlate(Common),
    /// Compile a Trotter step to machine pulses and verify it.
    Compile(Common),
    /// Synthetic tomography of the ground state.
    Tomo(Common),
}

fn build_config(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &common.out {
        cfg.out = v.clone();
    }
    if let Some(v) = common.g {
        cfg.g = v;
        cfg.g_list = vec![v];
    }
    if let Some(v) = common.j_min {
        cfg.j_min = v;
    }
    if let Some(v) = common.j_max {
        cfg.j_max = v;
    }
    if let Some(v) = common.j_points {
        cfg.j_points = v;
    }
    if let Some(v) = common.j {
        cfg.j = v;
    }
    if let Some(v) = common.t_total {
        cfg.t_total = v;
    }
    if let Some(v) = common.m_steps {
        cfg.m_steps = v;
    }
    if let Some(v) = &common.stepper {
        cfg.stepper = v.clone();
    }
    if let Some(v) = common.slices {
        cfg.slices = v;
    }
    if let Some(v) = common.tau {
        cfg.tau = v;
    }
    if let Some(v) = &common.machine {
        cfg.machine = Some(v.clone());
    }
    if let Some(v) = common.sigma {
        cfg.sigma = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    Ok(cfg)
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Scan(c) => cmd_scan(&build_config(c)?).map(|_| ()),
        Command::Sweep(c) => cmd_sweep(&build_config(c)?).map(|_| ()),
        Command::Correlate(c) => {
            let mut cfg = build_config(c)?;
            if (cfg.lx, cfg.ly) == (2, 2) && c.config.is_none() {
                cfg.ly = 6; // correlate defaults to the 2x6 study lattice
            }
            cmd_correlate(&cfg).map(|_| ())
        }
        Command::Compile(c) => cmd_compile(&build_config(c)?).map(|_| ()),
        Command::Tomo(c) => cmd_tomo(&build_config(c)?).map(|_| ()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Verification(d, t)) => {
            eprintln!("verification failed: distance {d:.3e} exceeds {t:.3e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
