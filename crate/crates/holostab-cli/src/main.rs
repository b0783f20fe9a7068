//! `holostab` experiment harness.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, Overrides, Settings};
use manifest::Manifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("missing input {}", .0.display())]
    MissingInput(PathBuf),
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, std::io::Error),
    #[error(transparent)]
    Lib(#[from] holostab::Error),
}

#[derive(Debug, Parser)]
#[command(name = "holostab", version, about = "Stability sweeps, bounds and CTF reconstruction for near-field holography")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Smallest singular value of T and the complement constant over an fbar range.
    SweepIp1(Flags),
    /// Least stable mode at one fbar and its correlation with the leading prolate function.
    Mode(Flags),
    /// Prolate eigenvalues against their asymptotics.
    Prolate(Flags),
    /// Analytic lower bounds over an (f, alpha, m) lattice.
    Bounds(Flags),
    /// Phantom, linear contrasts and nonlinear holograms.
    Simulate(Flags),
    /// CTF inversion of simulated contrasts with error metrics.
    Reconstruct(Flags),
    /// Property suites; exit status 1 on any failure.
    Verify(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// TOML file whose keys override the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run directory of a previous `simulate`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    fbar_min: Option<f64>,
    #[arg(long)]
    fbar_max: Option<f64>,
    #[arg(long)]
    fbar_steps: Option<usize>,
    /// Single reduced Fresnel number (first distance for `simulate`).
    #[arg(long)]
    fbar: Option<f64>,
    /// Second distance for `simulate`.
    #[arg(long)]
    fbar2: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    /// Samples across the unit support per axis.
    #[arg(long)]
    support_n: Option<usize>,
    #[arg(long)]
    reg: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// 262144-point grid with 512 support samples.
    #[arg(long)]
    paper_scale: bool,
    /// Relative noise level for `simulate`.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Fault injected by `verify`, e.g. `flip-ctf-phase-sign`.
    #[arg(long)]
    mutate: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            input: self.input.clone(),
            fbar_min: self.fbar_min,
            fbar_max: self.fbar_max,
            fbar_steps: self.fbar_steps,
            fbar: self.fbar,
            fbar2: self.fbar2,
            alpha: self.alpha,
            grid_n: self.grid_n,
            support_n: self.support_n,
            reg: self.reg,
            seed: self.seed,
            paper_scale: self.paper_scale.then_some(true),
            noise: self.noise,
            trials: self.trials,
            mutation: self.mutate.clone(),
            ..Overrides::default()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HOLOSTAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("HOLOSTAB_THREADS={v:?} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

/// Ok(true) when the run succeeded, Ok(false) when verification failed.
fn run(command: Command, flags: &Flags) -> Result<bool, CliError> {
    configure_threads()?;
    let file = match &flags.config {
        Some(p) => Overrides::load(p).map_err(CliError::Usage)?,
        None => Overrides::default(),
    };
    let settings = Settings::resolve(command, file.merged(flags.overrides())).map_err(CliError::Usage)?;
    let mut m = Manifest::begin(&settings, flags.config.clone()).map_err(|e| CliError::Io(settings.out.clone(), e))?;
    let result = match command {
        Command::SweepIp1 => commands::sweep_ip1(&settings, &mut m).map(|_| true),
        Command::Mode => commands::mode(&settings, &mut m).map(|_| true),
        Command::Prolate => commands::prolate(&settings, &mut m).map(|_| true),
        Command::Bounds => commands::bounds(&settings, &mut m).map(|_| true),
        Command::Simulate => commands::simulate(&settings, &mut m).map(|_| true),
        Command::Reconstruct => commands::reconstruct(&settings, &mut m).map(|_| true),
        Command::Verify => commands::verify(&settings, &mut m).map(|failed| failed == 0),
    };
    let status = match &result {
        Ok(true) => "ok",
        Ok(false) => "verification_failed",
        Err(_) => "error",
    };
    m.finish(status).map_err(|e| CliError::Io(settings.out.clone(), e))?;
    result
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Cmd::SweepIp1(f) => (Command::SweepIp1, f),
        Cmd::Mode(f) => (Command::Mode, f),
        Cmd::Prolate(f) => (Command::Prolate, f),
        Cmd::Bounds(f) => (Command::Bounds, f),
        Cmd::Simulate(f) => (Command::Simulate, f),
        Cmd::Reconstruct(f) => (Command::Reconstruct, f),
        Cmd::Verify(f) => (Command::Verify, f),
    };
    match run(command, flags) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
