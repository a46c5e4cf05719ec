//! `cqed`: config-driven runner for the cavity-QED experiments.
//!
//! Exit codes: 0 success, 1 invalid config or arguments, 2 numerical or
//! I/O failure, 3 a `selfcheck` check failed.

mod config;
mod experiments;
mod output;
mod selfcheck;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use output::{sha256_hex, OutputDir};

#[derive(Parser)]
#[command(name = "cqed", version, about = "Cavity-QED experiments: cat states, decoherence, Wigner maps")]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
    /// JSON config; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the Fock truncation.
    #[arg(long, global = true)]
    dim: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Experiment {
    /// One atom turns a coherent field into an even or odd cat.
    PrepareCat,
    /// Two-atom correlation P(e2|e1) against delay.
    DecoherenceScan,
    /// Computed Wigner function of the configured state.
    WignerMap,
    /// Simulated homodyne sampling and filtered back-projection.
    Tomography,
    /// Point-by-point direct measurement of W.
    DirectMap,
    /// W(0) of the damping field, monitored in time.
    DirectMonitor,
    /// Two states with equal position and momentum marginals.
    PauliDemo,
    /// Fast invariant suite.
    Selfcheck,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::PrepareCat => "prepare-cat",
            Experiment::DecoherenceScan => "decoherence-scan",
            Experiment::WignerMap => "wigner-map",
            Experiment::Tomography => "tomography",
            Experiment::DirectMap => "direct-map",
            Experiment::DirectMonitor => "direct-monitor",
            Experiment::PauliDemo => "pauli-demo",
            Experiment::Selfcheck => "selfcheck",
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(cqed_core::Error),
    Io(std::io::Error),
    Check(String),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) | RunError::Io(_) => 2,
            RunError::Check(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
            RunError::Io(e) => write!(f, "i/o failure: {e}"),
            RunError::Check(m) => write!(f, "selfcheck failed: {m}"),
        }
    }
}

impl From<cqed_core::Error> for RunError {
    fn from(e: cqed_core::Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, RunError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(&text).map_err(RunError::Config)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.dim.is_some() {
        cfg.dim = cli.dim;
    }
    cfg.validate().map_err(RunError::Config)?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let cfg = load_config(cli)?;
    let canonical = serde_json::to_vec(&cfg).map_err(|e| RunError::Config(e.to_string()))?;
    let hash = sha256_hex(&canonical);
    let mut out = OutputDir::create(&cli.out, hash)?;
    let mut failed = Vec::new();
    match cli.experiment {
        Experiment::PrepareCat => experiments::prepare_cat_run(&cfg, &mut out)?,
        Experiment::DecoherenceScan => experiments::decoherence_scan(&cfg, &mut out)?,
        Experiment::WignerMap => experiments::wigner_map_run(&cfg, &mut out)?,
        Experiment::Tomography => experiments::tomography(&cfg, &mut out)?,
        Experiment::DirectMap => experiments::direct_map(&cfg, &mut out)?,
        Experiment::DirectMonitor => experiments::direct_monitor(&cfg, &mut out)?,
        Experiment::PauliDemo => experiments::pauli_demo(&cfg, &mut out)?,
        Experiment::Selfcheck => {
            let checks = selfcheck::run()?;
            for c in &checks {
                println!(
                    "{:<20} {}  value {:.3e}  limit {:.3e}  {}",
                    c.name,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.value,
                    c.limit,
                    c.note
                );
            }
            failed = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
            out.json("selfcheck.json", &checks)?;
        }
    }
    let manifest = out.finish(cli.experiment.name(), &cfg)?;
    println!("wrote {}", manifest.display());
    if !failed.is_empty() {
        return Err(RunError::Check(failed.join(", ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cqed {}: {e}", cli.experiment.name());
            ExitCode::from(e.exit_code())
        }
    }
}
