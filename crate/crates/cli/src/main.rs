use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phvqe_cli::{parse_config, run, Command, RunSpec, Settings, UsageError};

#[derive(Parser)]
#[command(name = "phvqe", version, about = "Particle-hole VQE energies, dissociation scans and Trotter studies")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// VQE energy at a single geometry.
    Energy(Flags),
    /// One VQE energy per geometry plus a summary row.
    Scan(Flags),
    /// Replayed vs. reoptimized UCCSD errors over Trotter step counts.
    Trotter(Flags),
}

#[derive(Args)]
struct Flags {
    /// FCIDUMP glob; several patterns may be comma-separated.
    #[arg(long)]
    fixtures: Option<String>,
    /// uccsd, ex1, ex2 or cnot.
    #[arg(long)]
    ansatz: Option<String>,
    /// Active occupied spin orbitals (UCCSD).
    #[arg(long)]
    active_occ: Option<usize>,
    /// Active virtual spin orbitals (UCCSD).
    #[arg(long)]
    active_virt: Option<usize>,
    /// Entangler blocks of the heuristic circuits.
    #[arg(long)]
    depth: Option<usize>,
    /// Trotter steps; for `trotter`, a comma list or N meaning 1..=N.
    #[arg(long)]
    trotter: Option<String>,
    /// Largest number-penalty strength of the ramped schedule.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// ph (particle-hole, default) or sq (plain second quantization).
    #[arg(long)]
    hamiltonian: Option<String>,
    /// Energy-change stopping tolerance in Hartree.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    gradient_step: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Directory for the CSV and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value settings file (a manifest works); flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn settings(self) -> anyhow::Result<Settings> {
        let base = match &self.config {
            Some(path) => parse_config(
                &std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?,
            )?,
            None => Settings::default(),
        };
        let flags = Settings {
            fixtures: self.fixtures,
            ansatz: self.ansatz,
            active_occ: self.active_occ,
            active_virt: self.active_virt,
            depth: self.depth,
            trotter: self.trotter,
            mu: self.mu,
            seed: self.seed,
            hamiltonian: self.hamiltonian,
            tolerance: self.tolerance,
            gradient_step: self.gradient_step,
            max_iterations: self.max_iterations,
            out: self.out,
            fixture_hashes: Vec::new(),
        };
        Ok(flags.over(base))
    }
}

fn execute(cli: Cli) -> anyhow::Result<String> {
    let (command, flags) = match cli.command {
        Sub::Energy(f) => (Command::Energy, f),
        Sub::Scan(f) => (Command::Scan, f),
        Sub::Trotter(f) => (Command::Trotter, f),
    };
    let spec = RunSpec::resolve(command, flags.settings()?)?;
    Ok(run(&spec)?.csv)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(csv) => {
            print!("{csv}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
