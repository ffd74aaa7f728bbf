use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use convergence_lab::{load_config, run, validate_config, RunError, Task};

#[derive(Parser)]
#[command(
    name = "convergence-lab",
    version,
    about = "Convolution-power experiments on lattice measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir`, default `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit μ_1..μ_N and their moments.
    Convolve(Common),
    /// Fourier profiles of ν_1 and selected μ_n.
    Spectrum(Common),
    /// Hypothesis report and summary.
    Check(Common),
    /// Weak-(1,1) table and convergence trace.
    Simulate(Common),
    /// Dissipativity, Fourier floor scan and sweep-out simulation.
    Sweepout(Common),
    /// Validate the config without running.
    Validate(Common),
}

fn execute(task: Task, args: &Common) -> Result<(), RunError> {
    let cfg = load_config(&args.config)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = run(task, &cfg, &out, args.threads.map(usize::from))?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match &cli.command {
        Command::Convolve(a) => (Task::Convolve, a),
        Command::Spectrum(a) => (Task::Spectrum, a),
        Command::Check(a) => (Task::Check, a),
        Command::Simulate(a) => (Task::Simulate, a),
        Command::Sweepout(a) => (Task::Sweepout, a),
        Command::Validate(a) => {
            return match validate_config(&a.config) {
                Ok(d) if d.is_empty() => {
                    println!("{}: ok", a.config.display());
                    ExitCode::SUCCESS
                }
                Ok(d) => {
                    for diag in &d {
                        eprintln!("{diag}");
                    }
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
    };
    match execute(task, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
