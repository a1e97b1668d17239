use clap::{Parser, Subcommand};
use qpww_core::io::{parse_spec, run, Command, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

/// Quasiperiodic water-wave simulator and estimate laboratory.
///
/// Exit codes: 0 success, 1 file or snapshot failure, 2 invalid
/// arguments or spec, 3 surface degenerate, 4 non-finite values,
/// 5 iteration did not contract.
#[derive(Parser, Debug)]
#[command(name = "qpww", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// TOML run specification; required by `simulate`.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,

    /// Output directory. Overrides QPWW_OUTPUT_DIR and the spec.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Replaces every seed in the spec.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel trials.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Integrate the differentiated, undifferentiated or linearized system.
    Simulate,
    /// Randomized ratio checks of the estimates.
    LemmaSuite,
    /// Iteration scheme and its contraction factors.
    Iterate,
    /// Resolution refinement of rough data.
    Refine,
    /// Measured frequencies of small single-mode waves.
    Dispersion,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::Simulate => Command::Simulate,
        Sub::LemmaSuite => Command::LemmaSuite,
        Sub::Iterate => Command::Iterate,
        Sub::Refine => Command::Refine,
        Sub::Dispersion => Command::Dispersion,
    };
    let (spec, base_dir) = match &cli.spec {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            };
            match parse_spec(&text) {
                Ok(s) => (s, path.parent().map(PathBuf::from).unwrap_or_default()),
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(e.exit_code() as u8);
                }
            }
        }
        None if matches!(command, Command::Simulate) => {
            eprintln!("error: simulate needs --spec");
            return ExitCode::from(2);
        }
        None => (parse_spec("").expect("empty spec is valid"), PathBuf::new()),
    };
    let opts = RunOptions {
        output: cli.output,
        seed: cli.seed,
        threads: cli.threads,
        base_dir,
    };
    let outcome = run(command, &spec, &opts);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    println!("{}", outcome.output_dir.display());
    ExitCode::from(outcome.exit_code as u8)
}
