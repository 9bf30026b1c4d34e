use cbesov::compare::{compare_runs, DEFAULT_TOLERANCE};
use cbesov::explain::explain;
use cbesov::run::{run_file, RunOptions};
use cbesov::CliError;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cbesov",
    version,
    about = "Norm-inflation experiments in critical Besov spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one JSON config and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: $CBESOV_OUT_ROOT or runs/, plus the config name).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweeps.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Diff the tables of two run directories.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Print the definition and predicted scaling of a reported quantity.
    Explain { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => run_file(&config, &RunOptions { out, threads }).map(|(dir, m)| {
            println!("wrote {} ({} files)", dir.display(), m.files.len());
            for (k, v) in &m.summary {
                println!("  {k} = {v}");
            }
        }),
        Command::Compare { a, b, tol } => compare_runs(&a, &b, tol).and_then(|r| {
            if r.is_clean() {
                Ok(())
            } else {
                print!("{r}");
                Err(CliError::Comparison(format!(
                    "{} field(s) beyond tolerance {tol:e}",
                    r.diffs.len()
                )))
            }
        }),
        Command::Explain { name } => explain(&name).map(|t| print!("{t}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cbesov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
