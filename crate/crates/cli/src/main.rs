use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use biwave_cli::{deliver, run_file, Overrides};

#[derive(Parser)]
#[command(name = "biwave", version, about = "Evaluate and verify biwave Cauchy problem solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        scenario: PathBuf,
        /// Write the CSV table (or the report) here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Gauss-Legendre order for interval integrals.
        #[arg(long)]
        quad_order: Option<usize>,
        /// Sphere and ball rule level.
        #[arg(long)]
        sphere_level: Option<usize>,
        /// Relative step of the derivative stencils.
        #[arg(long)]
        h_rel: Option<f64>,
        /// Fail (exit 1) when the task's error measure exceeds this.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Worker threads for grid evaluation.
        #[arg(long, env = "BIWAVE_THREADS")]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run {
        scenario,
        out,
        quad_order,
        sphere_level,
        h_rel,
        tolerance,
        threads,
    } = cli.command;
    let ov = Overrides {
        out,
        quad_order,
        sphere_level,
        h_rel,
        tolerance,
        threads,
    };
    let result = run_file(&scenario, &ov).and_then(|(outcome, out)| {
        deliver(&outcome, out.as_deref(), &mut std::io::stdout(), &mut std::io::stderr())?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(2)
        }
    }
}
