//! Scenario runner for the biwave solvers.
//!
//! A scenario file names the wave speeds (or Lamé parameters), initial data,
//! optional forcing, an evaluation grid and one task. [`run_file`] executes it
//! and [`deliver`] routes the CSV table and JSON report to files or streams.

pub mod error;
pub mod expr;
pub mod run;
pub mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use error::CliError;
pub use run::{fmt_g17, run, Outcome, Overrides};
pub use scenario::{parse_scenario, serialize_scenario, Scenario, TaskKind};

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

/// Parse and run a scenario file. Returns the outcome and the output path, if any.
pub fn run_file(path: &Path, ov: &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let scenario = load(path)?;
    let outcome = run(&scenario, ov)?;
    let out = ov.out.clone().or_else(|| scenario.task.output.as_ref().map(PathBuf::from));
    Ok((outcome, out))
}

/// With an output path the CSV (or, for table-less tasks, the report) goes to
/// the file and the report to `stdout`. Without one the CSV goes to `stdout`
/// and the report to `stderr`.
pub fn deliver(
    outcome: &Outcome,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let io = |path: &str| {
        let path = path.to_string();
        move |source| CliError::Io { path, source }
    };
    let primary = outcome.csv.as_deref();
    match (out, primary) {
        (Some(path), Some(csv)) => {
            std::fs::write(path, csv).map_err(io(&path.display().to_string()))?;
            writeln!(stdout, "{}", outcome.report).map_err(io("stdout"))?;
        }
        (Some(path), None) => {
            std::fs::write(path, format!("{}\n", outcome.report)).map_err(io(&path.display().to_string()))?;
            writeln!(stdout, "{}", outcome.report).map_err(io("stdout"))?;
        }
        (None, Some(csv)) => {
            stdout.write_all(csv.as_bytes()).map_err(io("stdout"))?;
            writeln!(stderr, "{}", outcome.report).map_err(io("stderr"))?;
        }
        (None, None) => writeln!(stdout, "{}", outcome.report).map_err(io("stdout"))?,
    }
    Ok(())
}
