mod commands;
mod error;
mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use commands::{run_single, run_sweep, run_validate, Command};
use error::CliError;
use spec::{Overrides, ProblemSpec, SweepSpec};

/// Exact stratification calculus for de Rham prismatic crystals: JSON in, JSON out.
#[derive(Debug, Parser)]
#[command(name = "prismstrat", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Spec file (alternative to --spec).
    spec_path: Option<PathBuf>,
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "PRISMSTRAT_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    trunc_t: Option<usize>,
    #[arg(long)]
    trunc_x: Option<usize>,
    #[arg(long)]
    prec: Option<i64>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

fn emit(out: Option<&Path>, v: &Value) -> Result<(), CliError> {
    // serde_json maps are ordered, so keys come out sorted.
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
        }
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    let Some(n) = jobs else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}

/// Returns the report and the exit code it carries.
fn run(cli: &Cli) -> Result<(Value, u8), CliError> {
    configure_jobs(cli.jobs)?;
    let path = cli
        .spec
        .as_ref()
        .or(cli.spec_path.as_ref())
        .ok_or_else(|| CliError::Usage("a spec file is required (positional or --spec)".into()))?;
    let overrides = Overrides {
        trunc_t: cli.trunc_t,
        trunc_x: cli.trunc_x,
        prec: cli.prec,
    };
    match cli.command {
        Command::Sweep => {
            let sweep: SweepSpec = read_json(path)?;
            let v = run_sweep(&sweep, |s| s.apply(&overrides))?;
            let flagged = v["summary"]["potential_counterexamples"]
                .as_array()
                .map_or(0, Vec::len);
            if flagged > 0 {
                eprintln!("POTENTIAL COUNTEREXAMPLE: {flagged} instance(s) with a nonzero residual, see summary");
            }
            Ok((v, 0))
        }
        Command::Validate => {
            let mut spec: ProblemSpec = read_json(path)?;
            spec.apply(&overrides);
            let (v, blocking) = run_validate(&spec);
            Ok((v, if blocking { 2 } else { 0 }))
        }
        cmd => {
            let mut spec: ProblemSpec = read_json(path)?;
            spec.apply(&overrides);
            Ok((run_single(cmd, &spec)?, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, code)) => match emit(cli.out.as_deref(), &v) {
            Ok(()) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            let v = serde_json::json!({ "command": cli.command.name(), "error": e.object() });
            if let Err(w) = emit(cli.out.as_deref(), &v) {
                eprintln!("error: {w}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
