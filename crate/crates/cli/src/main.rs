mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Command, RunConfig};
use commands::{Status, UsageError};

fn run(cfg: &RunConfig) -> anyhow::Result<Status> {
    commands::check_tolerances(&cfg.tol)?;
    if let Some(n) = cfg.threads {
        if n == 0 {
            anyhow::bail!(UsageError("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cfg.command {
        Command::Bound(a) => commands::bound(a, &cfg.tol),
        Command::Score(a) => commands::score(a, &cfg.tol),
        Command::Probspace(a) => commands::probspace(a, &cfg.tol),
        Command::Verify(a) => commands::verify(a, &cfg.tol),
        Command::Witness(a) => commands::witness(a),
        Command::Repro(a) => commands::repro(a),
    }
}

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match run(&cfg) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Ok(Status::GapAboveTol) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
