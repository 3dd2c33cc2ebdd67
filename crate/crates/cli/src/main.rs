//! `ipdsaw` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure (or
//! failed self-test), 3 budget exhausted.

mod commands;
mod config;

use std::fs;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use ipdsaw::{Error, Result};
use serde_json::{json, Value};

use config::{Command, Flags, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "ipdsaw", version, about = "Exact and Monte Carlo computations for the IPDSAW polymer")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::InvalidPath(_) => "invalid_path",
        Error::MalformedWalk(_) => "malformed_walk",
        Error::Domain(_) => "domain",
        Error::NoConvergence { .. } => "no_convergence",
        Error::Guard(_) => "guard",
        Error::BudgetExhausted { .. } => "budget_exhausted",
        Error::MemoryBudget { .. } => "memory_budget",
        Error::NotPsd(_) => "not_psd",
        Error::Degenerate(_) => "degenerate",
        Error::Format(_) => "format",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

fn report_error(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!("{}", json!({"error": kind, "message": message, "exit_code": code}));
    ExitCode::from(code)
}

fn execute(config: &RunConfig) -> Result<bool> {
    if let Some(t) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    let start = Instant::now();
    let out = commands::run(config)?;
    let elapsed = start.elapsed().as_secs_f64();
    match &config.out {
        None => print!("{}", out.body),
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(&out.name), &out.body)?;
            for (name, text) in &out.extra {
                fs::write(dir.join(name), text)?;
            }
            fs::write(dir.join("config.json"), serde_json::to_string_pretty(config)? + "\n")?;
            let mut meta = out.meta.clone();
            meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            meta.insert("threads".into(), json!(rayon::current_num_threads()));
            meta.insert("elapsed_s".into(), json!(elapsed));
            let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            meta.insert("finished_unix".into(), json!(now));
            fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&Value::Object(meta))? + "\n")?;
        }
    }
    Ok(out.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("usage", e.to_string().trim_end().to_string(), 1),
    };
    let config = match RunConfig::resolve(cli.command, cli.flags) {
        Ok(c) => c,
        Err(e) => return report_error(error_kind(&e), e.to_string(), 1),
    };
    match execute(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => report_error(error_kind(&e), e.to_string(), e.exit_code() as u8),
    }
}
