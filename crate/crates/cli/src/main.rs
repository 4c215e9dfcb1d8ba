//! `qidlab`: batch experiments on identification over cq-channels.
//!
//! Every subcommand reads a JSON config, runs one pipeline from the core
//! library and writes a JSON run report. Exit status is 0 on success, 1 on
//! invalid input or an unmet precondition, and 2 when an internal invariant
//! check fails.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qidlab_core::Settings;

use crate::config::{ExperimentConfig, LoadedConfig};
use crate::report::{CliError, RunReport};

#[derive(Parser, Debug)]
#[command(name = "qidlab", version, about = "Identification over classical-quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report path; the report goes to stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Tolerance override, `name=value` (validation, algebra, normalization).
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
enum Command {
    /// Load and validate a channel file.
    ValidateChannel {
        /// Channel file; falls back to the config's `channel`.
        #[arg()]
        path: Option<PathBuf>,
    },
    /// Holevo capacity of a channel.
    Capacity,
    /// Build a transmission code (exhaustive or random coding).
    BuildTxCode,
    /// Build an intersection-bounded set family.
    BuildFamily,
    /// Build and verify a simultaneous identification code.
    BuildIdCode,
    /// Verify an identification code file.
    VerifyIdCode,
    /// Information densities and random-selection resolvability.
    Resolvability,
    /// Pairwise output separation of a verified identification code.
    Separation,
    /// Enumerate information densities.
    InfoDensity,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ValidateChannel { .. } => "validate-channel",
            Command::Capacity => "capacity",
            Command::BuildTxCode => "build-tx-code",
            Command::BuildFamily => "build-family",
            Command::BuildIdCode => "build-id-code",
            Command::VerifyIdCode => "verify-id-code",
            Command::Resolvability => "resolvability",
            Command::Separation => "separation",
            Command::InfoDensity => "info-density",
        }
    }
}

fn prepare(cli: &Cli) -> Result<LoadedConfig, CliError> {
    let mut loaded = match &cli.config {
        Some(path) => config::load(path)?,
        None => LoadedConfig::empty(),
    };
    if let Command::ValidateChannel { path: Some(p) } = &cli.command {
        loaded.config.channel = Some(p.clone());
        loaded.base_dir = std::env::current_dir().unwrap_or_default();
    }
    if let Some(seed) = cli.seed {
        loaded.config.seed = Some(seed);
    }
    if let Some(out) = &cli.out {
        let cwd = std::env::current_dir().unwrap_or_default();
        loaded.config.output = Some(cwd.join(out));
    }
    for t in &cli.tolerances {
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--tolerance expects NAME=VALUE, got {t:?}")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::usage(format!("tolerance value {value:?} is not a number")))?;
        loaded.config.tolerances.insert(name.to_string(), value);
    }
    Ok(loaded)
}

fn install_settings(cfg: &ExperimentConfig) -> Result<Settings, CliError> {
    let mut settings = cfg.settings.clone().unwrap_or_default();
    for (name, value) in &cfg.tolerances {
        settings
            .tolerances
            .set(name, *value)
            .map_err(|e| CliError::core("settings", e))?;
    }
    settings
        .clone()
        .install()
        .map_err(|_| CliError::usage("settings were already in use".into()))?;
    Ok(settings)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if rayon::ThreadPoolBuilder::new().num_threads(k).build_global().is_err() {
            eprintln!("error: could not configure the worker pool");
            return ExitCode::from(1);
        }
    }

    let started = Instant::now();
    let command = cli.command.name();
    let loaded = match prepare(&cli) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let settings = match install_settings(&loaded.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };

    let mut inputs = report::InputHashes::default();
    if let Some(path) = &cli.config {
        inputs.record("config", path);
    }
    let outcome = commands::run(command, &loaded, &mut inputs);
    let report = RunReport::new(
        command,
        &loaded.config,
        &settings,
        inputs,
        started.elapsed().as_secs_f64(),
        rayon::current_num_threads(),
        &outcome,
    );
    let text = match qidlab_core::format::to_json(&report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: could not serialise report: {e}");
            return ExitCode::from(2);
        }
    };
    match &loaded.config.output {
        Some(path) => {
            let path = loaded.resolve(path);
            if let Err(e) = std::fs::write(&path, text + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            if writeln!(out, "{text}").is_err() {
                return ExitCode::from(1);
            }
        }
    }

    match outcome {
        Ok(done) => {
            eprintln!("{command}: {}", done.summary);
            ExitCode::from(done.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
