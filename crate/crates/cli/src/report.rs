//! Run reports and CLI errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use qidlab_core::{rng::PRNG_CONTRACT, Error, Settings};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    /// A library error raised while running the named pipeline stage.
    Core { stage: &'static str, error: Error },
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn core(stage: &'static str, error: Error) -> Self {
        CliError::Core { stage, error }
    }

    pub fn usage(message: String) -> Self {
        CliError::Usage(message)
    }

    pub fn io(message: String) -> Self {
        CliError::Io(message)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core { error, .. } => error.kind(),
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            CliError::Core { stage, .. } => Some(stage),
            _ => None,
        }
    }

    /// 2 for invariant violations, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core {
                error: Error::InvariantViolation(_),
                ..
            } => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core { stage, error } => write!(f, "[{stage}] {error}"),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    /// `None` when the file could not be read.
    pub sha256: Option<String>,
}

/// SHA-256 of every file a run read, keyed by role.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(transparent)]
pub struct InputHashes(BTreeMap<String, InputRecord>);

impl InputHashes {
    pub fn record(&mut self, role: &str, path: &Path) {
        let sha256 = std::fs::read(path).ok().map(|b| sha256_hex(&b));
        self.0.insert(
            role.to_string(),
            InputRecord {
                path: path.display().to_string(),
                sha256,
            },
        );
    }
}

/// Result of a successful command run.
pub struct Done {
    pub summary: String,
    /// 0, or 1 when the command ran but its check came out negative.
    pub exit_code: u8,
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub stage: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    pub prng_contract: String,
    /// `ok`, `check_failed` or `error`.
    pub status: String,
    pub config: ExperimentConfig,
    pub seed: Option<u64>,
    pub settings: Settings,
    pub settings_hash: String,
    pub inputs: InputHashes,
    pub wall_time_seconds: f64,
    pub threads: usize,
    pub cache_dir: Option<String>,
    pub error: Option<ErrorRecord>,
    pub payload: serde_json::Value,
    /// SHA-256 of the payload as written; equal across reruns of the same
    /// config, seed and input files.
    pub payload_hash: String,
}

pub fn settings_hash(settings: &Settings) -> String {
    let text = qidlab_core::format::to_json(settings).unwrap_or_default();
    sha256_hex(text.as_bytes())
}

pub fn payload_hash(payload: &serde_json::Value) -> String {
    let text = qidlab_core::format::to_json(payload).unwrap_or_default();
    sha256_hex(text.as_bytes())
}

impl RunReport {
    pub fn new(
        command: &str,
        config: &ExperimentConfig,
        settings: &Settings,
        inputs: InputHashes,
        wall_time_seconds: f64,
        threads: usize,
        outcome: &Result<Done, CliError>,
    ) -> Self {
        let (status, error, payload) = match outcome {
            Ok(done) => {
                let status = if done.exit_code == 0 { "ok" } else { "check_failed" };
                (status, None, done.payload.clone())
            }
            Err(e) => (
                "error",
                Some(ErrorRecord {
                    kind: e.kind().to_string(),
                    stage: e.stage().map(str::to_string),
                    message: e.to_string(),
                }),
                serde_json::Value::Null,
            ),
        };
        RunReport {
            command: command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            prng_contract: PRNG_CONTRACT.to_string(),
            status: status.to_string(),
            config: config.clone(),
            seed: config.seed,
            settings: settings.clone(),
            settings_hash: settings_hash(settings),
            inputs,
            wall_time_seconds,
            threads,
            cache_dir: std::env::var("QIDLAB_CACHE_DIR").ok(),
            error,
            payload_hash: payload_hash(&payload),
            payload,
        }
    }
}
