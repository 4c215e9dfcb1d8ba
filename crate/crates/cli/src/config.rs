//! Experiment configuration files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qidlab_core::channel::{WeightedWord, Word};
use qidlab_core::Settings;
use serde::{Deserialize, Serialize};

use crate::report::CliError;

/// Distribution over input words of length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    /// Uniform over all `aⁿ` words.
    Uniform,
    /// `Pⁿ` for a letter distribution.
    Iid { letter_masses: Vec<f64> },
    Point { word: Word },
    Explicit { entries: Vec<WeightedWord> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeMethod {
    #[default]
    Exhaustive,
    RandomCoding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderSpec {
    #[default]
    Lexicographic,
    SeededRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubstitutePom {
    Trivial,
}

/// Every key is optional; each command checks the ones it needs. Relative
/// paths are taken relative to the config file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pom: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id_code_file: Option<PathBuf>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Code size `M`, also the family's ground-set size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Family set size `a`; overrides `⌊εM⌋`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<u64>>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<CodeMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enforce_precondition: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keep_matrix: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_pairs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substitute_pom: Option<SubstitutePom>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id_code_out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_csv: Option<PathBuf>,

    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<Settings>,
}

#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn empty() -> Self {
        LoadedConfig {
            config: ExperimentConfig::default(),
            base_dir: std::env::current_dir().unwrap_or_default(),
        }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    let config: ExperimentConfig = qidlab_core::format::from_json(&text)
        .map_err(|e| CliError::core("config", e))?;
    let base_dir = path
        .parent()
        .map(Path::to_path_buf)
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(LoadedConfig { config, base_dir })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let err = qidlab_core::format::from_json::<ExperimentConfig>(r#"{"lambda": 0.1, "lamda": 2}"#);
        assert!(err.is_err());
    }

    #[test]
    fn input_spec_forms() {
        let c: ExperimentConfig = qidlab_core::format::from_json(
            r#"{"input": {"kind": "iid", "letter_masses": [0.25, 0.75]}, "n": 2}"#,
        )
        .unwrap();
        assert_eq!(
            c.input,
            Some(InputSpec::Iid {
                letter_masses: vec![0.25, 0.75]
            })
        );
    }
}
