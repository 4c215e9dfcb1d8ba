//! Global tolerances and resource caps.
//!
//! Every numerical threshold in the crate is read from one [`Settings`]
//! record. A process may install its own record once, before doing any work,
//! with [`Settings::install`]; otherwise the defaults apply.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

static GLOBAL: OnceLock<Settings> = OnceLock::new();

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Hermiticity, positivity, trace and POM completeness checks.
    pub validation: f64,
    /// Algebraic identities such as entropy additivity.
    pub algebra: f64,
    /// Normalisation of user-supplied distributions.
    pub normalization: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            validation: 1e-9,
            algebra: 1e-8,
            normalization: 1e-12,
        }
    }
}

impl Tolerances {
    /// Override one tolerance by name (`validation`, `algebra`, `normalization`).
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {name} must be positive and finite, got {value}"
            )));
        }
        match name {
            "validation" => self.validation = value,
            "algebra" => self.algebra = value,
            "normalization" => self.normalization = value,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown tolerance name {other:?}"
                )))
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Settings {
    pub tolerances: Tolerances,
    /// Largest Hilbert-space dimension any tensor product may reach.
    pub max_dim: usize,
    /// Largest input alphabet accepted by the capacity optimiser.
    pub max_alphabet: usize,
    /// Largest support of a distribution over words.
    pub max_support: usize,
    /// Largest number of grid points the capacity optimiser evaluates.
    pub capacity_grid_cap: u64,
    /// Coordinate-ascent sweeps per start.
    pub capacity_iteration_cap: u32,
    /// Number of best grid points refined by coordinate ascent.
    pub capacity_starts: usize,
    /// Codeword tuples the exhaustive code search may examine.
    pub exhaustive_search_cap: u64,
    /// Largest `C(M, a)` the exact family search accepts.
    pub brute_force_cap: u64,
    /// Search-tree nodes the exact family search may visit.
    pub brute_force_node_budget: u64,
    /// Candidates the greedy family builder may scan before giving up.
    pub greedy_scan_cap: u64,
    /// Largest `C(M, a)` that the seeded-random greedy order enumerates and shuffles.
    pub greedy_shuffle_cap: u64,
    /// Attempts made by the random-coding builder.
    pub random_coding_retries: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tolerances: Tolerances::default(),
            max_dim: 4096,
            max_alphabet: 8,
            max_support: 1 << 16,
            capacity_grid_cap: 2_000_000,
            capacity_iteration_cap: 10_000,
            capacity_starts: 4,
            exhaustive_search_cap: 200_000,
            brute_force_cap: 5000,
            brute_force_node_budget: 20_000_000,
            greedy_scan_cap: 100_000_000,
            greedy_shuffle_cap: 2_000_000,
            random_coding_retries: 16,
        }
    }
}

impl Settings {
    /// The process-wide settings: the installed record, or the defaults.
    pub fn global() -> &'static Settings {
        GLOBAL.get_or_init(Settings::default)
    }

    /// Install the process-wide settings. Fails if settings were already read
    /// or installed.
    pub fn install(self) -> std::result::Result<(), Settings> {
        GLOBAL.set(self)
    }
}

pub(crate) fn tol() -> &'static Tolerances {
    &Settings::global().tolerances
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_override_by_name() {
        let mut t = Tolerances::default();
        t.set("algebra", 1e-6).unwrap();
        assert_eq!(t.algebra, 1e-6);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("validation", -1.0).is_err());
    }

    #[test]
    fn unknown_settings_keys_are_rejected() {
        let err = serde_json::from_str::<Settings>(r#"{"max_dimm": 3}"#);
        assert!(err.is_err());
        let ok: Settings = serde_json::from_str(r#"{"max_dim": 16}"#).unwrap();
        assert_eq!(ok.max_dim, 16);
        assert_eq!(ok.tolerances, Tolerances::default());
    }
}
