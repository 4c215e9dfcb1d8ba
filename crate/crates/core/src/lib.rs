//! Numerical laboratory for identification coding over classical-quantum channels.
//!
//! The crate is organised around the objects of the theory:
//!
//! - [`quantum`]: dense density operators, effects, POMs, Born-rule measurement,
//!   von Neumann entropy and classical variational distance.
//! - [`channel`]: memoryless classical-quantum channels, word states, mixed
//!   outputs, the Holevo quantity and its maximisation over the input simplex.
//! - [`transmission`]: `(n, M, ε)` transmission codes with exact verification,
//!   an exhaustive square-root-measurement search and the random-coding
//!   construction driven by information densities.
//! - [`family`]: equal-size subset families with bounded pairwise intersections,
//!   the counting bounds that guarantee them, a greedy builder and an exact
//!   branch-and-bound oracle.
//! - [`idcode`]: simultaneous identification codes built from a transmission
//!   code and a set family, plus exact verification of both error kinds.
//! - [`resolvability`]: M-type distributions, measurement-induced distances,
//!   information density, random selection and the separation inequality.
//!
//! All logarithms are base 2. Numerical tolerances and resource caps live in
//! one [`Settings`] record.

pub mod channel;
pub mod error;
pub mod family;
pub mod format;
pub mod idcode;
pub mod linalg;
pub mod quantum;
pub mod random;
pub mod resolvability;
pub mod rng;
pub mod settings;
pub mod transmission;

pub use channel::{CqChannel, InducedClassicalChannel, Word, WordDistribution, WordState};
pub use error::{Error, Result};
pub use family::{FamilyParams, SetFamily};
pub use idcode::{IdVerification, QidCodeGeneral, SimQidCode};
pub use linalg::CMatrix;
pub use quantum::{DensityOperator, Effect, FiniteDistribution, Pom};
pub use resolvability::{MTypeDistribution, ResolvabilityReport};
pub use settings::{Settings, Tolerances};
pub use transmission::{CodeVerification, QCode};

pub use num_complex::Complex64;
