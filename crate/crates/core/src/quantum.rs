//! States, effects, POMs and the classical quantities they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, ONE};
use crate::settings::{tol, Settings};

/// A quantum state: Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validate a raw matrix as a density operator.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        validate_density(matrix)
    }

    /// The maximally mixed state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: linalg::identity(dim) * c(1.0 / dim as f64, 0.0),
        }
    }

    /// Computational basis state `|k⟩⟨k|` (0-based `k`).
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut matrix = linalg::zeros(dim);
        matrix[(k, k)] = ONE;
        DensityOperator { matrix }
    }

    /// Pure state `|ψ⟩⟨ψ|`; the vector must have unit norm.
    pub fn pure(psi: &[num_complex::Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > tol().validation {
            return Err(Error::TraceNotOne { trace: norm2 });
        }
        Ok(DensityOperator {
            matrix: linalg::outer(psi),
        })
    }

    /// The empty tensor product: the scalar 1 on a one-dimensional space.
    pub fn scalar_one() -> Self {
        DensityOperator {
            matrix: linalg::identity(1),
        }
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        DensityOperator { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// `σ(D) = tr(σ̂ D)` for an operator on the same space.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        linalg::trace_product_re(&self.matrix, op)
    }
}

/// Validate a raw complex matrix as a state, naming the violated invariant.
pub fn validate_density(matrix: CMatrix) -> Result<DensityOperator> {
    let dim = linalg::ensure_square(&matrix)?;
    if dim == 0 {
        return Err(Error::InvalidParameter("zero-dimensional state".into()));
    }
    let t = tol().validation;
    let deviation = linalg::hermitian_deviation(&matrix);
    if deviation > t {
        return Err(Error::NonHermitian { deviation });
    }
    let min_eigenvalue = linalg::hermitian_eigenvalues(&matrix)[0];
    if min_eigenvalue < -t {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let trace = linalg::trace(&matrix);
    if (trace.re - 1.0).abs() > t || trace.im.abs() > t {
        return Err(Error::TraceNotOne { trace: trace.re });
    }
    Ok(DensityOperator { matrix })
}

fn check_dim_cap(dim: usize) -> Result<()> {
    let cap = Settings::global().max_dim;
    if dim > cap {
        return Err(Error::ResourceLimit {
            what: "Hilbert-space dimension",
            requested: dim as u128,
            limit: cap as u128,
        });
    }
    Ok(())
}

/// Kronecker product of two states; dimensions multiply.
pub fn tensor(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DensityOperator> {
    check_dim_cap(rho.dim() * sigma.dim())?;
    Ok(DensityOperator {
        matrix: linalg::kron(&rho.matrix, &sigma.matrix),
    })
}

/// A single operator `0 ≤ D ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    matrix: CMatrix,
}

impl Effect {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        linalg::ensure_square(&matrix)?;
        let t = tol().validation;
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > t {
            return Err(Error::NonHermitian { deviation });
        }
        let spectrum = linalg::hermitian_eigenvalues(&matrix);
        let (lo, hi) = match (spectrum.first(), spectrum.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Err(Error::InvalidParameter("zero-dimensional effect".into())),
        };
        if lo < -t || hi > 1.0 + t {
            return Err(Error::EffectOutOfRange {
                min_eigenvalue: lo,
                max_eigenvalue: hi,
            });
        }
        Ok(Effect { matrix })
    }

    /// For sums of effects of a validated POM, which satisfy `0 ≤ D ≤ 1` by construction.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Effect { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }
}

/// Outcome identifier. Simple POMs use `[k]` (1-based); tensor products
/// concatenate the labels of their factors.
pub type OutcomeLabel = Vec<u32>;

/// Positive operator measurement: PSD effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Pom {
    dim: usize,
    effects: Vec<CMatrix>,
    labels: Vec<OutcomeLabel>,
}

impl Pom {
    /// Validate effects and attach default labels `[1], [2], …`.
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let labels = (1..=effects.len() as u32).map(|k| vec![k]).collect();
        Pom::with_labels(effects, labels)
    }

    pub fn with_labels(effects: Vec<CMatrix>, labels: Vec<OutcomeLabel>) -> Result<Self> {
        let first = effects.first().ok_or(Error::EmptyPom)?;
        let dim = linalg::ensure_square(first)?;
        if labels.len() != effects.len() {
            return Err(Error::SizeMismatch(format!(
                "{} labels for {} effects",
                labels.len(),
                effects.len()
            )));
        }
        let t = tol().validation;
        let mut total = linalg::zeros(dim);
        for e in &effects {
            let d = linalg::ensure_square(e)?;
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d,
                });
            }
            let deviation = linalg::hermitian_deviation(e);
            if deviation > t {
                return Err(Error::NonHermitian { deviation });
            }
            let min_eigenvalue = linalg::hermitian_eigenvalues(e)[0];
            if min_eigenvalue < -t {
                return Err(Error::NotPsd { min_eigenvalue });
            }
            total += e;
        }
        let deviation = linalg::max_abs_diff(&total, &linalg::identity(dim));
        if deviation > t {
            return Err(Error::IncompletePom { deviation });
        }
        Ok(Pom {
            dim,
            effects,
            labels,
        })
    }

    pub(crate) fn from_parts_unchecked(
        dim: usize,
        effects: Vec<CMatrix>,
        labels: Vec<OutcomeLabel>,
    ) -> Self {
        Pom {
            dim,
            effects,
            labels,
        }
    }

    /// Computational-basis (von Neumann) measurement.
    pub fn basis(dim: usize) -> Self {
        let effects = (0..dim)
            .map(|k| DensityOperator::basis(dim, k).into_matrix())
            .collect();
        let labels = (1..=dim as u32).map(|k| vec![k]).collect();
        Pom {
            dim,
            effects,
            labels,
        }
    }

    /// The one-outcome measurement `{1}`.
    pub fn trivial(dim: usize) -> Self {
        Pom {
            dim,
            effects: vec![linalg::identity(dim)],
            labels: vec![vec![1]],
        }
    }

    /// `n`-fold tensor power of the computational-basis POM on `dim` levels.
    /// Outcome labels are the measured words (letters 1-based).
    pub fn product_basis(dim: usize, n: usize) -> Result<Self> {
        let mut pom = Pom::trivial(1);
        pom.labels = vec![vec![]];
        let single = Pom::basis(dim);
        for _ in 0..n {
            pom = pom_tensor(&pom, &single)?;
        }
        Ok(pom)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn effect(&self, index: usize) -> &CMatrix {
        &self.effects[index]
    }

    pub fn labels(&self) -> &[OutcomeLabel] {
        &self.labels
    }
}

/// All pairwise Kronecker products `E_i ⊗ F_j`, ordered with `j` fastest.
pub fn pom_tensor(e: &Pom, f: &Pom) -> Result<Pom> {
    let dim = e.dim * f.dim;
    check_dim_cap(dim)?;
    let mut effects = Vec::with_capacity(e.len() * f.len());
    let mut labels = Vec::with_capacity(e.len() * f.len());
    for (ei, li) in e.effects.iter().zip(&e.labels) {
        for (fj, lj) in f.effects.iter().zip(&f.labels) {
            effects.push(linalg::kron(ei, fj));
            labels.push(li.iter().chain(lj).copied().collect());
        }
    }
    Ok(Pom {
        dim,
        effects,
        labels,
    })
}

/// Probability distribution on `{0, …, len-1}` with float masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteDistribution {
    masses: Vec<f64>,
}

impl FiniteDistribution {
    /// Nonnegative masses summing to one within the normalisation tolerance.
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        Self::checked(masses, tol().normalization)
    }

    fn checked(masses: Vec<f64>, slack: f64) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some((i, m)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_finite() || **m < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "mass {m} at index {i}"
            )));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > slack {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}"
            )));
        }
        Ok(FiniteDistribution { masses })
    }

    pub fn uniform(len: usize) -> Self {
        FiniteDistribution {
            masses: vec![1.0 / len as f64; len],
        }
    }

    pub fn point(len: usize, index: usize) -> Self {
        let mut masses = vec![0.0; len];
        masses[index] = 1.0;
        FiniteDistribution { masses }
    }

    pub(crate) fn from_masses_unchecked(masses: Vec<f64>) -> Self {
        FiniteDistribution { masses }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, index: usize) -> f64 {
        self.masses[index]
    }
}

/// Born-rule probabilities `m ↦ tr(σ̂ E_m)` before any clamping.
pub fn born_probabilities(sigma: &DensityOperator, pom: &Pom) -> Result<Vec<f64>> {
    if sigma.dim() != pom.dim() {
        return Err(Error::DimensionMismatch {
            expected: pom.dim(),
            found: sigma.dim(),
        });
    }
    Ok(pom.effects.iter().map(|e| sigma.expectation(e)).collect())
}

/// Outcome distribution of measuring `σ` with `E`.
///
/// Masses within the validation tolerance below zero are clamped to 0; anything
/// further out, or a total off by more than the tolerance, is an invariant
/// violation.
pub fn measure(sigma: &DensityOperator, pom: &Pom) -> Result<FiniteDistribution> {
    let raw = born_probabilities(sigma, pom)?;
    let t = tol().validation;
    let mut masses = Vec::with_capacity(raw.len());
    for (m, p) in raw.into_iter().enumerate() {
        if p < -t || p > 1.0 + t {
            return Err(Error::InvariantViolation(format!(
                "Born probability {p} for outcome {m} outside [0, 1]"
            )));
        }
        masses.push(p.max(0.0));
    }
    FiniteDistribution::checked(masses, t)
        .map_err(|e| Error::InvariantViolation(format!("measurement not normalised: {e}")))
}

/// `D_i = Σ_{m ∈ A_i} E_m` for every index set (0-based outcome indices).
pub fn coarsen(pom: &Pom, subsets: &[Vec<usize>]) -> Result<Vec<Effect>> {
    subsets
        .iter()
        .map(|subset| {
            let sum = coarsen_matrix(pom, subset)?;
            Effect::new(sum)
        })
        .collect()
}

/// The summed matrix for one index set, without effect validation.
pub fn coarsen_matrix(pom: &Pom, subset: &[usize]) -> Result<CMatrix> {
    let mut sum = linalg::zeros(pom.dim());
    for &m in subset {
        let e = pom.effects.get(m).ok_or(Error::IndexOutOfRange {
            index: m,
            len: pom.len(),
        })?;
        sum += e;
    }
    Ok(sum)
}

/// Von Neumann entropy in bits, with eigenvalues clamped to `[0, 1]`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    shannon_entropy_bits(rho.eigenvalues().into_iter())
}

/// `-Σ p log₂ p` with `0 log 0 = 0`, each value clamped to `[0, 1]` first.
pub fn shannon_entropy_bits(values: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = values
        .map(|x| x.clamp(0.0, 1.0))
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum();
    h.max(0.0)
}

/// Binary entropy `h₂(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy_bits([p, 1.0 - p].into_iter())
}

/// ℓ₁ distance `Σ |Q(x) − R(x)|`.
pub fn variational_distance(q: &FiniteDistribution, r: &FiniteDistribution) -> Result<f64> {
    if q.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: r.len(),
        });
    }
    Ok(l1_distance(q.masses(), r.masses()))
}

pub(crate) fn l1_distance(q: &[f64], r: &[f64]) -> f64 {
    q.iter().zip(r).map(|(a, b)| (a - b).abs()).sum()
}

/// The same distance in the form `2 · sup_C [Q(C) − R(C)]`; the supremum is
/// attained at `C = {x : Q(x) > R(x)}`.
pub fn variational_distance_sup_form(
    q: &FiniteDistribution,
    r: &FiniteDistribution,
) -> Result<f64> {
    if q.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: r.len(),
        });
    }
    Ok(2.0
        * q.masses()
            .iter()
            .zip(r.masses())
            .map(|(a, b)| (a - b).max(0.0))
            .sum::<f64>())
}
