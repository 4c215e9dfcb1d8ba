//! Identification codes.
//!
//! Message `i` is an input distribution `P_i` over `Aⁿ` together with an effect
//! `D_i`. In a simultaneous code every `D_i` is a coarse-graining of one common
//! POM, so a single measurement answers "is it message `i`?" for every `i`.

use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{induced_channel, word_state, CqChannel, Word, WordDistribution};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::linalg::CMatrix;
use crate::quantum::{coarsen_matrix, DensityOperator, Effect, Pom};
use crate::rng::StreamRng;
use crate::settings::tol;
use crate::transmission::QCode;

#[derive(Debug, Clone, PartialEq)]
pub struct SimQidCode {
    pub n: usize,
    pub base_pom: Pom,
    /// 0-based outcome indices of `base_pom`; `D_i = Σ_{m ∈ subsets[i]} E_m`.
    pub subsets: Vec<Vec<usize>>,
    pub inputs: Vec<WordDistribution>,
}

impl SimQidCode {
    pub fn new(
        n: usize,
        base_pom: Pom,
        subsets: Vec<Vec<usize>>,
        inputs: Vec<WordDistribution>,
    ) -> Result<Self> {
        if subsets.len() != inputs.len() {
            return Err(Error::SizeMismatch(format!(
                "{} outcome sets for {} input distributions",
                subsets.len(),
                inputs.len()
            )));
        }
        for s in &subsets {
            if let Some(&m) = s.iter().find(|&&m| m >= base_pom.len()) {
                return Err(Error::IndexOutOfRange {
                    index: m,
                    len: base_pom.len(),
                });
            }
            // Repeated outcomes would count an effect twice and break D_i ≤ 1.
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "outcome set {s:?} is not strictly increasing"
                )));
            }
        }
        check_inputs(n, &inputs)?;
        Ok(SimQidCode {
            n,
            base_pom,
            subsets,
            inputs,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// `D_i` as a matrix.
    pub fn effect(&self, i: usize) -> Result<CMatrix> {
        coarsen_matrix(&self.base_pom, &self.subsets[i])
    }
}

fn check_inputs(n: usize, inputs: &[WordDistribution]) -> Result<()> {
    if let Some(p) = inputs.iter().find(|p| p.word_length() != n) {
        return Err(Error::InvalidParameter(format!(
            "input distribution over words of length {} in a length-{n} code",
            p.word_length()
        )));
    }
    Ok(())
}

/// An identification code with arbitrary decision effects.
#[derive(Debug, Clone, PartialEq)]
pub struct QidCodeGeneral {
    pub n: usize,
    pub inputs: Vec<WordDistribution>,
    pub effects: Vec<Effect>,
}

impl QidCodeGeneral {
    pub fn new(n: usize, inputs: Vec<WordDistribution>, effects: Vec<Effect>) -> Result<Self> {
        if inputs.len() != effects.len() {
            return Err(Error::SizeMismatch(format!(
                "{} effects for {} input distributions",
                effects.len(),
                inputs.len()
            )));
        }
        check_inputs(n, &inputs)?;
        if let Some(e) = effects.iter().find(|e| e.dim() != effects[0].dim()) {
            return Err(Error::DimensionMismatch {
                expected: effects[0].dim(),
                found: e.dim(),
            });
        }
        Ok(QidCodeGeneral { n, inputs, effects })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

impl From<&SimQidCode> for QidCodeGeneral {
    fn from(code: &SimQidCode) -> Self {
        let effects = (0..code.len())
            .map(|i| {
                let m = code.effect(i).expect("outcome indices checked at construction");
                Effect::from_matrix_unchecked(m)
            })
            .collect();
        QidCodeGeneral {
            n: code.n,
            inputs: code.inputs.clone(),
            effects,
        }
    }
}

/// The construction from a transmission code and a set family: message `i`
/// sends a uniformly chosen codeword `c_m`, `m ∈ A_i`, and accepts on the sum of
/// the decoding effects of those codewords.
pub fn build_simultaneous_id_code(code: &QCode, family: &SetFamily) -> Result<SimQidCode> {
    let m = code.size();
    let params = &family.params;
    if params.ground_size != m {
        return Err(Error::SizeMismatch(format!(
            "family over {} elements but the code has {m} codewords",
            params.ground_size
        )));
    }
    let mut subsets = Vec::with_capacity(family.len());
    let mut inputs = Vec::with_capacity(family.len());
    for set in &family.sets {
        if set.len() != params.set_size {
            return Err(Error::SizeMismatch(format!(
                "family member {set:?} does not have {} elements",
                params.set_size
            )));
        }
        let idx: Vec<usize> = set.iter().map(|&e| e as usize - 1).collect();
        if let Some(&bad) = idx.iter().find(|&&i| i >= m) {
            return Err(Error::IndexOutOfRange { index: bad, len: m });
        }
        inputs.push(WordDistribution::uniform(
            idx.iter().map(|&i| code.codewords[i].clone()).collect(),
        )?);
        subsets.push(idx);
    }
    SimQidCode::new(code.n, code.decoder.clone(), subsets, inputs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Keep the full `N × N` matrix of `P_i Wⁿ(D_j)`.
    pub keep_matrix: bool,
    /// Estimate `λ̂₂` from this many random ordered pairs instead of all pairs.
    pub sampled_pairs: Option<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdVerification {
    /// `1 − min_i P_i Wⁿ(D_i)`.
    pub lambda1_hat: f64,
    /// `max_{i≠j} P_i Wⁿ(D_j)`; 0 when there is a single message.
    pub lambda2_hat: f64,
    /// `P_i Wⁿ(D_i)` per message.
    pub first_kind: Vec<f64>,
    /// `matrix[i][j] = P_i Wⁿ(D_j)` when requested and exact.
    pub matrix: Option<Vec<Vec<f64>>>,
    /// `λ̂₂` is an estimate over a random subset of pairs.
    pub sampled: bool,
    pub pairs_evaluated: u64,
    /// `(i, j)` attaining `λ̂₂`, first in row-major order.
    pub worst_pair: Option<(usize, usize)>,
}

/// Acceptance probabilities `P_i Wⁿ(D_j)`; simultaneous and general codes share
/// the reduction over them.
trait Acceptance: Sync {
    fn count(&self) -> usize;
    fn accept(&self, i: usize, j: usize) -> f64;
}

/// Simultaneous codes: per message, the unnormalised outcome law
/// `Σ_x weight_i(x) Wⁿ_x(E_m)`; acceptance sums it over `A_j` and divides once.
struct SimAcceptance<'a> {
    code: &'a SimQidCode,
    raw: Vec<Vec<f64>>,
}

impl Acceptance for SimAcceptance<'_> {
    fn count(&self) -> usize {
        self.code.len()
    }

    fn accept(&self, i: usize, j: usize) -> f64 {
        let s: f64 = self.code.subsets[j].iter().map(|&m| self.raw[i][m]).sum();
        s / self.code.inputs[i].divisor()
    }
}

/// General codes: `tr(Wⁿ_x D_j)` for every distinct support word `x`.
struct GeneralAcceptance<'a> {
    code: &'a QidCodeGeneral,
    word_index: Vec<Vec<usize>>,
    table: Vec<Vec<f64>>,
}

impl Acceptance for GeneralAcceptance<'_> {
    fn count(&self) -> usize {
        self.code.len()
    }

    fn accept(&self, i: usize, j: usize) -> f64 {
        let p = &self.code.inputs[i];
        let s: f64 = self.word_index[i]
            .iter()
            .enumerate()
            .map(|(k, &x)| p.weight(k) * self.table[x][j])
            .sum();
        s / p.divisor()
    }
}

/// Distinct words across all inputs, and per input the index of each support word.
fn distinct_words(inputs: &[WordDistribution]) -> (Vec<Word>, Vec<Vec<usize>>) {
    let mut index: HashMap<&Word, usize> = HashMap::new();
    let mut words = Vec::new();
    let per_input = inputs
        .iter()
        .map(|p| {
            (0..p.len())
                .map(|k| {
                    let w = p.word(k);
                    *index.entry(w).or_insert_with(|| {
                        words.push(w.clone());
                        words.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    (words, per_input)
}

fn checked_probability(p: f64, i: usize, j: usize) -> Result<f64> {
    let t = tol().validation;
    if !(-t..=1.0 + t).contains(&p) {
        return Err(Error::InvariantViolation(format!(
            "acceptance probability {p} for message {i} on test {j} outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

fn reduce(acc: &dyn Acceptance, opts: &VerifyOptions) -> Result<IdVerification> {
    let n = acc.count();
    let first_kind = (0..n)
        .into_par_iter()
        .map(|i| checked_probability(acc.accept(i, i), i, i))
        .collect::<Result<Vec<f64>>>()?;
    let lambda1_hat = 1.0 - first_kind.iter().copied().fold(f64::INFINITY, f64::min);

    let mut worst: Option<(f64, usize, usize)> = None;
    let mut consider = |p: f64, i: usize, j: usize| {
        if worst.is_none_or(|(w, _, _)| p > w) {
            worst = Some((p, i, j));
        }
    };
    let mut matrix = None;
    let mut pairs = 0u64;
    let sampled = n >= 2 && opts.sampled_pairs.is_some();
    if n >= 2 {
        match opts.sampled_pairs {
            Some(k) => {
                let mut rng = StreamRng::new(opts.seed, 0);
                let picks: Vec<(usize, usize)> = (0..k)
                    .map(|_| {
                        let i = rng.below(n as u64) as usize;
                        let mut j = rng.below(n as u64 - 1) as usize;
                        if j >= i {
                            j += 1;
                        }
                        (i, j)
                    })
                    .collect();
                let values = picks
                    .par_iter()
                    .map(|&(i, j)| checked_probability(acc.accept(i, j), i, j))
                    .collect::<Result<Vec<f64>>>()?;
                for (&(i, j), &p) in picks.iter().zip(&values) {
                    consider(p, i, j);
                }
                pairs = k;
            }
            None => {
                let rows = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        (0..n)
                            .map(|j| checked_probability(acc.accept(i, j), i, j))
                            .collect::<Result<Vec<f64>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                for (i, row) in rows.iter().enumerate() {
                    for (j, &p) in row.iter().enumerate() {
                        if i != j {
                            consider(p, i, j);
                        }
                    }
                }
                pairs = (n * (n - 1)) as u64;
                if opts.keep_matrix {
                    matrix = Some(rows);
                }
            }
        }
    }
    Ok(IdVerification {
        lambda1_hat,
        lambda2_hat: worst.map_or(0.0, |w| w.0),
        first_kind,
        matrix,
        sampled,
        pairs_evaluated: pairs,
        worst_pair: worst.map(|w| (w.1, w.2)),
    })
}

/// Per input distribution, the unnormalised outcome law
/// `Σ_x weight(x) Wⁿ_x(E_m)` under `pom`; divide by the distribution's divisor
/// to normalise.
pub(crate) fn raw_output_sums(
    ch: &CqChannel,
    n: usize,
    pom: &Pom,
    inputs: &[WordDistribution],
) -> Result<Vec<Vec<f64>>> {
    let (words, per_input) = distinct_words(inputs);
    let ic = induced_channel(ch, n, pom, &words)?;
    Ok(inputs
        .par_iter()
        .zip(&per_input)
        .map(|(p, idx)| {
            let mut acc = vec![0.0; ic.outcome_count];
            for (k, &x) in idx.iter().enumerate() {
                let w = p.weight(k);
                for (a, v) in acc.iter_mut().zip(&ic.rows[x]) {
                    *a += w * v;
                }
            }
            acc
        })
        .collect())
}

/// Exact error probabilities of a simultaneous identification code.
pub fn verify_id_code(
    ch: &CqChannel,
    code: &SimQidCode,
    opts: &VerifyOptions,
) -> Result<IdVerification> {
    let raw = raw_output_sums(ch, code.n, &code.base_pom, &code.inputs)?;
    reduce(&SimAcceptance { code, raw }, opts)
}

/// Exact error probabilities of an identification code with arbitrary effects.
pub fn verify_general_id_code(
    ch: &CqChannel,
    code: &QidCodeGeneral,
    opts: &VerifyOptions,
) -> Result<IdVerification> {
    let dim = ch.output_dim(code.n)?;
    if let Some(e) = code.effects.iter().find(|e| e.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: e.dim(),
        });
    }
    let (words, word_index) = distinct_words(&code.inputs);
    let table = words
        .par_iter()
        .map(|w| {
            let state: DensityOperator = word_state(ch, w)?.state;
            Ok(code
                .effects
                .iter()
                .map(|e| state.expectation(e.matrix()))
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    reduce(
        &GeneralAcceptance {
            code,
            word_index,
            table,
        },
        opts,
    )
}

/// Guarantees of the construction for a transmission code of error `λ` and a
/// family with intersections below `λa`: `(λ₁, λ₂) = (λ, 2λ)`.
pub fn proposition_error_bounds(lambda: f64) -> (f64, f64) {
    (lambda, 2.0 * lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBound {
    /// `⌊ε · 2^{(C₀−δ)n}⌋ − n`.
    pub exponent: i128,
    /// `2^exponent` when it is at least 2 and small enough to write out.
    #[serde(with = "optional_decimal")]
    pub value: Option<BigUint>,
    /// The guarantee is at most 1 message.
    pub trivial: bool,
}

/// Largest exponent written out in full.
const SIZE_BOUND_MAX_BITS: i128 = 1 << 20;

/// `N ≥ 2^{⌊ε 2^{(C₀−δ)n}⌋ − n}` evaluated exactly.
pub fn size_bound_proposition(n: usize, c0: f64, delta: f64, epsilon: f64) -> SizeBound {
    let inner = epsilon * ((c0 - delta) * n as f64).exp2();
    let r = inner.round();
    let floor = if (inner - r).abs() < 1e-9 * r.abs().max(1.0) {
        r
    } else {
        inner.floor()
    };
    let floor = if floor.is_finite() && floor < 1e30 {
        floor as i128
    } else {
        i128::MAX / 2
    };
    let exponent = floor - n as i128;
    let trivial = exponent <= 0;
    let value = (!trivial && exponent <= SIZE_BOUND_MAX_BITS)
        .then(|| BigUint::from(1u32) << exponent as usize);
    SizeBound {
        exponent,
        value,
        trivial,
    }
}

mod optional_decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|b| b.to_str_radix(10)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| {
            BigUint::parse_bytes(t.as_bytes(), 10)
                .ok_or_else(|| serde::de::Error::custom(format!("not a decimal integer: {t:?}")))
        })
        .transpose()
    }
}
