//! `(n, M, ε)` transmission codes over a cq-channel.
//!
//! A code pairs `M` codewords with a decoding POM whose first `M` effects
//! belong to the codewords. Builders always append one more "fail" effect that
//! absorbs the completeness remainder.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{induced_channel, word_state, CqChannel, Word, WordDistribution};
use crate::error::{Error, Result};
use crate::family::binomial;
use crate::linalg::{self, CMatrix};
use crate::quantum::{coarsen_matrix, DensityOperator, OutcomeLabel, Pom};
use crate::rng::StreamRng;
use crate::settings::{tol, Settings};

/// Label of the appended fail outcome.
pub const FAIL_LABEL: u32 = 0;

/// Eigenvalues at or below this are treated as outside the support when
/// inverting the summed signal operator.
const SUPPORT_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QCode {
    pub n: usize,
    pub codewords: Vec<Word>,
    /// Effects `0..M` decode the codewords; an optional effect `M` is "fail".
    pub decoder: Pom,
}

impl QCode {
    pub fn new(n: usize, codewords: Vec<Word>, decoder: Pom) -> Result<Self> {
        let m = codewords.len();
        if m == 0 {
            return Err(Error::InvalidParameter("a code needs at least one codeword".into()));
        }
        if decoder.len() != m && decoder.len() != m + 1 {
            return Err(Error::SizeMismatch(format!(
                "{m} codewords but {} decoding effects",
                decoder.len()
            )));
        }
        if let Some(w) = codewords.iter().find(|w| w.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "codeword {w} does not have length {n}"
            )));
        }
        Ok(QCode {
            n,
            codewords,
            decoder,
        })
    }

    pub fn size(&self) -> usize {
        self.codewords.len()
    }

    pub fn has_fail_outcome(&self) -> bool {
        self.decoder.len() == self.codewords.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeVerification {
    /// `Wⁿ_{c_m}(E_m)` per codeword.
    pub successes: Vec<f64>,
    /// `1 − min_m successes[m]`.
    pub epsilon_hat: f64,
}

/// Exact Born-rule success probabilities of every codeword.
pub fn verify_qcode(ch: &CqChannel, code: &QCode) -> Result<CodeVerification> {
    let dim = ch.output_dim(code.n)?;
    if code.decoder.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: code.decoder.dim(),
        });
    }
    let t = tol().validation;
    let successes = code
        .codewords
        .par_iter()
        .enumerate()
        .map(|(m, w)| {
            let state = word_state(ch, w)?.state;
            let p = state.expectation(code.decoder.effect(m));
            if !(-t..=1.0 + t).contains(&p) {
                return Err(Error::InvariantViolation(format!(
                    "success probability {p} of codeword {w} outside [0, 1]"
                )));
            }
            Ok(p.clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = successes.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CodeVerification {
        successes,
        epsilon_hat: 1.0 - worst,
    })
}

fn decoder_labels(m: usize) -> Vec<OutcomeLabel> {
    (1..=m as u32)
        .map(|k| vec![k])
        .chain(std::iter::once(vec![FAIL_LABEL]))
        .collect()
}

/// Square-root measurement `E_m = S^{-1/2} W_m S^{-1/2}` with `S = Σ_m W_m`,
/// the inverse taken on the support of `S`, plus the projector onto the
/// kernel of `S` as fail effect.
pub fn square_root_measurement(states: &[&DensityOperator]) -> Result<Pom> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameter("no states to discriminate".into()))?;
    let dim = first.dim();
    let mut sum = linalg::zeros(dim);
    for s in states {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        sum += s.matrix();
    }
    let root = linalg::pseudo_inverse_sqrt(&sum, SUPPORT_CUTOFF);
    let mut effects: Vec<CMatrix> = states
        .iter()
        .map(|s| linalg::hermitize(&(&root * s.matrix() * &root)))
        .collect();
    let mut fail = linalg::identity(dim);
    for e in &effects {
        fail -= e;
    }
    effects.push(linalg::hermitize(&fail));
    Pom::with_labels(effects, decoder_labels(states.len()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSearch {
    Found {
        code: QCode,
        verification: CodeVerification,
        examined: u64,
    },
    NotFound {
        /// Smallest `ε̂` over all examined tuples; `None` if nothing was examined.
        best_epsilon: Option<f64>,
        examined: u64,
    },
}

/// Advance a strictly increasing index tuple over `0..n`.
fn next_tuple(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - (k - i) {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

const SEARCH_BATCH: usize = 256;

/// Exhaustive search over codeword `M`-tuples (strictly increasing in
/// lexicographic word order), each decoded with the square-root measurement of
/// its word states. Returns the first tuple whose `ε̂` is at most the target
/// (up to the validation tolerance).
pub fn build_code_exhaustive(
    ch: &CqChannel,
    n: usize,
    m: usize,
    epsilon_target: f64,
) -> Result<CodeSearch> {
    let settings = Settings::global();
    if m == 0 {
        return Err(Error::InvalidParameter("code size must be at least 1".into()));
    }
    ch.output_dim(n)?;
    let a = ch.alphabet_size();
    let word_count = (a as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if word_count > settings.max_support as u128 {
        return Err(Error::ResourceLimit {
            what: "input words for exhaustive code search",
            requested: word_count,
            limit: settings.max_support as u128,
        });
    }
    let word_count = word_count as usize;
    if m > word_count {
        return Ok(CodeSearch::NotFound {
            best_epsilon: None,
            examined: 0,
        });
    }
    let tuples = u128::try_from(binomial(word_count as u64, m as u64)).unwrap_or(u128::MAX);
    if tuples > settings.exhaustive_search_cap as u128 {
        return Err(Error::ResourceLimit {
            what: "codeword tuples for exhaustive code search",
            requested: tuples,
            limit: settings.exhaustive_search_cap as u128,
        });
    }

    let words: Vec<Word> = Word::all(a, n).collect();
    let states: Vec<DensityOperator> = words
        .par_iter()
        .map(|w| word_state(ch, w).map(|ws| ws.state))
        .collect::<Result<_>>()?;
    let slack = tol().validation;

    let evaluate = |tuple: &[usize]| -> Result<(QCode, CodeVerification)> {
        let picked: Vec<&DensityOperator> = tuple.iter().map(|&i| &states[i]).collect();
        let decoder = square_root_measurement(&picked)?;
        let code = QCode::new(n, tuple.iter().map(|&i| words[i].clone()).collect(), decoder)?;
        let v = verify_qcode(ch, &code)?;
        Ok((code, v))
    };

    let mut cur: Vec<usize> = (0..m).collect();
    let mut more = true;
    let mut examined = 0u64;
    let mut best: Option<f64> = None;
    while more {
        let mut batch = Vec::with_capacity(SEARCH_BATCH);
        while more && batch.len() < SEARCH_BATCH {
            batch.push(cur.clone());
            more = next_tuple(&mut cur, word_count);
        }
        let results = batch
            .par_iter()
            .map(|t| evaluate(t))
            .collect::<Result<Vec<_>>>()?;
        for (code, verification) in results {
            examined += 1;
            let e = verification.epsilon_hat;
            if best.is_none_or(|b| e < b) {
                best = Some(e);
            }
            if e <= epsilon_target + slack {
                return Ok(CodeSearch::Found {
                    code,
                    verification,
                    examined,
                });
            }
        }
    }
    Ok(CodeSearch::NotFound {
        best_epsilon: best,
        examined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomCodingParams {
    pub rate: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomCodingAttempt {
    /// Indices into the input distribution's support, in selection order.
    pub codeword_indices: Vec<usize>,
    /// `Wⁿ_{c_i}(Σ_{y∈D_i} E_y)` from the induced classical channel.
    pub bookkeeping_successes: Vec<f64>,
    pub epsilon_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomCodingOutcome {
    /// `⌊2^{nR}⌋`.
    pub size: usize,
    /// `R + γ`.
    pub threshold: f64,
    /// Support indices of the good set `G`.
    pub good_set: Vec<usize>,
    pub good_set_mass: f64,
    pub attempts: Vec<RandomCodingAttempt>,
    /// Best attempt by `ε̂`, earliest on ties; `None` when `|G| < M`.
    pub best: Option<(usize, QCode, CodeVerification)>,
}

/// `⌊x⌋` for values meant to be integers up to rounding, e.g. `2^{4·0.75}`.
fn robust_floor(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

/// Random-coding construction driven by information densities.
///
/// With `V(y|x) = Wⁿ_x(E_y)` and `PV` the output law, the decoding set of `x`
/// is `D(x) = { y : PV(y) > 0, V(y|x) > 0, (1/n) log₂(V(y|x)/PV(y)) > R + γ }`
/// and the good set is `G = { x : P(x) > 0, Σ_{y∈D(x)} V(y|x) ≥ α/2 }`.
/// Each attempt draws `M` distinct codewords successively from `P` restricted
/// to the not-yet-chosen part of `G`, disjointifies the decoding sets in draw
/// order and decodes with their coarse-grained sums plus a fail effect.
pub fn build_code_random_coding(
    ch: &CqChannel,
    n: usize,
    pom: &Pom,
    p: &WordDistribution,
    params: &RandomCodingParams,
) -> Result<RandomCodingOutcome> {
    let settings = Settings::global();
    if p.word_length() != n {
        return Err(Error::InvalidParameter(format!(
            "input words have length {} but block length is {n}",
            p.word_length()
        )));
    }
    if !(params.alpha > 0.0 && params.alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("α = {} outside (0, 1]", params.alpha)));
    }
    let raw_size = robust_floor((n as f64 * params.rate).exp2());
    if !(raw_size >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "code size ⌊2^(nR)⌋ = {raw_size} is below 1"
        )));
    }
    if raw_size > settings.max_support as f64 {
        return Err(Error::ResourceLimit {
            what: "codewords for random coding",
            requested: raw_size as u128,
            limit: settings.max_support as u128,
        });
    }
    let size = raw_size as usize;
    let threshold = params.rate + params.gamma;

    let words = p.words();
    let masses: Vec<f64> = (0..p.len()).map(|i| p.mass(i)).collect();
    let ic = induced_channel(ch, n, pom, &words)?;
    let output = ic.output_masses(&masses);

    let decoding_sets: Vec<Vec<usize>> = ic
        .rows
        .iter()
        .map(|row| {
            (0..ic.outcome_count)
                .filter(|&y| {
                    output[y] > 0.0
                        && row[y] > 0.0
                        && (row[y] / output[y]).log2() / n as f64 > threshold
                })
                .collect()
        })
        .collect();
    let set_mass = |x: usize, set: &[usize]| -> f64 { set.iter().map(|&y| ic.rows[x][y]).sum() };

    let good_set: Vec<usize> = (0..words.len())
        .filter(|&x| masses[x] > 0.0 && set_mass(x, &decoding_sets[x]) >= params.alpha / 2.0)
        .collect();
    if good_set.is_empty() {
        return Err(Error::EmptyGoodSet);
    }
    let good_set_mass: f64 = good_set.iter().map(|&x| masses[x]).sum();
    let mut outcome = RandomCodingOutcome {
        size,
        threshold,
        good_set: good_set.clone(),
        good_set_mass,
        attempts: Vec::new(),
        best: None,
    };
    if good_set.len() < size {
        return Ok(outcome);
    }

    let t = tol().validation;
    for attempt in 0..settings.random_coding_retries.max(1) {
        let mut rng = StreamRng::new(params.seed, attempt as u64);
        let mut pool = good_set.clone();
        let mut chosen = Vec::with_capacity(size);
        for _ in 0..size {
            let mut cumulative = Vec::with_capacity(pool.len());
            let mut acc = 0.0;
            for &x in &pool {
                acc += masses[x];
                cumulative.push(acc);
            }
            let k = rng.pick_cumulative(&cumulative);
            chosen.push(pool.remove(k));
        }

        let mut taken = vec![false; ic.outcome_count];
        let mut assigned: Vec<Vec<usize>> = Vec::with_capacity(size);
        for &x in &chosen {
            let own: Vec<usize> = decoding_sets[x].iter().copied().filter(|&y| !taken[y]).collect();
            for &y in &own {
                taken[y] = true;
            }
            assigned.push(own);
        }
        let leftover: Vec<usize> = (0..ic.outcome_count).filter(|&y| !taken[y]).collect();

        let bookkeeping: Vec<f64> = chosen
            .iter()
            .zip(&assigned)
            .map(|(&x, set)| set_mass(x, set))
            .collect();
        for (i, &x) in chosen.iter().enumerate() {
            let lower = set_mass(x, &decoding_sets[x])
                - chosen[..i]
                    .iter()
                    .map(|&j| set_mass(x, &decoding_sets[j]))
                    .sum::<f64>();
            if bookkeeping[i] < lower - t {
                return Err(Error::InvariantViolation(format!(
                    "disjointified success {} of codeword {i} below chain bound {lower}",
                    bookkeeping[i]
                )));
            }
        }

        let mut effects = Vec::with_capacity(size + 1);
        for set in &assigned {
            effects.push(coarsen_matrix(pom, set)?);
        }
        effects.push(coarsen_matrix(pom, &leftover)?);
        let decoder = Pom::from_parts_unchecked(pom.dim(), effects, decoder_labels(size));
        let code = QCode::new(n, chosen.iter().map(|&x| words[x].clone()).collect(), decoder)?;
        let verification = verify_qcode(ch, &code)?;
        let book_eps = 1.0 - bookkeeping.iter().copied().fold(f64::INFINITY, f64::min);
        if (book_eps - verification.epsilon_hat).abs() > t {
            return Err(Error::InvariantViolation(format!(
                "verified ε̂ {} differs from bookkeeping {book_eps}",
                verification.epsilon_hat
            )));
        }
        outcome.attempts.push(RandomCodingAttempt {
            codeword_indices: chosen,
            bookkeeping_successes: bookkeeping,
            epsilon_hat: verification.epsilon_hat,
        });
        let better = outcome
            .best
            .as_ref()
            .is_none_or(|(_, _, v)| verification.epsilon_hat < v.epsilon_hat);
        if better {
            outcome.best = Some((attempt as usize, code, verification));
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;

    fn bit_words(n: usize) -> Vec<Word> {
        Word::all(2, n).collect()
    }

    #[test]
    fn basis_code_is_perfect() {
        let ch = CqChannel::noiseless(2);
        let code = QCode::new(3, bit_words(3), Pom::product_basis(2, 3).unwrap()).unwrap();
        let v = verify_qcode(&ch, &code).unwrap();
        assert_eq!(v.epsilon_hat, 0.0);
        assert!(v.successes.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn single_codeword_identity_decoder() {
        let ch = CqChannel::pure_pair(0.3).unwrap();
        let code = QCode::new(1, vec![Word::new([2])], Pom::new(vec![identity(2)]).unwrap()).unwrap();
        let v = verify_qcode(&ch, &code).unwrap();
        assert!(v.epsilon_hat.abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let ch = CqChannel::noiseless(2);
        let code = QCode::new(2, vec![Word::new([1, 1])], Pom::trivial(2)).unwrap();
        assert!(matches!(
            verify_qcode(&ch, &code),
            Err(Error::DimensionMismatch { expected: 4, found: 2 })
        ));
    }

    #[test]
    fn srm_on_two_pure_states_matches_closed_form() {
        // For two equiprobable pure states with overlap s the square-root
        // measurement succeeds with probability (1 + √(1 − s²)) / 2.
        let s: f64 = 0.6;
        let ch = CqChannel::pure_pair(s).unwrap();
        let sig: Vec<&DensityOperator> = ch.signals().iter().collect();
        let decoder = square_root_measurement(&sig).unwrap();
        let code = QCode::new(1, vec![Word::new([1]), Word::new([2])], decoder).unwrap();
        let v = verify_qcode(&ch, &code).unwrap();
        let expected = 0.5 * (1.0 + (1.0 - s * s).sqrt());
        for p in &v.successes {
            assert!((p - expected).abs() < 1e-10, "{p} vs {expected}");
        }
    }

    #[test]
    fn exhaustive_basis_code() {
        let ch = CqChannel::noiseless(2);
        match build_code_exhaustive(&ch, 2, 4, 0.0).unwrap() {
            CodeSearch::Found { code, verification, .. } => {
                assert_eq!(code.codewords, bit_words(2));
                assert_eq!(verification.epsilon_hat, 0.0);
            }
            other => panic!("expected a code, got {other:?}"),
        }
    }

    #[test]
    fn exhaustive_pigeonhole() {
        let ch = CqChannel::noiseless(2);
        assert_eq!(
            build_code_exhaustive(&ch, 2, 5, 0.5).unwrap(),
            CodeSearch::NotFound {
                best_epsilon: None,
                examined: 0
            }
        );
    }

    #[test]
    fn exhaustive_overlapping_pair() {
        let ch = CqChannel::pure_pair(0.5).unwrap();
        match build_code_exhaustive(&ch, 2, 2, 0.2).unwrap() {
            CodeSearch::Found { code, verification, .. } => {
                let again = verify_qcode(&ch, &code).unwrap();
                assert_eq!(again, verification);
                assert!(verification.epsilon_hat <= 0.2);
            }
            other => panic!("expected a code, got {other:?}"),
        }
    }

    fn noiseless_params() -> RandomCodingParams {
        RandomCodingParams {
            rate: 0.8,
            gamma: 0.1,
            alpha: 0.5,
            seed: 7,
        }
    }

    #[test]
    fn random_coding_noiseless_is_exact() {
        let ch = CqChannel::noiseless(2);
        let pom = Pom::product_basis(2, 4).unwrap();
        let p = WordDistribution::uniform_all(2, 4).unwrap();
        let out = build_code_random_coding(&ch, 4, &pom, &p, &noiseless_params()).unwrap();
        assert_eq!(out.size, 9);
        assert_eq!(out.good_set.len(), 16);
        let (_, code, v) = out.best.unwrap();
        assert_eq!(code.size(), 9);
        assert_eq!(v.epsilon_hat, 0.0);
        assert!(out.attempts.iter().all(|a| a.epsilon_hat == 0.0));
    }

    #[test]
    fn random_coding_is_deterministic() {
        let ch = CqChannel::pure_pair(0.4).unwrap();
        let pom = Pom::product_basis(2, 3).unwrap();
        let p = WordDistribution::uniform_all(2, 3).unwrap();
        let params = RandomCodingParams {
            rate: 0.3,
            gamma: 0.05,
            alpha: 0.3,
            seed: 11,
        };
        let a = build_code_random_coding(&ch, 3, &pom, &p, &params).unwrap();
        let b = build_code_random_coding(&ch, 3, &pom, &p, &params).unwrap();
        assert_eq!(a.attempts, b.attempts);
        assert_eq!(a.best, b.best);
    }

    #[test]
    fn random_coding_threshold_too_high() {
        let ch = CqChannel::noiseless(2);
        let pom = Pom::product_basis(2, 3).unwrap();
        let p = WordDistribution::uniform_all(2, 3).unwrap();
        let params = RandomCodingParams {
            rate: 0.95,
            gamma: 0.1,
            ..noiseless_params()
        };
        assert!(matches!(
            build_code_random_coding(&ch, 3, &pom, &p, &params),
            Err(Error::EmptyGoodSet)
        ));
    }

    #[test]
    fn disjoint_decoding_sets() {
        let ch = CqChannel::pure_pair(0.2).unwrap();
        let pom = Pom::product_basis(2, 2).unwrap();
        let p = WordDistribution::uniform_all(2, 2).unwrap();
        let params = RandomCodingParams {
            rate: 0.5,
            gamma: 0.1,
            alpha: 0.4,
            seed: 3,
        };
        let out = build_code_random_coding(&ch, 2, &pom, &p, &params).unwrap();
        let (_, code, _) = out.best.unwrap();
        // Coarse-grained effects of a basis POM are diagonal 0/1 matrices whose
        // supports must not overlap.
        let mut hits = vec![0; 4];
        for e in code.decoder.effects() {
            for (k, h) in hits.iter_mut().enumerate() {
                if e[(k, k)].re > 0.5 {
                    *h += 1;
                }
            }
        }
        assert!(hits.iter().all(|&h| h == 1));
    }
}
