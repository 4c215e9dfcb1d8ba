//! Approximating channel outputs by outputs of M-type inputs, and the
//! finite-`n` inequalities behind the identification converse.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{induced_channel, CqChannel, Word, WordDistribution};
use crate::error::{Error, Result};
use crate::idcode::{raw_output_sums, IdVerification, SimQidCode};
use crate::quantum::{l1_distance, measure, DensityOperator, FiniteDistribution, Pom};
use crate::rng::StreamRng;

/// Parse an exact rational mass: `p/q`, an integer, or a terminating decimal.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::NonRationalInput(format!("{text:?} is not an exact rational"));
    let int = |s: &str| -> Result<BigInt> {
        if s.is_empty() || !s.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    if let Some((p, q)) = t.split_once('/') {
        let q = int(q.trim())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(int(p.trim())?, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            int(whole)?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = frac.parse::<BigInt>().map_err(|_| bad())?;
        let magnitude = whole.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(numer, scale));
    }
    Ok(BigRational::from_integer(int(t)?))
}

/// Minimal `M` such that every mass is a multiple of `1/M`: the least common
/// multiple of the reduced denominators.
pub fn resolution(masses: &[BigRational]) -> Result<BigUint> {
    if masses.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    let mut total = BigRational::zero();
    let mut lcm = BigInt::one();
    for m in masses {
        if m.is_negative() {
            return Err(Error::InvalidDistribution(format!("negative mass {m}")));
        }
        total += m;
        lcm = lcm.lcm(m.denom());
    }
    if !total.is_one() {
        return Err(Error::InvalidDistribution(format!("masses sum to {total}, not 1")));
    }
    Ok(lcm.to_biguint().expect("denominators are positive"))
}

/// Distribution whose masses are multiples of `1/M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MTypeDistribution {
    pub m: u64,
    /// Support words with positive counts; counts sum to `m`.
    pub counts: Vec<(Word, u64)>,
}

impl MTypeDistribution {
    pub fn new(m: u64, counts: Vec<(Word, u64)>) -> Result<Self> {
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        if m == 0 || total != m {
            return Err(Error::InvalidDistribution(format!(
                "counts sum to {total}, expected M = {m}"
            )));
        }
        let counts = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        Ok(MTypeDistribution { m, counts })
    }

    /// Reduced resolution `M / gcd(M, counts)`; always divides `M`.
    pub fn resolution(&self) -> u64 {
        let g = self.counts.iter().fold(self.m, |g, (_, c)| g.gcd(c));
        self.m / g
    }

    pub fn to_distribution(&self) -> Result<WordDistribution> {
        WordDistribution::weighted(
            self.counts
                .iter()
                .map(|(w, c)| (w.clone(), *c as f64 / self.m as f64))
                .collect(),
        )
    }
}

/// `d₁(ρ(E), σ(E))`, the ℓ₁ distance of the two outcome laws.
pub fn d_e(rho: &DensityOperator, sigma: &DensityOperator, pom: &Pom) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let p = measure(rho, pom)?;
    let q = measure(sigma, pom)?;
    Ok(l1_distance(p.masses(), q.masses()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub word: Word,
    /// 0-based outcome index.
    pub outcome: usize,
    /// `(1/n) log₂(Wⁿ_x(E_y) / PWⁿ(E_y))`.
    pub density: f64,
    /// Joint mass `P(x) Wⁿ_x(E_y)`.
    pub mass: f64,
    /// `P(x)`.
    pub input_mass: f64,
}

/// Every `(x, y)` with positive joint mass, word-major in support order.
pub fn information_density_enumerate(
    ch: &CqChannel,
    p: &WordDistribution,
    pom: &Pom,
) -> Result<Vec<DensitySample>> {
    let n = p.word_length();
    if n == 0 {
        return Err(Error::InvalidParameter("words must have positive length".into()));
    }
    let words = p.words();
    let ic = induced_channel(ch, n, pom, &words)?;
    let masses: Vec<f64> = (0..p.len()).map(|i| p.mass(i)).collect();
    let output = ic.output_masses(&masses);
    let mut samples = Vec::new();
    for (x, row) in ic.rows.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            let joint = masses[x] * v;
            if joint > 0.0 && output[y] > 0.0 {
                samples.push(DensitySample {
                    word: words[x].clone(),
                    outcome: y,
                    density: (v / output[y]).log2() / n as f64,
                    mass: joint,
                    input_mass: masses[x],
                });
            }
        }
    }
    Ok(samples)
}

/// Per outcome `y`, `Σ_x P(x) 2^{n·density(x, y)}`; terms with zero joint mass
/// contribute nothing. Each sum is `1` up to rounding.
pub fn density_exponential_sums(samples: &[DensitySample], n: usize) -> BTreeMap<usize, f64> {
    let mut sums = BTreeMap::new();
    for s in samples {
        *sums.entry(s.outcome).or_insert(0.0) += s.input_mass * (n as f64 * s.density).exp2();
    }
    sums
}

/// Slack in tail-mass comparisons, so masses summing to `δ` up to rounding count
/// as `δ`.
const TAIL_SLACK: f64 = 1e-12;

/// Smallest sample value `β` whose upper tail `{density > β}` has joint mass
/// at most `δ`: the `(1 − δ)`-quantile of the density law.
pub fn sup_information_rate_estimate(samples: &[DensitySample], delta: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no density samples".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} outside (0, 1)")));
    }
    let mut sorted: Vec<(f64, f64)> = samples.iter().map(|s| (s.density, s.mass)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Walk down from the top, accumulating the mass strictly above each value.
    let mut tail = 0.0;
    let mut answer = sorted.last().expect("nonempty").0;
    let mut k = sorted.len();
    while k > 0 {
        let value = sorted[k - 1].0;
        if tail > delta + TAIL_SLACK {
            break;
        }
        answer = value;
        while k > 0 && sorted[k - 1].0 == value {
            tail += sorted[k - 1].1;
            k -= 1;
        }
    }
    Ok(answer)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvabilityReport {
    pub n: usize,
    pub m: u64,
    pub trials: usize,
    pub seed: u64,
    pub distances: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Standard error of the mean over trials; 0 for a single trial.
    pub std_error: f64,
    /// `log₂ M / n`.
    pub rate: f64,
    /// Reduced resolution of each trial's empirical distribution.
    pub resolutions: Vec<u64>,
}

/// Random selection: each trial draws `M` words i.i.d. from `P` (trial `t`
/// uses stream `t` of the seed), forms the empirical M-type distribution `P̃`
/// and measures `d₁(PWⁿ(E), P̃Wⁿ(E))`.
pub fn random_selection_resolve(
    ch: &CqChannel,
    p: &WordDistribution,
    pom: &Pom,
    m: u64,
    trials: usize,
    seed: u64,
) -> Result<ResolvabilityReport> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is needed".into()));
    }
    let n = p.word_length();
    let words = p.words();
    let ic = induced_channel(ch, n, pom, &words)?;
    let masses: Vec<f64> = (0..p.len()).map(|i| p.mass(i)).collect();
    let target = ic.output_masses(&masses);
    let mut cumulative = Vec::with_capacity(masses.len());
    let mut acc = 0.0;
    for &x in &masses {
        acc += x;
        cumulative.push(acc);
    }

    let results: Vec<(f64, u64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = StreamRng::new(seed, t as u64);
            let mut counts = vec![0u64; masses.len()];
            for _ in 0..m {
                counts[rng.pick_cumulative(&cumulative)] += 1;
            }
            let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / m as f64).collect();
            let empirical = ic.output_masses(&weights);
            let g = counts.iter().fold(m, |g, c| g.gcd(c));
            (l1_distance(&target, &empirical), m / g)
        })
        .collect();

    let distances: Vec<f64> = results.iter().map(|r| r.0).collect();
    let mean = distances.iter().sum::<f64>() / trials as f64;
    let std_error = if trials > 1 {
        let var = distances.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(ResolvabilityReport {
        n,
        m,
        trials,
        seed,
        min: distances.iter().copied().fold(f64::INFINITY, f64::min),
        max: distances.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std_error,
        rate: (m as f64).log2() / n as f64,
        resolutions: results.iter().map(|r| r.1).collect(),
        distances,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D1MuCheck {
    /// `d₁(Q, R)`.
    pub lhs: f64,
    /// `Q[log₂ Q/R > μ]`, with `log(q/0) = +∞`.
    pub tail_mass: f64,
    /// `(2/log₂e) μ + 2 · tail_mass`.
    pub rhs: f64,
    pub holds: bool,
}

/// Both sides of `d₁(Q, R) ≤ (2/log₂e)μ + 2Q[log₂ Q/R > μ]`.
pub fn d1_mu_bound_check(q: &FiniteDistribution, r: &FiniteDistribution, mu: f64) -> Result<D1MuCheck> {
    if q.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: r.len(),
        });
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!("μ = {mu} must be positive")));
    }
    let lhs = l1_distance(q.masses(), r.masses());
    let tail_mass: f64 = q
        .masses()
        .iter()
        .zip(r.masses())
        .filter(|(&qx, &rx)| qx > 0.0 && (rx == 0.0 || (qx / rx).log2() > mu))
        .map(|(&qx, _)| qx)
        .sum();
    let rhs = 2.0 * std::f64::consts::LN_2 * mu + 2.0 * tail_mass;
    Ok(D1MuCheck {
        lhs,
        tail_mass,
        rhs,
        holds: lhs <= rhs + TAIL_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// `min_{k≠l} d_E(P_k Wⁿ, P_l Wⁿ)`; 2 when there is a single message.
    pub min_distance: f64,
    /// `2(1 − λ₁ − λ₂)`.
    pub threshold: f64,
    pub margin: f64,
    pub ok: bool,
    pub worst_pair: Option<(usize, usize)>,
}

const SEPARATION_SLACK: f64 = 1e-9;

fn check_separation_prerequisites(verification: &IdVerification, l1: f64, l2: f64) -> Result<()> {
    if !(l1 >= 0.0 && l2 >= 0.0) || l1 + l2 >= 1.0 {
        return Err(Error::PrerequisiteNotVerified(format!(
            "need λ₁, λ₂ ≥ 0 with λ₁ + λ₂ < 1, got ({l1}, {l2})"
        )));
    }
    if verification.sampled {
        return Err(Error::PrerequisiteNotVerified(
            "λ̂₂ was estimated from sampled pairs".into(),
        ));
    }
    if verification.lambda1_hat > l1 + SEPARATION_SLACK || verification.lambda2_hat > l2 + SEPARATION_SLACK
    {
        return Err(Error::PrerequisiteNotVerified(format!(
            "verified errors ({}, {}) exceed ({l1}, {l2})",
            verification.lambda1_hat, verification.lambda2_hat
        )));
    }
    Ok(())
}

fn separation_under(
    ch: &CqChannel,
    code: &SimQidCode,
    pom: &Pom,
    l1: f64,
    l2: f64,
) -> Result<SeparationReport> {
    let raw = raw_output_sums(ch, code.n, pom, &code.inputs)?;
    let laws: Vec<Vec<f64>> = raw
        .into_iter()
        .zip(&code.inputs)
        .map(|(r, p)| r.into_iter().map(|v| v / p.divisor()).collect())
        .collect();
    let n = laws.len();
    let rows: Vec<Option<(f64, usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut best: Option<(f64, usize, usize)> = None;
            for l in k + 1..n {
                let d = l1_distance(&laws[k], &laws[l]);
                if best.is_none_or(|b| d < b.0) {
                    best = Some((d, k, l));
                }
            }
            best
        })
        .collect();
    let worst = rows
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, usize, usize)>, x| match acc {
            Some(a) if a.0 <= x.0 => Some(a),
            _ => Some(x),
        });
    let threshold = 2.0 * (1.0 - l1 - l2);
    let min_distance = worst.map_or(2.0, |w| w.0);
    Ok(SeparationReport {
        min_distance,
        threshold,
        margin: min_distance - threshold,
        ok: min_distance >= threshold - SEPARATION_SLACK,
        worst_pair: worst.map(|w| (w.1, w.2)),
    })
}

/// Pairwise output distances of a verified code under its own POM. Falling
/// short of `2(1 − λ₁ − λ₂)` contradicts the verified error levels and is
/// reported as an invariant violation.
pub fn id_separation_check(
    ch: &CqChannel,
    code: &SimQidCode,
    verification: &IdVerification,
    l1: f64,
    l2: f64,
) -> Result<SeparationReport> {
    check_separation_prerequisites(verification, l1, l2)?;
    let report = separation_under(ch, code, &code.base_pom, l1, l2)?;
    if !report.ok {
        return Err(Error::InvariantViolation(format!(
            "minimum pairwise distance {} below {}",
            report.min_distance, report.threshold
        )));
    }
    Ok(report)
}

/// The same distances under a different POM, with no guarantee attached; the
/// report's `ok` flag records the outcome.
pub fn id_separation_check_with_pom(
    ch: &CqChannel,
    code: &SimQidCode,
    verification: &IdVerification,
    l1: f64,
    l2: f64,
    pom: &Pom,
) -> Result<SeparationReport> {
    check_separation_prerequisites(verification, l1, l2)?;
    separation_under(ch, code, pom, l1, l2)
}

/// `|A|^{nM}`.
pub fn mtype_count_bound(alphabet_size: u64, n: u64, m: u64) -> BigUint {
    BigUint::from(alphabet_size).pow((n * m) as u32)
}

/// Number of M-type distributions on a `k`-point set: `C(M + k − 1, k − 1)`.
pub fn mtype_count_exact(support_size: u64, m: u64) -> BigUint {
    crate::family::binomial(m + support_size - 1, support_size - 1)
}
