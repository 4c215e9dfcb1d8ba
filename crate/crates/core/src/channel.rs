//! Memoryless classical-quantum channels.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::quantum::{self, DensityOperator, FiniteDistribution, Pom};
use crate::settings::{tol, Settings};

/// A word `x₁…x_n` over the alphabet `{1, …, a}` (letters are 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn new(letters: impl Into<Vec<u32>>) -> Self {
        Word(letters.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    /// All `aⁿ` words in lexicographic order.
    pub fn all(alphabet_size: usize, n: usize) -> impl Iterator<Item = Word> {
        let total = (alphabet_size as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        (0..total).map(move |mut k| {
            let mut letters = vec![1u32; n];
            for slot in letters.iter_mut().rev() {
                *slot = (k % alphabet_size as u64) as u32 + 1;
                k /= alphabet_size as u64;
            }
            Word(letters)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("-"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedWord {
    pub word: Word,
    pub mass: f64,
}

/// A probability distribution on `Aⁿ`, stored sparsely.
///
/// The uniform case keeps its masses exact: every support word has mass
/// `1/|support|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WordDistribution {
    Uniform { support: Vec<Word> },
    Weighted { entries: Vec<WeightedWord> },
}

fn check_words(words: &[&Word]) -> Result<usize> {
    let n = words
        .first()
        .ok_or_else(|| Error::InvalidDistribution("empty support".into()))?
        .len();
    if let Some(w) = words.iter().find(|w| w.len() != n) {
        return Err(Error::InvalidDistribution(format!(
            "word {w} has length {} but {n} expected",
            w.len()
        )));
    }
    let mut sorted: Vec<&Word> = words.to_vec();
    sorted.sort();
    if let Some(pair) = sorted.windows(2).find(|p| p[0] == p[1]) {
        return Err(Error::InvalidDistribution(format!(
            "word {} listed twice",
            pair[0]
        )));
    }
    let cap = Settings::global().max_support;
    if words.len() > cap {
        return Err(Error::ResourceLimit {
            what: "distribution support",
            requested: words.len() as u128,
            limit: cap as u128,
        });
    }
    Ok(n)
}

impl WordDistribution {
    pub fn uniform(support: Vec<Word>) -> Result<Self> {
        check_words(&support.iter().collect::<Vec<_>>())?;
        Ok(WordDistribution::Uniform { support })
    }

    /// Weighted distribution; zero-mass entries are dropped.
    pub fn weighted(entries: Vec<(Word, f64)>) -> Result<Self> {
        let words: Vec<&Word> = entries.iter().map(|(w, _)| w).collect();
        check_words(&words)?;
        let mut total = 0.0;
        for (w, m) in &entries {
            if !m.is_finite() || *m < 0.0 {
                return Err(Error::InvalidDistribution(format!("mass {m} for word {w}")));
            }
            total += m;
        }
        if (total - 1.0).abs() > tol().normalization {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        let entries: Vec<WeightedWord> = entries
            .into_iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|(word, mass)| WeightedWord { word, mass })
            .collect();
        if entries.is_empty() {
            return Err(Error::InvalidDistribution("all masses are zero".into()));
        }
        Ok(WordDistribution::Weighted { entries })
    }

    pub fn point(word: Word) -> Self {
        WordDistribution::Uniform {
            support: vec![word],
        }
    }

    /// Uniform distribution over all `aⁿ` words.
    pub fn uniform_all(alphabet_size: usize, n: usize) -> Result<Self> {
        let count = (alphabet_size as u128).pow(n as u32);
        let cap = Settings::global().max_support as u128;
        if count > cap {
            return Err(Error::ResourceLimit {
                what: "distribution support",
                requested: count,
                limit: cap,
            });
        }
        WordDistribution::uniform(Word::all(alphabet_size, n).collect())
    }

    /// The i.i.d. extension `Pⁿ(x) = Π P(x_k)` of a letter distribution.
    pub fn iid(letter: &FiniteDistribution, n: usize) -> Result<Self> {
        let a = letter.len();
        let count = (a as u128).pow(n as u32);
        let cap = Settings::global().max_support as u128;
        if count > cap {
            return Err(Error::ResourceLimit {
                what: "distribution support",
                requested: count,
                limit: cap,
            });
        }
        let entries: Vec<(Word, f64)> = Word::all(a, n)
            .map(|w| {
                let m = w.0.iter().map(|&l| letter.mass(l as usize - 1)).product();
                (w, m)
            })
            .collect();
        // Products of normalised masses can drift by a few ulps per letter.
        let total: f64 = entries.iter().map(|(_, m)| m).sum();
        let entries = entries.into_iter().map(|(w, m)| (w, m / total)).collect();
        WordDistribution::weighted(entries)
    }

    /// Number of support words.
    pub fn len(&self) -> usize {
        match self {
            WordDistribution::Uniform { support } => support.len(),
            WordDistribution::Weighted { entries } => entries.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn word_length(&self) -> usize {
        self.word(0).len()
    }

    pub fn word(&self, i: usize) -> &Word {
        match self {
            WordDistribution::Uniform { support } => &support[i],
            WordDistribution::Weighted { entries } => &entries[i].word,
        }
    }

    pub fn mass(&self, i: usize) -> f64 {
        match self {
            WordDistribution::Uniform { support } => 1.0 / support.len() as f64,
            WordDistribution::Weighted { entries } => entries[i].mass,
        }
    }

    /// Unnormalised weight and common divisor: `mass(i) = weight(i) / divisor`.
    /// For the uniform case weights are 1 and the divisor is the support size, so
    /// sums can be accumulated in integers-as-floats before one final division.
    pub fn weight(&self, i: usize) -> f64 {
        match self {
            WordDistribution::Uniform { .. } => 1.0,
            WordDistribution::Weighted { entries } => entries[i].mass,
        }
    }

    pub fn divisor(&self) -> f64 {
        match self {
            WordDistribution::Uniform { support } => support.len() as f64,
            WordDistribution::Weighted { .. } => 1.0,
        }
    }

    /// Exact mass for the uniform case.
    pub fn exact_mass(&self, i: usize) -> Option<Ratio<u64>> {
        match self {
            WordDistribution::Uniform { support } if i < support.len() => {
                Some(Ratio::new(1, support.len() as u64))
            }
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, f64)> + '_ {
        (0..self.len()).map(move |i| (self.word(i), self.mass(i)))
    }

    pub fn words(&self) -> Vec<Word> {
        (0..self.len()).map(|i| self.word(i).clone()).collect()
    }
}

/// A classical-quantum channel `x ↦ W_x` with a finite input alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct CqChannel {
    dim: usize,
    signals: Vec<DensityOperator>,
}

impl CqChannel {
    pub fn new(signals: Vec<DensityOperator>) -> Result<Self> {
        let dim = signals
            .first()
            .ok_or_else(|| Error::InvalidParameter("channel needs a nonempty alphabet".into()))?
            .dim();
        if let Some(s) = signals.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        Ok(CqChannel { dim, signals })
    }

    /// Validate every raw signal matrix.
    pub fn from_matrices(matrices: Vec<CMatrix>) -> Result<Self> {
        let signals = matrices
            .into_iter()
            .map(DensityOperator::new)
            .collect::<Result<Vec<_>>>()?;
        CqChannel::new(signals)
    }

    /// `|0⟩⟨0|, |1⟩⟨1|, …` on `a` levels: the noiseless channel.
    pub fn noiseless(alphabet_size: usize) -> Self {
        let signals = (0..alphabet_size)
            .map(|k| DensityOperator::basis(alphabet_size, k))
            .collect();
        CqChannel {
            dim: alphabet_size,
            signals,
        }
    }

    /// Two pure qubit signals `|0⟩` and `cos θ|0⟩ + sin θ|1⟩`, so that
    /// `|⟨ψ₀|ψ₁⟩| = overlap` with `θ = arccos(overlap)`.
    pub fn pure_pair(overlap: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&overlap) {
            return Err(Error::InvalidParameter(format!(
                "overlap {overlap} outside [0, 1]"
            )));
        }
        let s = (1.0 - overlap * overlap).max(0.0).sqrt();
        let a = DensityOperator::pure(&[c(1.0, 0.0), c(0.0, 0.0)])?;
        let b = DensityOperator::pure(&[c(overlap, 0.0), c(s, 0.0)])?;
        CqChannel::new(vec![a, b])
    }

    pub fn alphabet_size(&self) -> usize {
        self.signals.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signals(&self) -> &[DensityOperator] {
        &self.signals
    }

    pub fn signal(&self, letter: u32) -> Result<&DensityOperator> {
        if letter == 0 || letter as usize > self.signals.len() {
            return Err(Error::BadLetter {
                letter,
                alphabet_size: self.signals.len(),
            });
        }
        Ok(&self.signals[letter as usize - 1])
    }

    /// `dimⁿ`, subject to the dimension cap.
    pub fn output_dim(&self, n: usize) -> Result<usize> {
        let cap = Settings::global().max_dim as u128;
        let d = (self.dim as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if d > cap {
            return Err(Error::ResourceLimit {
                what: "Hilbert-space dimension",
                requested: d,
                limit: cap,
            });
        }
        Ok(d as usize)
    }
}

/// A word together with its output state `W_{x₁} ⊗ … ⊗ W_{x_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordState {
    pub word: Word,
    pub state: DensityOperator,
}

/// The output state of a word under the memoryless extension. The empty word
/// yields the scalar 1 on a one-dimensional space.
pub fn word_state(ch: &CqChannel, word: &Word) -> Result<WordState> {
    for &l in word.letters() {
        ch.signal(l)?;
    }
    ch.output_dim(word.len())?;
    let mut state = DensityOperator::scalar_one();
    for &l in word.letters() {
        state = quantum::tensor(&state, ch.signal(l)?)?;
    }
    Ok(WordState {
        word: word.clone(),
        state,
    })
}

/// Memoised word states, safe for concurrent readers.
pub struct WordStateCache<'a> {
    channel: &'a CqChannel,
    states: RwLock<HashMap<Word, Arc<DensityOperator>>>,
}

impl<'a> WordStateCache<'a> {
    pub fn new(channel: &'a CqChannel) -> Self {
        WordStateCache {
            channel,
            states: RwLock::new(HashMap::new()),
        }
    }

    pub fn channel(&self) -> &CqChannel {
        self.channel
    }

    pub fn get(&self, word: &Word) -> Result<Arc<DensityOperator>> {
        if let Some(s) = self.states.read().expect("cache lock").get(word) {
            return Ok(Arc::clone(s));
        }
        let state = Arc::new(word_state(self.channel, word)?.state);
        let mut guard = self.states.write().expect("cache lock");
        Ok(Arc::clone(guard.entry(word.clone()).or_insert(state)))
    }

    pub fn len(&self) -> usize {
        self.states.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_lengths(p: &WordDistribution, n: usize) -> Result<()> {
    if let Some((w, _)) = p.iter().find(|(w, _)| w.len() != n) {
        return Err(Error::InvalidDistribution(format!(
            "word {w} has length {} but block length is {n}",
            w.len()
        )));
    }
    Ok(())
}

/// `PWⁿ = Σ_x P(x) Wⁿ_x`.
pub fn mixed_output(ch: &CqChannel, p: &WordDistribution, n: usize) -> Result<DensityOperator> {
    check_lengths(p, n)?;
    let dim = ch.output_dim(n)?;
    let mut acc = linalg::zeros(dim);
    for i in 0..p.len() {
        let ws = word_state(ch, p.word(i))?;
        acc += ws.state.matrix() * c(p.weight(i), 0.0);
    }
    acc *= c(1.0 / p.divisor(), 0.0);
    Ok(DensityOperator::from_matrix_unchecked(acc))
}

/// Holevo quantity `H(Σ P(x) W_x) − Σ P(x) H(W_x)` in bits, clamped at 0.
pub fn holevo_quantity(ch: &CqChannel, p: &FiniteDistribution) -> Result<f64> {
    if p.len() != ch.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: ch.alphabet_size(),
            found: p.len(),
        });
    }
    Ok(HolevoEvaluator::new(ch).chi(p.masses()))
}

struct HolevoEvaluator<'a> {
    signals: &'a [DensityOperator],
    entropies: Vec<f64>,
}

impl<'a> HolevoEvaluator<'a> {
    fn new(ch: &'a CqChannel) -> Self {
        let entropies = ch
            .signals
            .iter()
            .map(quantum::von_neumann_entropy)
            .collect();
        HolevoEvaluator {
            signals: &ch.signals,
            entropies,
        }
    }

    fn chi(&self, p: &[f64]) -> f64 {
        let dim = self.signals[0].dim();
        let mut mix = linalg::zeros(dim);
        let mut avg = 0.0;
        for ((s, h), &w) in self.signals.iter().zip(&self.entropies).zip(p) {
            if w == 0.0 {
                continue;
            }
            mix += s.matrix() * c(w, 0.0);
            avg += w * h;
        }
        let total = quantum::shannon_entropy_bits(linalg::hermitian_eigenvalues(&mix).into_iter());
        (total - avg).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityOptions {
    /// Grid divisions per coordinate (spacing `1/mesh`). `None` picks the finest
    /// mesh whose grid fits the configured point cap.
    pub mesh: Option<u32>,
    pub max_sweeps: u32,
    pub starts: usize,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        let s = Settings::global();
        CapacityOptions {
            mesh: None,
            max_sweeps: s.capacity_iteration_cap,
            starts: s.capacity_starts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// Best Holevo quantity found; a lower bound on the true maximum.
    pub capacity: f64,
    pub optimizer: FiniteDistribution,
    pub mesh: u32,
    pub grid_points: u64,
    /// Best value on the grid alone, before refinement.
    pub grid_best: f64,
    pub refinement_sweeps: u32,
}

fn grid_point_count(alphabet: usize, mesh: u32) -> u128 {
    // C(mesh + a - 1, a - 1)
    let k = alphabet as u128 - 1;
    let n = mesh as u128 + k;
    let mut r: u128 = 1;
    for i in 0..k {
        r = match r.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    r
}

/// Compositions of `mesh` into `parts` nonnegative parts, lexicographic.
fn compositions(mesh: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
    }
    rec(0, mesh, &mut cur, &mut out);
    out
}

/// Maximise `χ(P)` over the simplex: exhaustive grid, then pairwise
/// coordinate ascent from the best grid points.
///
/// The result is deterministic for given options regardless of thread count;
/// grid ties resolve to the lexicographically first composition.
pub fn holevo_capacity(ch: &CqChannel, opts: &CapacityOptions) -> Result<CapacityResult> {
    let settings = Settings::global();
    let a = ch.alphabet_size();
    if a > settings.max_alphabet {
        return Err(Error::AlphabetTooLarge {
            size: a,
            cap: settings.max_alphabet,
        });
    }
    let cap = settings.capacity_grid_cap as u128;
    let mesh = match opts.mesh {
        Some(0) => return Err(Error::InvalidParameter("mesh must be positive".into())),
        Some(m) => {
            let count = grid_point_count(a, m);
            if count > cap {
                return Err(Error::ResourceLimit {
                    what: "capacity grid points",
                    requested: count,
                    limit: cap,
                });
            }
            m
        }
        None => {
            let (mut lo, mut hi) = (1u32, 10_000u32);
            while lo < hi {
                let mid = (lo + hi + 1) / 2;
                if grid_point_count(a, mid) <= cap {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            lo
        }
    };

    let eval = HolevoEvaluator::new(ch);
    let grid = compositions(mesh, a);
    let to_p = |comp: &[u32]| -> Vec<f64> {
        comp.iter().map(|&k| k as f64 / mesh as f64).collect()
    };
    let values: Vec<f64> = grid.par_iter().map(|comp| eval.chi(&to_p(comp))).collect();

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let grid_best = values[order[0]];

    let mut best_value = grid_best;
    let mut best_p = to_p(&grid[order[0]]);
    let mut sweeps_used = 0;
    let starts: Vec<Vec<f64>> = order
        .iter()
        .take(opts.starts.max(1))
        .map(|&i| to_p(&grid[i]))
        .collect();
    let refined: Vec<(f64, Vec<f64>, u32)> = starts
        .into_par_iter()
        .map(|p| coordinate_ascent(&eval, p, opts.max_sweeps))
        .collect();
    for (v, p, sweeps) in refined {
        sweeps_used = sweeps_used.max(sweeps);
        if v > best_value {
            best_value = v;
            best_p = p;
        }
    }
    Ok(CapacityResult {
        capacity: best_value,
        optimizer: FiniteDistribution::from_masses_unchecked(best_p),
        mesh,
        grid_points: grid.len() as u64,
        grid_best,
        refinement_sweeps: sweeps_used,
    })
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Maximise a concave function on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn coordinate_ascent(eval: &HolevoEvaluator<'_>, mut p: Vec<f64>, max_sweeps: u32) -> (f64, Vec<f64>, u32) {
    let a = p.len();
    let mut value = eval.chi(&p);
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let before = value;
        for i in 0..a {
            for j in (i + 1)..a {
                let (pi, pj) = (p[i], p[j]);
                let along = |t: f64| {
                    let mut q = p.clone();
                    q[i] = (pi + t).max(0.0);
                    q[j] = (pj - t).max(0.0);
                    eval.chi(&q)
                };
                let t = golden_max(&along, -pi, pj);
                let candidate = along(t);
                if candidate > value {
                    p[i] = (pi + t).max(0.0);
                    p[j] = (pj - t).max(0.0);
                    value = candidate;
                }
            }
        }
        if value - before < 1e-9 {
            break;
        }
    }
    (value, p, sweeps)
}

/// The classical channel `V(y|x) = Wⁿ_x(E_y)` on a list of input words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducedClassicalChannel {
    pub n: usize,
    pub words: Vec<Word>,
    pub outcome_count: usize,
    /// `rows[i][y] = Wⁿ_{words[i]}(E_y)`.
    pub rows: Vec<Vec<f64>>,
}

impl InducedClassicalChannel {
    /// Output law `Σ_i weight_i · rows[i]`, given one weight per word.
    pub fn output_masses(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outcome_count];
        for (row, &w) in self.rows.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(row) {
                *o += w * v;
            }
        }
        out
    }

    /// Joint law `P(x) V(y|x)` for a distribution over exactly these words.
    pub fn joint_masses(&self, p: &WordDistribution) -> Result<Vec<Vec<f64>>> {
        if p.len() != self.words.len() || (0..p.len()).any(|i| p.word(i) != &self.words[i]) {
            return Err(Error::SizeMismatch(
                "distribution support differs from the channel's input words".into(),
            ));
        }
        Ok(self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|v| p.mass(i) * v).collect())
            .collect())
    }
}

/// Measure every word's output state with `E`. Rows are computed in parallel
/// and returned in input order.
pub fn induced_channel(
    ch: &CqChannel,
    n: usize,
    pom: &Pom,
    words: &[Word],
) -> Result<InducedClassicalChannel> {
    let dim = ch.output_dim(n)?;
    if pom.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: pom.dim(),
        });
    }
    if let Some(w) = words.iter().find(|w| w.len() != n) {
        return Err(Error::InvalidParameter(format!(
            "word {w} has length {} but block length is {n}",
            w.len()
        )));
    }
    let rows = words
        .par_iter()
        .map(|w| {
            let ws = word_state(ch, w)?;
            Ok(quantum::measure(&ws.state, pom)?.masses().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InducedClassicalChannel {
        n,
        words: words.to_vec(),
        outcome_count: pom.len(),
        rows,
    })
}
