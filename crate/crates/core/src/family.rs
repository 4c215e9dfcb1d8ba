//! Equal-size subset families with small pairwise intersections.
//!
//! A family of `a`-subsets of `{1, …, M}` is admissible when every two members
//! share fewer than `λa` elements. The counting argument shows such families of
//! size at least `2^a / M` exist whenever `λ log₂(1/ε − 1) > 2`; this module
//! evaluates those bounds exactly, builds families greedily and, for tiny
//! instances, finds the true maximum.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::settings::Settings;

/// Floor of a float that is meant to be an integer product, tolerant of the
/// last-bit error in e.g. `0.05 * 1000`.
fn robust_floor(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.floor()
    }
}

fn robust_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.ceil()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    /// Ground-set size `M`.
    pub ground_size: usize,
    pub epsilon: f64,
    pub lambda: f64,
    /// `a = ⌊εM⌋`.
    pub set_size: usize,
}

impl FamilyParams {
    pub fn from_epsilon(ground_size: usize, epsilon: f64, lambda: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("ε = {epsilon} outside (0, 1)")));
        }
        let a = robust_floor(epsilon * ground_size as f64) as usize;
        Self::build(ground_size, epsilon, lambda, a)
    }

    /// Parameters with `a` given directly; `ε` is taken as `a / M`.
    pub fn with_set_size(ground_size: usize, set_size: usize, lambda: f64) -> Result<Self> {
        if ground_size == 0 {
            return Err(Error::InvalidParameter("empty ground set".into()));
        }
        let epsilon = set_size as f64 / ground_size as f64;
        Self::build(ground_size, epsilon, lambda, set_size)
    }

    fn build(ground_size: usize, epsilon: f64, lambda: f64, set_size: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter(format!("λ = {lambda} outside (0, 1)")));
        }
        if set_size == 0 {
            return Err(Error::InvalidParameter(format!(
                "set size ⌊εM⌋ = 0 for M = {ground_size}, ε = {epsilon}"
            )));
        }
        if set_size > ground_size {
            return Err(Error::InvalidParameter(format!(
                "set size {set_size} exceeds ground set {ground_size}"
            )));
        }
        Ok(FamilyParams {
            ground_size,
            epsilon,
            lambda,
            set_size,
        })
    }

    /// `⌈λa⌉`: members must intersect in strictly fewer elements than `λa`,
    /// i.e. in at most `⌈λa⌉ − 1`.
    pub fn intersection_threshold(&self) -> usize {
        robust_ceil(self.lambda * self.set_size as f64) as usize
    }

    /// Largest admissible pairwise intersection.
    pub fn max_intersection(&self) -> usize {
        self.intersection_threshold() - 1
    }

    /// `λ log₂(1/ε − 1)`.
    pub fn precondition_value(&self) -> f64 {
        self.lambda * (1.0 / self.epsilon - 1.0).log2()
    }

    pub fn precondition_holds(&self) -> bool {
        self.precondition_value() > 2.0
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r *= n - i;
        r /= i + 1;
    }
    r
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    let b = binomial(n, k);
    u128::try_from(b).unwrap_or(u128::MAX)
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaBound {
    /// `⌈2^a / M⌉`.
    #[serde(with = "crate::format::decimal")]
    pub guaranteed: BigUint,
    /// `S = a · C(M, a − ⌈λa⌉) · 2^a`.
    #[serde(with = "crate::format::decimal")]
    pub counting_s: BigUint,
    /// `⌈C(M, a) / S⌉`, valid for any maximal family.
    #[serde(with = "crate::format::decimal")]
    pub counting_bound: BigUint,
    pub precondition_ok: bool,
    pub precondition_value: f64,
}

/// Exact evaluation of the family-size guarantees.
pub fn lemma_bound(params: &FamilyParams) -> LemmaBound {
    let m = params.ground_size as u64;
    let a = params.set_size as u64;
    let thr = params.intersection_threshold() as u64;
    let two_a = BigUint::one() << a as usize;
    let guaranteed = ceil_div(&two_a, &BigUint::from(m));
    let counting_s = BigUint::from(a) * binomial(m, a - thr) * &two_a;
    let counting_bound = ceil_div(&binomial(m, a), &counting_s);
    LemmaBound {
        guaranteed,
        counting_s,
        counting_bound,
        precondition_ok: params.precondition_holds(),
        precondition_value: params.precondition_value(),
    }
}

/// Family of `a`-subsets of `{1, …, M}`; elements are 1-based and sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetFamily {
    pub params: FamilyParams,
    pub sets: Vec<Vec<u32>>,
}

impl SetFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn from_set(set: &[u32], ground: usize) -> Self {
        let mut words = vec![0u64; ground.div_ceil(64).max(1)];
        for &e in set {
            let i = e as usize - 1;
            words[i / 64] |= 1 << (i % 64);
        }
        Bits(words)
    }

    fn intersection(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

/// Advance to the next `a`-combination of `{1..=m}` in lexicographic order.
fn next_combination(c: &mut [u32], m: u32) -> bool {
    let a = c.len();
    let mut i = a;
    while i > 0 {
        i -= 1;
        if c[i] < m - (a - 1 - i) as u32 {
            c[i] += 1;
            for j in i + 1..a {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The `rank`-th `a`-subset of `{1..=m}` in lexicographic order.
fn unrank_combination(mut rank: u128, m: u32, a: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(a);
    let mut next = 1u32;
    for slot in 0..a {
        let remaining = (a - slot - 1) as u64;
        loop {
            let count = binomial_u128((m - next) as u64, remaining);
            if rank < count {
                out.push(next);
                next += 1;
                break;
            }
            rank -= count;
            next += 1;
        }
    }
    out
}

/// Floyd's algorithm for a uniform random `a`-subset of `{1..=m}`.
fn random_subset(rng: &mut StreamRng, m: u32, a: usize) -> Vec<u32> {
    let mut chosen: Vec<u32> = Vec::with_capacity(a);
    for j in (m - a as u32 + 1)..=m {
        let t = rng.below(j as u64) as u32 + 1;
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    chosen.sort_unstable();
    chosen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "order", rename_all = "snake_case")]
pub enum CandidateOrder {
    Lexicographic,
    SeededRandom { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyOutcome {
    pub family: SetFamily,
    /// Every `a`-subset was examined, so no further set can be added.
    pub certified_maximal: bool,
    pub target_reached: bool,
    pub candidates_scanned: u64,
}

/// Scan candidate `a`-subsets and keep each one compatible with everything
/// accepted so far. Stops at `target` members or when candidates run out.
///
/// In lexicographic order (and in seeded-random order when `C(M, a)` is small
/// enough to shuffle) an exhausted scan certifies maximality. Otherwise random
/// order samples subsets until the scan cap.
pub fn build_family_greedy(
    params: &FamilyParams,
    target: Option<usize>,
    order: CandidateOrder,
) -> GreedyOutcome {
    let settings = Settings::global();
    let m = params.ground_size as u32;
    let a = params.set_size;
    let max_inter = params.max_intersection();
    let total = binomial_u128(m as u64, a as u64);
    let scan_cap = settings.greedy_scan_cap as u128;

    let mut accepted: Vec<Vec<u32>> = Vec::new();
    let mut accepted_bits: Vec<Bits> = Vec::new();
    let mut scanned: u64 = 0;
    let wanted = target.unwrap_or(usize::MAX);

    let mut consider = |cand: Vec<u32>, accepted: &mut Vec<Vec<u32>>| -> bool {
        let bits = Bits::from_set(&cand, m as usize);
        if accepted_bits
            .iter()
            .all(|b| b.intersection(&bits) <= max_inter)
        {
            accepted_bits.push(bits);
            accepted.push(cand);
        }
        accepted.len() >= wanted
    };

    let mut exhausted = false;
    match order {
        CandidateOrder::Lexicographic => {
            let mut cur: Vec<u32> = (1..=a as u32).collect();
            loop {
                if scanned as u128 >= scan_cap {
                    break;
                }
                scanned += 1;
                if consider(cur.clone(), &mut accepted) {
                    exhausted = scanned as u128 == total;
                    break;
                }
                if !next_combination(&mut cur, m) {
                    exhausted = true;
                    break;
                }
            }
        }
        CandidateOrder::SeededRandom { seed } => {
            let mut rng = StreamRng::new(seed, 0);
            if total <= settings.greedy_shuffle_cap as u128 {
                let mut ranks: Vec<u64> = (0..total as u64).collect();
                rng.shuffle(&mut ranks);
                exhausted = true;
                for r in ranks {
                    scanned += 1;
                    if consider(unrank_combination(r as u128, m, a), &mut accepted) {
                        exhausted = scanned as u128 == total;
                        break;
                    }
                }
            } else {
                while (scanned as u128) < scan_cap {
                    scanned += 1;
                    if consider(random_subset(&mut rng, m, a), &mut accepted) {
                        break;
                    }
                }
            }
        }
    }

    let target_reached = target.is_none_or(|t| accepted.len() >= t);
    GreedyOutcome {
        family: SetFamily {
            params: *params,
            sets: accepted,
        },
        certified_maximal: exhausted,
        target_reached,
        candidates_scanned: scanned,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCheck {
    pub ok: bool,
    pub max_intersection: usize,
    /// Pair attaining the maximum intersection (first in index order), or the
    /// offending member for a malformed set.
    pub witness: Option<(usize, usize)>,
    pub problem: Option<String>,
}

/// Exhaustive pairwise check of a family against its parameters.
pub fn verify_family(f: &SetFamily) -> FamilyCheck {
    let m = f.params.ground_size;
    let a = f.params.set_size;
    for (i, s) in f.sets.iter().enumerate() {
        let sorted = s.windows(2).all(|w| w[0] < w[1]);
        let in_range = s.iter().all(|&e| e >= 1 && e as usize <= m);
        if s.len() != a || !sorted || !in_range {
            return FamilyCheck {
                ok: false,
                max_intersection: 0,
                witness: Some((i, i)),
                problem: Some(format!(
                    "member {i} is not a sorted {a}-subset of 1..={m}: {s:?}"
                )),
            };
        }
    }
    let bits: Vec<Bits> = f.sets.iter().map(|s| Bits::from_set(s, m)).collect();
    let best = (0..bits.len())
        .into_par_iter()
        .map(|i| {
            let mut local: Option<(usize, usize, usize)> = None;
            for j in i + 1..bits.len() {
                let k = bits[i].intersection(&bits[j]);
                if local.is_none_or(|(bk, _, _)| k > bk) {
                    local = Some((k, i, j));
                }
            }
            local
        })
        .reduce(
            || None,
            |x, y| match (x, y) {
                (None, v) | (v, None) => v,
                (Some(p), Some(q)) => {
                    if q.0 > p.0 || (q.0 == p.0 && (q.1, q.2) < (p.1, p.2)) {
                        Some(q)
                    } else {
                        Some(p)
                    }
                }
            },
        );
    let limit = f.params.max_intersection();
    match best {
        None => FamilyCheck {
            ok: true,
            max_intersection: 0,
            witness: None,
            problem: None,
        },
        Some((k, i, j)) => FamilyCheck {
            ok: k <= limit,
            max_intersection: k,
            witness: Some((i, j)),
            problem: (k > limit).then(|| {
                format!("members {i} and {j} share {k} elements; at most {limit} allowed")
            }),
        },
    }
}

/// Johnson's bound on packings where every `t`-subset lies in at most one block.
pub fn johnson_bound(ground: u64, block: u64, t: u64) -> u64 {
    if t == 0 {
        return 1;
    }
    if block == 0 || block > ground {
        return 0;
    }
    let inner = johnson_bound(ground - 1, block - 1, t - 1);
    ((ground as u128 * inner as u128) / block as u128) as u64
}

/// Exact maximum size of an admissible family of `a`-subsets of `{1..M}`.
///
/// Two `a`-sets conflict iff they share a `⌈λa⌉`-subset, so admissible families
/// are packings. The search branches on the uncovered `t`-subset with fewest
/// candidate blocks: cover it with one of them, or leave it uncovered. A node
/// is pruned when even covering every still-coverable `t`-subset could not
/// reach the current target size. Targets descend from the Johnson bound to a
/// greedy packing's size.
///
/// Before each complete pass, packings invariant under a cyclic relabelling of
/// the points are searched on block orbits. Those probes only ever exhibit
/// packings, so the result stays exact.
pub fn brute_force_max_family(ground_size: usize, set_size: usize, lambda: f64) -> Result<u64> {
    let params = FamilyParams::with_set_size(ground_size, set_size, lambda)?;
    let settings = Settings::global();
    let m = ground_size as u32;
    let a = set_size;
    let total = binomial_u128(m as u64, a as u64);
    if total > settings.brute_force_cap as u128 {
        return Err(Error::ResourceLimit {
            what: "candidate subsets for exact family search",
            requested: total,
            limit: settings.brute_force_cap as u128,
        });
    }
    if a == 1 {
        return Ok(ground_size as u64);
    }
    // a ≥ 2 and C(M, a) ≤ cap keep M small enough for u128 masks.
    if ground_size > 128 {
        return Err(Error::ResourceLimit {
            what: "ground set for exact family search",
            requested: ground_size as u128,
            limit: 128,
        });
    }
    let t = params.intersection_threshold();
    let per_block = binomial_u128(a as u64, t as u64) as u64;

    let mut masks: Vec<u128> = Vec::with_capacity(total as usize);
    let mut cur: Vec<u32> = (1..=a as u32).collect();
    loop {
        masks.push(cur.iter().fold(0u128, |acc, &e| acc | 1u128 << (e - 1)));
        if !next_combination(&mut cur, m) {
            break;
        }
    }

    let mut tindex: HashMap<u128, u32> = HashMap::new();
    let tsubs: Vec<Vec<u32>> = masks
        .iter()
        .map(|&mask| {
            let elems: Vec<u32> = (0..128).filter(|&i| mask >> i & 1 == 1).collect();
            let mut pick: Vec<u32> = (0..t as u32).collect();
            let mut mine = Vec::new();
            loop {
                let sub = pick.iter().fold(0u128, |acc, &p| acc | 1u128 << elems[p as usize]);
                let next_id = tindex.len() as u32;
                mine.push(*tindex.entry(sub).or_insert(next_id));
                if !next_combination_0(&mut pick, a as u32) {
                    break;
                }
            }
            mine
        })
        .collect();
    let n_tsubs = tindex.len();

    let root_bound =
        johnson_bound(ground_size as u64, a as u64, t as u64).min(n_tsubs as u64 / per_block);

    // Any maximal packing is a lower bound; a greedy pass gives one.
    let mut floor = 0u64;
    let mut used = vec![false; n_tsubs];
    for subs in &tsubs {
        if subs.iter().all(|&u| !used[u as usize]) {
            for &u in subs {
                used[u as usize] = true;
            }
            floor += 1;
        }
    }

    let plain = PackingInstance::new(tsubs.clone(), vec![1; tsubs.len()], n_tsubs);
    let block_of: HashMap<u128, u32> =
        masks.iter().enumerate().map(|(i, &mk)| (mk, i as u32)).collect();
    let orbit_instances: Vec<PackingInstance> = cyclic_relabellings(ground_size)
        .into_iter()
        .map(|perm| orbit_instance(&masks, &block_of, &tsubs, n_tsubs, &perm))
        .collect();
    let probe_budget = settings.brute_force_node_budget / 8;

    let mut nodes_left = settings.brute_force_node_budget;
    let mut target = root_bound;
    while target > floor {
        for inst in &orbit_instances {
            let mut probe = Packing::new(inst, per_block, probe_budget);
            if let Ok(true) = probe.reach(target) {
                return Ok(target);
            }
        }
        let mut search = Packing::new(&plain, per_block, nodes_left);
        let found = search.reach(target)?;
        nodes_left -= search.nodes;
        if found {
            return Ok(target);
        }
        target -= 1;
    }
    Ok(floor)
}

/// Cyclic point relabellings used for symmetric probes: a full `M`-cycle and an
/// `(M−1)`-cycle fixing the last point.
fn cyclic_relabellings(m: usize) -> Vec<Vec<u32>> {
    let full: Vec<u32> = (0..m as u32).map(|i| (i + 1) % m as u32).collect();
    let mut fixing: Vec<u32> = (0..m as u32 - 1).map(|i| (i + 1) % (m as u32 - 1)).collect();
    fixing.push(m as u32 - 1);
    vec![full, fixing]
}

/// Blocks grouped into orbits under `perm`; an orbit is usable only when its
/// members share no `t`-subset among themselves.
fn orbit_instance(
    masks: &[u128],
    block_of: &HashMap<u128, u32>,
    tsubs: &[Vec<u32>],
    n_tsubs: usize,
    perm: &[u32],
) -> PackingInstance {
    let apply = |mask: u128| -> u128 {
        (0..perm.len())
            .filter(|&i| mask >> i & 1 == 1)
            .fold(0u128, |acc, i| acc | 1u128 << perm[i])
    };
    let mut seen = vec![false; masks.len()];
    let mut orbit_tsubs = Vec::new();
    let mut weights = Vec::new();
    for start in 0..masks.len() {
        if seen[start] {
            continue;
        }
        let mut members = Vec::new();
        let mut mask = masks[start];
        loop {
            let b = block_of[&mask] as usize;
            if seen[b] {
                break;
            }
            seen[b] = true;
            members.push(b);
            mask = apply(mask);
        }
        let mut covered: Vec<u32> = members.iter().flat_map(|&b| tsubs[b].iter().copied()).collect();
        let count = covered.len();
        covered.sort_unstable();
        covered.dedup();
        if covered.len() == count {
            orbit_tsubs.push(covered);
            weights.push(members.len() as u64);
        }
    }
    PackingInstance::new(orbit_tsubs, weights, n_tsubs)
}

/// Next `k`-combination of `{0..n-1}`.
fn next_combination_0(c: &mut [u32], n: u32) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - (k - i) as u32 {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Weighted blocks over a shared pool of `t`-subsets.
struct PackingInstance {
    tsubs: Vec<Vec<u32>>,
    weights: Vec<u64>,
    containing: Vec<Vec<u32>>,
}

impl PackingInstance {
    fn new(tsubs: Vec<Vec<u32>>, weights: Vec<u64>, n_tsubs: usize) -> Self {
        let mut containing = vec![Vec::new(); n_tsubs];
        for (b, subs) in tsubs.iter().enumerate() {
            for &u in subs {
                containing[u as usize].push(b as u32);
            }
        }
        PackingInstance {
            tsubs,
            weights,
            containing,
        }
    }
}

struct Packing<'a> {
    inst: &'a PackingInstance,
    /// `t`-subsets consumed by one underlying block.
    per_block: u64,
    unavail: Vec<u32>,
    avail_in: Vec<u32>,
    /// `t`-subsets still lying in some available block.
    coverable: u64,
    chosen: u64,
    best: u64,
    target: u64,
    nodes: u64,
    budget: u64,
    log: Vec<u32>,
}

impl<'a> Packing<'a> {
    fn new(inst: &'a PackingInstance, per_block: u64, budget: u64) -> Self {
        let avail_in: Vec<u32> = inst.containing.iter().map(|c| c.len() as u32).collect();
        let coverable = avail_in.iter().filter(|&&n| n > 0).count() as u64;
        Packing {
            inst,
            per_block,
            unavail: vec![0; inst.tsubs.len()],
            avail_in,
            coverable,
            chosen: 0,
            best: 0,
            target: 0,
            nodes: 0,
            budget,
            log: Vec::new(),
        }
    }

    /// Whether a packing of total weight at least `target` exists.
    fn reach(&mut self, target: u64) -> Result<bool> {
        self.target = target;
        self.best = target.saturating_sub(1);
        if target == 0 {
            return Ok(true);
        }
        self.run()?;
        Ok(self.best >= target)
    }

    fn disable(&mut self, c: u32) {
        let ci = c as usize;
        self.unavail[ci] += 1;
        if self.unavail[ci] == 1 {
            for &t in &self.inst.tsubs[ci] {
                let slot = &mut self.avail_in[t as usize];
                *slot -= 1;
                if *slot == 0 {
                    self.coverable -= 1;
                }
            }
        }
        self.log.push(c);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let c = self.log.pop().expect("log entry") as usize;
            self.unavail[c] -= 1;
            if self.unavail[c] == 0 {
                for &t in &self.inst.tsubs[c] {
                    let slot = &mut self.avail_in[t as usize];
                    if *slot == 0 {
                        self.coverable += 1;
                    }
                    *slot += 1;
                }
            }
        }
    }

    fn done(&self) -> bool {
        self.best >= self.target
    }

    fn run(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceLimit {
                what: "search nodes for exact family search",
                requested: self.nodes as u128,
                limit: self.budget as u128,
            });
        }
        if self.chosen > self.best {
            self.best = self.chosen;
        }
        if self.done() {
            return Ok(());
        }
        let bound = self.chosen + self.coverable / self.per_block;
        if bound <= self.best || self.coverable == 0 {
            return Ok(());
        }
        let inst = self.inst;
        let branch = (0..self.avail_in.len())
            .filter(|&t| self.avail_in[t] > 0)
            .min_by_key(|&t| (self.avail_in[t], t))
            .expect("coverable subsets remain");

        let options: Vec<u32> = inst.containing[branch]
            .iter()
            .copied()
            .filter(|&c| self.unavail[c as usize] == 0)
            .collect();
        for c in options {
            let mark = self.log.len();
            for &u in &inst.tsubs[c as usize] {
                for &other in &inst.containing[u as usize] {
                    self.disable(other);
                }
            }
            self.chosen += inst.weights[c as usize];
            self.run()?;
            self.chosen -= inst.weights[c as usize];
            self.undo_to(mark);
            if self.done() {
                return Ok(());
            }
        }
        // Leave `branch` uncovered.
        let mark = self.log.len();
        for &other in &inst.containing[branch] {
            self.disable(other);
        }
        self.run()?;
        self.undo_to(mark);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_bound_large_instance() {
        let p = FamilyParams::from_epsilon(1000, 0.05, 0.5).unwrap();
        assert_eq!(p.set_size, 50);
        let b = lemma_bound(&p);
        assert!(b.precondition_ok);
        assert!((b.precondition_value - 0.5 * 19f64.log2()).abs() < 1e-12);
        assert!((b.precondition_value - 2.1240).abs() < 1e-4);
        // ⌈2^50 / 1000⌉ = ⌈1125899906842.624⌉
        assert_eq!(b.guaranteed, BigUint::from(1_125_899_906_843u64));
    }

    #[test]
    fn lemma_bound_counting_quantities() {
        let p = FamilyParams::with_set_size(20, 4, 0.75).unwrap();
        let b = lemma_bound(&p);
        assert_eq!(b.counting_s, BigUint::from(1280u32));
        assert_eq!(binomial(20, 4), BigUint::from(4845u32));
        assert_eq!(b.counting_bound, BigUint::from(4u32));
    }

    #[test]
    fn precondition_failure_still_reports() {
        let p = FamilyParams::from_epsilon(100, 0.2, 0.5).unwrap();
        let b = lemma_bound(&p);
        assert!(!b.precondition_ok);
        assert!(b.guaranteed > BigUint::zero());
    }

    #[test]
    fn threshold_is_strict() {
        let p = FamilyParams::with_set_size(20, 4, 0.75).unwrap();
        assert_eq!(p.intersection_threshold(), 3);
        assert_eq!(p.max_intersection(), 2);
        let p = FamilyParams::with_set_size(20, 4, 0.7).unwrap();
        assert_eq!(p.max_intersection(), 2);
        let p = FamilyParams::with_set_size(20, 4, 0.8).unwrap();
        assert_eq!(p.max_intersection(), 3);
    }

    #[test]
    fn params_rejected() {
        assert!(FamilyParams::from_epsilon(10, 0.05, 0.5).is_err()); // a = 0
        assert!(FamilyParams::from_epsilon(10, 0.5, 1.0).is_err());
        assert!(FamilyParams::with_set_size(4, 5, 0.5).is_err());
    }

    #[test]
    fn greedy_singletons() {
        let p = FamilyParams::with_set_size(4, 1, 0.5).unwrap();
        let g = build_family_greedy(&p, None, CandidateOrder::Lexicographic);
        assert_eq!(g.family.sets, vec![vec![1], vec![2], vec![3], vec![4]]);
        assert!(g.certified_maximal);
    }

    #[test]
    fn greedy_target_one() {
        let p = FamilyParams::with_set_size(10, 3, 0.5).unwrap();
        let g = build_family_greedy(&p, Some(1), CandidateOrder::Lexicographic);
        assert_eq!(g.family.sets, vec![vec![1, 2, 3]]);
        assert!(g.target_reached);
        assert!(!g.certified_maximal);
    }

    #[test]
    fn greedy_unreachable_target_flagged() {
        let p = FamilyParams::with_set_size(4, 2, 0.5).unwrap();
        let g = build_family_greedy(&p, Some(3), CandidateOrder::Lexicographic);
        assert_eq!(g.family.len(), 2);
        assert!(!g.target_reached);
        assert!(g.certified_maximal);
    }

    #[test]
    fn greedy_is_deterministic() {
        let p = FamilyParams::with_set_size(12, 4, 0.5).unwrap();
        let a = build_family_greedy(&p, None, CandidateOrder::SeededRandom { seed: 9 });
        let b = build_family_greedy(&p, None, CandidateOrder::SeededRandom { seed: 9 });
        assert_eq!(a, b);
        assert!(a.certified_maximal);
        assert!(verify_family(&a.family).ok);
    }

    #[test]
    fn verify_examples() {
        let p = FamilyParams::with_set_size(6, 2, 0.5).unwrap();
        let disjoint = SetFamily {
            params: p,
            sets: vec![vec![1, 2], vec![3, 4], vec![5, 6]],
        };
        let c = verify_family(&disjoint);
        assert!(c.ok);
        assert_eq!(c.max_intersection, 0);

        let dup = SetFamily {
            params: p,
            sets: vec![vec![1, 2], vec![3, 4], vec![1, 2]],
        };
        let c = verify_family(&dup);
        assert!(!c.ok);
        assert_eq!(c.max_intersection, 2);
        assert_eq!(c.witness, Some((0, 2)));

        let malformed = SetFamily {
            params: p,
            sets: vec![vec![2, 1]],
        };
        assert!(!verify_family(&malformed).ok);
    }

    #[test]
    fn combination_rank_roundtrip() {
        let mut cur: Vec<u32> = (1..=3).collect();
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank_combination(rank, 7, 3), cur);
            rank += 1;
            if !next_combination(&mut cur, 7) {
                break;
            }
        }
        assert_eq!(rank, 35);
    }

    #[test]
    fn random_subset_is_valid() {
        let mut rng = StreamRng::new(5, 0);
        for _ in 0..200 {
            let s = random_subset(&mut rng, 30, 6);
            assert_eq!(s.len(), 6);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.iter().all(|&e| (1..=30).contains(&e)));
        }
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_max_family(4, 2, 0.5).unwrap(), 2);
        assert_eq!(brute_force_max_family(6, 2, 0.5).unwrap(), 3);
        assert_eq!(brute_force_max_family(9, 1, 0.3).unwrap(), 9);
        // Fano plane: 7 triples pairwise meeting in one point.
        assert_eq!(brute_force_max_family(7, 3, 0.5).unwrap(), 7);
    }

    #[test]
    fn brute_force_cap() {
        assert!(matches!(
            brute_force_max_family(40, 5, 0.5),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn johnson_values() {
        assert_eq!(johnson_bound(20, 4, 3), 285);
        assert_eq!(johnson_bound(7, 3, 2), 7);
        assert_eq!(johnson_bound(6, 2, 1), 3);
    }
}
