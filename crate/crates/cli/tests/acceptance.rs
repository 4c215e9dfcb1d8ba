//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails. Oracles here are computed independently of the
//! library routines they check.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qidlab_core::channel::{holevo_capacity, CapacityOptions};
use qidlab_core::family::{
    brute_force_max_family, build_family_greedy, lemma_bound, verify_family, CandidateOrder,
};
use qidlab_core::format::{self, ChannelFile};
use qidlab_core::idcode::{build_simultaneous_id_code, verify_id_code, VerifyOptions};
use qidlab_core::quantum::{born_probabilities, coarsen, tensor, von_neumann_entropy};
use qidlab_core::random::{random_channel, random_density, random_distribution, random_pom};
use qidlab_core::resolvability::{
    d1_mu_bound_check, density_exponential_sums, id_separation_check,
    information_density_enumerate, random_selection_resolve,
};
use qidlab_core::rng::StreamRng;
use qidlab_core::transmission::{build_code_exhaustive, CodeSearch};
use qidlab_core::{CMatrix, Complex64, CqChannel, FamilyParams, Pom, Word, WordDistribution};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Re tr(ρE)` by explicit double sum.
fn born_oracle(rho: &CMatrix, e: &CMatrix) -> f64 {
    let d = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            acc += rho[(j, k)] * e[(k, j)];
        }
    }
    acc.re
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

// 1. Born normalisation, entropy additivity, coarsening completeness.
fn criterion_1() -> Outcome {
    let mut rng = StreamRng::new(101, 0);
    let mut worst_born = 0.0f64;
    let mut worst_entropy = 0.0f64;
    let mut worst_coarse = 0.0f64;
    for dim in [2usize, 3, 4] {
        for _ in 0..500 {
            let rank = 1 + rng.below(dim as u64) as usize;
            let rho = random_density(&mut rng, dim, rank);
            let outcomes = 2 + rng.below(5) as usize;
            let pom = random_pom(&mut rng, dim, outcomes).map_err(|e| e.to_string())?;

            let probs = born_probabilities(&rho, &pom).map_err(|e| e.to_string())?;
            let oracle: Vec<f64> = pom.effects().iter().map(|e| born_oracle(rho.matrix(), e)).collect();
            for (p, o) in probs.iter().zip(&oracle) {
                ensure((p - o).abs() <= 1e-12, || format!("Born {p} vs oracle {o}"))?;
            }
            worst_born = worst_born.max((oracle.iter().sum::<f64>() - 1.0).abs());

            let sigma_dim = 2 + rng.below(3) as usize;
            let sigma = random_density(&mut rng, sigma_dim, sigma_dim);
            let joint = tensor(&rho, &sigma).map_err(|e| e.to_string())?;
            let gap = von_neumann_entropy(&joint) - von_neumann_entropy(&rho) - von_neumann_entropy(&sigma);
            worst_entropy = worst_entropy.max(gap.abs());

            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); 1 + rng.below(outcomes as u64) as usize];
            for k in 0..outcomes {
                let g = rng.below(groups.len() as u64) as usize;
                groups[g].push(k);
            }
            let coarse = coarsen(&pom, &groups).map_err(|e| e.to_string())?;
            let mut total = CMatrix::zeros(dim, dim);
            for e in &coarse {
                total += e.matrix();
            }
            worst_coarse = worst_coarse.max(max_abs(&(total - CMatrix::identity(dim, dim))));
        }
    }
    ensure(worst_born <= 1e-9, || format!("Born sum off by {worst_born:e}"))?;
    ensure(worst_entropy <= 1e-8, || format!("entropy additivity off by {worst_entropy:e}"))?;
    ensure(worst_coarse <= 1e-9, || format!("coarsened POM off identity by {worst_coarse:e}"))?;
    Ok(format!(
        "1500 pairs; max deviations Born {worst_born:.1e}, entropy {worst_entropy:.1e}, coarsening {worst_coarse:.1e}"
    ))
}

/// Holevo quantity of two pure states with overlap `s` and prior `(p, 1−p)`:
/// the entropy of the mixture, whose eigenvalues are `(1 ± √(1 − 4p(1−p)(1−s²)))/2`.
fn pure_pair_chi(p: f64, s: f64) -> f64 {
    let disc = (1.0 - 4.0 * p * (1.0 - p) * (1.0 - s * s)).max(0.0).sqrt();
    binary_entropy((1.0 + disc) / 2.0)
}

// 2. Holevo capacity against closed forms and a dense grid.
fn criterion_2() -> Outcome {
    let opts = CapacityOptions::default();
    let orth = holevo_capacity(&CqChannel::noiseless(2), &opts).map_err(|e| e.to_string())?;
    ensure((orth.capacity - 1.0).abs() <= 1e-6, || {
        format!("orthogonal qubit capacity {}", orth.capacity)
    })?;
    let mut notes = vec![format!("orthogonal {:.9}", orth.capacity)];
    for s in [0.25, 0.5, 0.75] {
        let ch = CqChannel::pure_pair(s).map_err(|e| e.to_string())?;
        let got = holevo_capacity(&ch, &opts).map_err(|e| e.to_string())?;
        let oracle = (0..=10_000)
            .map(|k| pure_pair_chi(k as f64 * 1e-4, s))
            .fold(0.0, f64::max);
        ensure((got.capacity - oracle).abs() <= 1e-4, || {
            format!("s = {s}: capacity {} vs oracle {oracle}", got.capacity)
        })?;
        notes.push(format!("s={s}: {:.6} vs {:.6}", got.capacity, oracle));
    }
    Ok(notes.join(", "))
}

fn intersection(a: &[u32], b: &[u32]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

// 3. Set-family lemma instantiation, exact search and random verification.
fn criterion_3() -> Outcome {
    let params = FamilyParams::with_set_size(20, 4, 0.75).map_err(|e| e.to_string())?;
    let bound = lemma_bound(&params);
    ensure(bound.counting_s.to_string() == "1280", || format!("S = {}", bound.counting_s))?;
    ensure(bound.counting_bound.to_string() == "4", || {
        format!("⌈C(20,4)/S⌉ = {}", bound.counting_bound)
    })?;
    let greedy = build_family_greedy(&params, None, CandidateOrder::Lexicographic);
    ensure(greedy.certified_maximal, || "greedy family not certified maximal".into())?;
    let n = greedy.family.len();
    ensure(n >= 4, || format!("greedy family has only {n} sets"))?;
    ensure(verify_family(&greedy.family).ok, || "greedy family fails verification".into())?;
    let exact = brute_force_max_family(20, 4, 0.75).map_err(|e| e.to_string())?;
    ensure(exact as usize >= n, || format!("exact maximum {exact} below greedy {n}"))?;

    let mut rng = StreamRng::new(303, 0);
    for draw in 0..200 {
        let a = 1 + rng.below(5) as usize;
        let m = a + rng.below(16) as usize;
        let lambda = rng.uniform_in(0.05, 0.95);
        let params = FamilyParams::with_set_size(m, a, lambda).map_err(|e| e.to_string())?;
        let out = build_family_greedy(&params, None, CandidateOrder::SeededRandom { seed: draw });
        let check = verify_family(&out.family);
        ensure(check.ok, || format!("draw {draw}: verify_family rejects greedy output"))?;
        let limit = params.max_intersection();
        let sets = &out.family.sets;
        for i in 0..sets.len() {
            ensure(sets[i].len() == a, || format!("draw {draw}: set of wrong size"))?;
            for j in i + 1..sets.len() {
                let k = intersection(&sets[i], &sets[j]);
                ensure(k <= limit, || format!("draw {draw}: sets {i}, {j} share {k} > {limit}"))?;
            }
        }
    }
    Ok(format!("greedy N = {n} (certified maximal), exact maximum {exact}, 200 random draws verified"))
}

struct ProposedCode {
    channel: CqChannel,
    code: qidlab_core::SimQidCode,
    verification: qidlab_core::IdVerification,
    max_intersection: usize,
    set_size: usize,
}

fn proposition_code() -> Result<ProposedCode, String> {
    let ch = CqChannel::noiseless(2);
    let code = match build_code_exhaustive(&ch, 6, 64, 0.0).map_err(|e| e.to_string())? {
        CodeSearch::Found {
            code, verification, ..
        } => {
            ensure(verification.epsilon_hat == 0.0, || {
                format!("transmission ε̂ = {}", verification.epsilon_hat)
            })?;
            code
        }
        CodeSearch::NotFound { .. } => return Err("no (6, 64, 0) code found".into()),
    };
    let params = FamilyParams::with_set_size(64, 5, 0.25).map_err(|e| e.to_string())?;
    let greedy = build_family_greedy(&params, None, CandidateOrder::Lexicographic);
    let check = verify_family(&greedy.family);
    ensure(check.ok, || "family fails verification".into())?;
    let id = build_simultaneous_id_code(&code, &greedy.family).map_err(|e| e.to_string())?;
    let verification = verify_id_code(&ch, &id, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    Ok(ProposedCode {
        channel: ch,
        code: id,
        verification,
        max_intersection: check.max_intersection,
        set_size: 5,
    })
}

// 4. End-to-end simultaneous identification code on the noiseless bit channel.
fn criterion_4(built: &ProposedCode) -> Outcome {
    let v = &built.verification;
    ensure(v.lambda1_hat == 0.0, || format!("λ̂₁ = {}", v.lambda1_hat))?;
    ensure(v.lambda2_hat <= 0.5 + 1e-9, || format!("λ̂₂ = {}", v.lambda2_hat))?;
    let expected = built.max_intersection as f64 / built.set_size as f64;
    ensure(v.lambda2_hat == expected, || {
        format!("λ̂₂ = {} but max intersection / a = {expected}", v.lambda2_hat)
    })?;
    let n = built.code.len();
    ensure(n > 64, || format!("N = {n} does not exceed M = 64"))?;
    Ok(format!(
        "N = {n} > M = 64, λ̂₁ = 0, λ̂₂ = {} = {}/{}",
        v.lambda2_hat, built.max_intersection, built.set_size
    ))
}

// 5. Pairwise output separation of the criterion-4 code.
fn criterion_5(built: &ProposedCode) -> Outcome {
    let report = id_separation_check(&built.channel, &built.code, &built.verification, 0.0, 0.5)
        .map_err(|e| e.to_string())?;
    ensure(report.min_distance >= 1.0 - 1e-9, || {
        format!("minimum distance {}", report.min_distance)
    })?;
    Ok(format!(
        "min pairwise distance {} ≥ threshold {}",
        report.min_distance, report.threshold
    ))
}

fn word_state(ch: &CqChannel, word: &Word) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for &l in word.letters() {
        m = m.kronecker(ch.signals()[l as usize - 1].matrix());
    }
    m
}

// 6. Information-density identities.
fn criterion_6() -> Outcome {
    let mut rng = StreamRng::new(606, 0);
    let mut worst = 0.0f64;
    for inst in 0..100 {
        let a = 1 + rng.below(3) as usize;
        let dim = 2 + rng.below(2) as usize;
        let n = 1 + rng.below(3) as usize;
        let ch = random_channel(&mut rng, a, dim).map_err(|e| e.to_string())?;
        let big = dim.pow(n as u32);
        let outcomes = 2 + rng.below(4) as usize;
        let pom = random_pom(&mut rng, big, outcomes).map_err(|e| e.to_string())?;
        let words: Vec<Word> = Word::all(a, n).collect();
        let masses = random_distribution(&mut rng, words.len(), true);
        let entries: Vec<(Word, f64)> = words
            .iter()
            .cloned()
            .zip(masses.masses().iter().copied())
            .filter(|(_, m)| *m > 0.0)
            .collect();
        let p = WordDistribution::weighted(entries.clone()).map_err(|e| e.to_string())?;
        let samples = information_density_enumerate(&ch, &p, &pom).map_err(|e| e.to_string())?;
        let sums = density_exponential_sums(&samples, n);

        // Oracle: V(y|x) from explicit Kronecker products, then Σ_x P(x)V(y|x)/PV(y).
        let rows: Vec<Vec<f64>> = entries
            .iter()
            .map(|(w, _)| {
                let rho = word_state(&ch, w);
                pom.effects().iter().map(|e| born_oracle(&rho, e)).collect()
            })
            .collect();
        for y in 0..pom.len() {
            let out: f64 = entries.iter().zip(&rows).map(|((_, px), r)| px * r[y]).sum();
            if out <= 1e-14 {
                continue;
            }
            let got = sums
                .get(&y)
                .ok_or_else(|| format!("instance {inst}: outcome {y} with mass {out:e} missing"))?;
            worst = worst.max((got - 1.0).abs());
        }
        for (&y, &s) in &sums {
            worst = worst.max((s - 1.0).abs());
            ensure(y < pom.len(), || format!("instance {inst}: bad outcome {y}"))?;
        }
    }
    ensure(worst <= 1e-8, || format!("sum deviates from 1 by {worst:e}"))?;

    let ch = CqChannel::noiseless(2);
    for n in 1..=3 {
        let p = WordDistribution::uniform_all(2, n).map_err(|e| e.to_string())?;
        let pom = Pom::product_basis(2, n).map_err(|e| e.to_string())?;
        let samples = information_density_enumerate(&ch, &p, &pom).map_err(|e| e.to_string())?;
        ensure(samples.len() == 1 << n, || format!("n = {n}: {} samples", samples.len()))?;
        for s in &samples {
            ensure(s.density == 1.0, || format!("noiseless density {} at n = {n}", s.density))?;
        }
    }
    Ok(format!("100 instances, max |sum − 1| = {worst:.1e}; noiseless densities exactly 1"))
}

// 7. The d₁–μ bound on random triples.
fn criterion_7() -> Outcome {
    let mut rng = StreamRng::new(707, 0);
    let mut violations = 0;
    for t in 0..1000 {
        let len = 1 + rng.below(8) as usize;
        let q = random_distribution(&mut rng, len, t % 2 == 0);
        let r = random_distribution(&mut rng, len, true);
        let mu = match t % 10 {
            0 => 1e-6,
            1 => 20.0,
            _ => rng.uniform_in(1e-3, 4.0),
        };
        let check = d1_mu_bound_check(&q, &r, mu).map_err(|e| e.to_string())?;
        // Oracle: d₁ = 2 Σ (q − r)⁺ and the tail via q > 2^μ r.
        let d1: f64 = 2.0
            * q.masses()
                .iter()
                .zip(r.masses())
                .map(|(a, b)| (a - b).max(0.0))
                .sum::<f64>();
        let tail: f64 = q
            .masses()
            .iter()
            .zip(r.masses())
            .filter(|(a, b)| **a > 0.0 && **a > mu.exp2() * **b)
            .map(|(a, _)| a)
            .sum();
        let rhs = 2.0 * mu / std::f64::consts::LOG2_E + 2.0 * tail;
        ensure((d1 - check.lhs).abs() <= 1e-12, || format!("triple {t}: d₁ {} vs {d1}", check.lhs))?;
        ensure((tail - check.tail_mass).abs() <= 1e-12, || {
            format!("triple {t}: tail {} vs {tail}", check.tail_mass)
        })?;
        if !check.holds || d1 > rhs + 1e-12 {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("1000 triples, zero violations".into())
}

// 8. Random-selection resolvability on the noiseless bit channel.
fn criterion_8() -> Outcome {
    let ch = CqChannel::noiseless(2);
    let p = WordDistribution::uniform_all(2, 2).map_err(|e| e.to_string())?;
    let pom = Pom::product_basis(2, 2).map_err(|e| e.to_string())?;
    let ladder = [16u64, 64, 256, 1024, 4096];
    let run = |threads: usize| -> Result<Vec<qidlab_core::ResolvabilityReport>, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| {
            ladder
                .iter()
                .map(|&m| random_selection_resolve(&ch, &p, &pom, m, 32, 2024).map_err(|e| e.to_string()))
                .collect()
        })
    };
    let one = run(1)?;
    let four = run(4)?;
    for (a, b) in one.iter().zip(&four) {
        let same = a.distances.iter().zip(&b.distances).all(|(x, y)| x.to_bits() == y.to_bits());
        ensure(same && a.mean.to_bits() == b.mean.to_bits(), || {
            format!("M = {}: results differ between 1 and 4 threads", a.m)
        })?;
    }
    let means: Vec<f64> = one.iter().map(|r| r.mean).collect();
    ensure(means.windows(2).all(|w| w[1] <= w[0]), || format!("means not monotone: {means:?}"))?;
    let last = *means.last().unwrap();
    ensure(last < 0.1, || format!("mean at M = 4096 is {last}"))?;
    Ok(format!(
        "means {}; identical under 1 and 4 threads",
        means.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(" > ")
    ))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_channel(path: &Path, ch: &CqChannel) -> Result<(), String> {
    write(path, &format::to_json(&ChannelFile::from_channel(ch)).map_err(|e| e.to_string())?)
}

struct Run {
    exit: i32,
    status: String,
    payload_hash: String,
    recomputed_hash: String,
}

fn run_cli(dir: &Path, args: &[&str], threads: usize, tag: &str) -> Result<Run, String> {
    let out = dir.join(format!("report-{tag}-{threads}.json"));
    let status = Command::new(env!("CARGO_BIN_EXE_qidlab"))
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .arg("--out")
        .arg(&out)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(&out).map_err(|e| {
        format!("{tag}: no report ({e}); stderr: {}", String::from_utf8_lossy(&status.stderr))
    })?;
    let report: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let payload_text = format::to_json(&report["payload"]).map_err(|e| e.to_string())?;
    Ok(Run {
        exit: status.status.code().unwrap_or(-1),
        status: report["status"].as_str().unwrap_or("").to_string(),
        payload_hash: report["payload_hash"].as_str().unwrap_or("").to_string(),
        recomputed_hash: {
            use sha2::Digest;
            hex::encode(sha2::Sha256::digest(payload_text.as_bytes()))
        },
    })
}

// 9. Every command is deterministic across reruns and thread counts.
fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    write_channel(&dir.join("bit.json"), &CqChannel::noiseless(2))?;
    write_channel(
        &dir.join("pair.json"),
        &CqChannel::pure_pair(std::f64::consts::FRAC_1_SQRT_2).map_err(|e| e.to_string())?,
    )?;
    let mut rng = StreamRng::new(909, 0);
    write_channel(&dir.join("trit.json"), &random_channel(&mut rng, 3, 2).map_err(|e| e.to_string())?)?;

    let configs: [(&str, &str, &str, i32); 11] = [
        ("validate", "validate-channel", r#"{"channel": "pair.json"}"#, 0),
        ("capacity", "capacity", r#"{"channel": "pair.json", "mesh": 4000}"#, 0),
        ("tx", "build-tx-code", r#"{"channel": "bit.json", "n": 3, "m": 8, "epsilon": 0.0}"#, 0),
        (
            "random",
            "build-tx-code",
            r#"{"channel": "trit.json", "method": "random_coding", "n": 3, "rate": 0.5, "gamma": 0.05, "alpha": 0.5, "seed": 3}"#,
            -1,
        ),
        (
            "family",
            "build-family",
            r#"{"m": 20, "set_size": 4, "lambda": 0.75, "order": "seeded_random", "seed": 5, "brute_force": true}"#,
            0,
        ),
        (
            "idcode",
            "build-id-code",
            r#"{"channel": "bit.json", "n": 6, "m": 64, "set_size": 5, "lambda1": 0.5, "lambda2": 0.5, "capacity_estimate": 1.0, "id_code_out": "id.json"}"#,
            0,
        ),
        ("verify", "verify-id-code", r#"{"channel": "bit.json", "id_code_file": "id.json", "lambda1": 0.0, "lambda2": 0.5}"#, 0),
        ("separation", "separation", r#"{"channel": "bit.json", "id_code_file": "id.json", "lambda1": 0.0, "lambda2": 0.5}"#, 0),
        (
            "trivial",
            "separation",
            r#"{"channel": "bit.json", "id_code_file": "id.json", "lambda1": 0.0, "lambda2": 0.5, "substitute_pom": "trivial"}"#,
            1,
        ),
        ("resolve", "resolvability", r#"{"channel": "bit.json", "n": 2, "seed": 2024, "deltas": [0.01, 0.05, 0.5]}"#, 0),
        ("density", "info-density", r#"{"channel": "trit.json", "n": 2, "samples_csv": "d.csv"}"#, 0),
    ];
    let mut lines = Vec::new();
    for (tag, cmd, cfg, want_exit) in configs {
        let path: PathBuf = dir.join(format!("{tag}.json"));
        write(&path, cfg)?;
        let cfg_arg = path.to_string_lossy().to_string();
        let args = [cmd, "--config", cfg_arg.as_str()];
        let first = run_cli(dir, &args, 1, tag)?;
        let id_first = std::fs::read(dir.join("id.json")).ok();
        let second = run_cli(dir, &args, 4, tag)?;
        let again = run_cli(dir, &args, 1, &format!("{tag}-again"))?;
        if tag == "idcode" {
            let id_second = std::fs::read(dir.join("id.json")).ok();
            ensure(id_first == id_second, || "ID code files differ across thread counts".into())?;
        }
        for r in [&first, &second, &again] {
            ensure(r.payload_hash == r.recomputed_hash, || format!("{tag}: payload_hash mismatch"))?;
            if want_exit >= 0 {
                ensure(r.exit == want_exit, || format!("{tag}: exit {} (status {})", r.exit, r.status))?;
            }
        }
        ensure(first.payload_hash == second.payload_hash && first.payload_hash == again.payload_hash, || {
            format!("{tag}: payload differs across runs")
        })?;
        ensure(first.exit == second.exit, || format!("{tag}: exit status differs"))?;
        lines.push(tag);
    }
    Ok(format!("{} command runs, identical payload hashes under 1 and 4 threads", lines.len()))
}

fn report(index: usize, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(msg) if elapsed > limit => Err(format!("{msg}; took {elapsed:.1?}, limit {limit:?}")),
        other => other,
    };
    match outcome {
        Ok(msg) => {
            println!("PASS criterion {index}: {msg} [{:.2}s]", elapsed.as_secs_f64());
            true
        }
        Err(msg) => {
            println!("FAIL criterion {index}: {msg} [{:.2}s]", elapsed.as_secs_f64());
            false
        }
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= report(1, secs(10), criterion_1);
    ok &= report(2, secs(30), criterion_2);
    ok &= report(3, secs(60), criterion_3);
    let start = Instant::now();
    let built = proposition_code();
    let build_time = start.elapsed();
    match built {
        Ok(built) => {
            ok &= report(4, secs(120).saturating_sub(build_time), || criterion_4(&built));
            ok &= report(5, secs(60), || criterion_5(&built));
        }
        Err(e) => {
            println!("FAIL criterion 4: {e}");
            println!("FAIL criterion 5: no code from criterion 4");
            ok = false;
        }
    }
    ok &= report(6, secs(30), criterion_6);
    ok &= report(7, secs(5), criterion_7);
    ok &= report(8, secs(60), criterion_8);
    ok &= report(9, secs(120), criterion_9);
    if !ok {
        std::process::exit(1);
    }
}
