//! One function per subcommand. Each returns a JSON payload that depends only
//! on the config, the seed and the input files.

use std::path::{Path, PathBuf};

use qidlab_core::channel::{holevo_capacity, CapacityOptions};
use qidlab_core::family::{
    brute_force_max_family, build_family_greedy, johnson_bound, lemma_bound, verify_family,
    CandidateOrder,
};
use qidlab_core::format::{
    self, ChannelFile, CodeFile, FamilyFile, IdCodeFile, PomFile, Provenance,
};
use qidlab_core::idcode::{
    build_simultaneous_id_code, proposition_error_bounds, size_bound_proposition, verify_id_code,
    VerifyOptions,
};
use qidlab_core::quantum::von_neumann_entropy;
use qidlab_core::resolvability::{
    density_exponential_sums, id_separation_check, id_separation_check_with_pom,
    information_density_enumerate, mtype_count_bound, random_selection_resolve,
    sup_information_rate_estimate, DensitySample,
};
use qidlab_core::transmission::{
    build_code_exhaustive, build_code_random_coding, CodeSearch, RandomCodingParams,
};
use qidlab_core::{
    CqChannel, Error, FamilyParams, FiniteDistribution, Pom, QCode, Settings, SimQidCode,
    WordDistribution,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CodeMethod, InputSpec, LoadedConfig, OrderSpec, SubstitutePom};
use crate::report::{self, CliError, Done, InputHashes, TOOL_VERSION};

/// M values used by `resolvability` when the config gives no ladder.
const DEFAULT_LADDER: [u64; 5] = [16, 64, 256, 1024, 4096];
const DEFAULT_TRIALS: usize = 32;
const DEFAULT_DELTA: f64 = 0.05;
const DEFAULT_SEED: u64 = 0;

type CmdResult = Result<Done, CliError>;

struct Ctx<'a> {
    loaded: &'a LoadedConfig,
    inputs: &'a mut InputHashes,
}

fn stage<T>(name: &'static str, r: qidlab_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::core(name, e))
}

fn value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::core("report", Error::Format(e.to_string())))
}

fn missing(key: &str) -> CliError {
    CliError::core(
        "config",
        Error::InvalidParameter(format!("config key {key:?} is required")),
    )
}

fn need<T: Copy>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| missing(key))
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.loaded.config.seed.unwrap_or(DEFAULT_SEED)
    }

    fn read_json<T: DeserializeOwned>(&mut self, role: &'static str, path: &Path) -> Result<T, CliError> {
        let path = self.loaded.resolve(path);
        self.inputs.record(role, &path);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        format::from_json(&text).map_err(|e| CliError::core(role, e))
    }

    fn channel(&mut self) -> Result<CqChannel, CliError> {
        let path = self.loaded.config.channel.clone().ok_or_else(|| missing("channel"))?;
        let file: ChannelFile = self.read_json("channel", &path)?;
        stage("channel", file.to_channel())
    }

    fn n(&self) -> Result<usize, CliError> {
        let n = need(self.loaded.config.n, "n")?;
        if n == 0 {
            return Err(CliError::core(
                "config",
                Error::InvalidParameter("n must be at least 1".into()),
            ));
        }
        Ok(n)
    }

    /// The config's POM file, or the `n`-fold computational-basis POM.
    fn pom(&mut self, ch: &CqChannel, n: usize) -> Result<Pom, CliError> {
        match self.loaded.config.pom.clone() {
            Some(path) => {
                let file: PomFile = self.read_json("pom", &path)?;
                let pom = stage("pom", file.to_pom())?;
                let dim = stage("pom", ch.output_dim(n))?;
                if pom.dim() != dim {
                    return Err(CliError::core(
                        "pom",
                        Error::DimensionMismatch {
                            expected: dim,
                            found: pom.dim(),
                        },
                    ));
                }
                Ok(pom)
            }
            None => stage("pom", Pom::product_basis(ch.dim(), n)),
        }
    }

    /// The config's input distribution on `Aⁿ`, uniform by default.
    fn input(&self, ch: &CqChannel, n: usize) -> Result<WordDistribution, CliError> {
        let spec = self.loaded.config.input.clone().unwrap_or(InputSpec::Uniform);
        let p = match spec {
            InputSpec::Uniform => WordDistribution::uniform_all(ch.alphabet_size(), n),
            InputSpec::Iid { letter_masses } => {
                if letter_masses.len() != ch.alphabet_size() {
                    return Err(CliError::core(
                        "input",
                        Error::SizeMismatch(format!(
                            "{} letter masses for an alphabet of {}",
                            letter_masses.len(),
                            ch.alphabet_size()
                        )),
                    ));
                }
                FiniteDistribution::new(letter_masses).and_then(|d| WordDistribution::iid(&d, n))
            }
            InputSpec::Point { word } => Ok(WordDistribution::point(word)),
            InputSpec::Explicit { entries } => {
                WordDistribution::weighted(entries.into_iter().map(|e| (e.word, e.mass)).collect())
            }
        };
        let p = stage("input", p)?;
        if p.word_length() != n {
            return Err(CliError::core(
                "input",
                Error::InvalidParameter(format!(
                    "input words have length {} but n = {n}",
                    p.word_length()
                )),
            ));
        }
        let a = ch.alphabet_size() as u32;
        for i in 0..p.len() {
            if let Some(&letter) = p.word(i).letters().iter().find(|&&l| l == 0 || l > a) {
                return Err(CliError::core(
                    "input",
                    Error::BadLetter {
                        letter,
                        alphabet_size: a as usize,
                    },
                ));
            }
        }
        Ok(p)
    }

    fn provenance(&self, builder: &str, seed: Option<u64>) -> Provenance {
        Provenance {
            builder: builder.to_string(),
            seed,
            settings_hash: report::settings_hash(Settings::global()),
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    fn write_json<T: Serialize>(&self, path: &Option<PathBuf>, value: &T) -> Result<(), CliError> {
        let Some(path) = path else { return Ok(()) };
        let path = self.loaded.resolve(path);
        let text = stage("output", format::to_json(value))?;
        std::fs::write(&path, text + "\n")
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn run(command: &str, loaded: &LoadedConfig, inputs: &mut InputHashes) -> CmdResult {
    let mut ctx = Ctx { loaded, inputs };
    match command {
        "validate-channel" => validate_channel(&mut ctx),
        "capacity" => capacity(&mut ctx),
        "build-tx-code" => build_tx_code(&mut ctx),
        "build-family" => build_family(&mut ctx),
        "build-id-code" => build_id_code(&mut ctx),
        "verify-id-code" => verify_id(&mut ctx),
        "resolvability" => resolvability(&mut ctx),
        "separation" => separation(&mut ctx),
        "info-density" => info_density(&mut ctx),
        other => Err(CliError::usage(format!("unknown command {other:?}"))),
    }
}

fn ok(summary: String, payload: Value) -> CmdResult {
    Ok(Done {
        summary,
        exit_code: 0,
        payload,
    })
}

fn validate_channel(ctx: &mut Ctx) -> CmdResult {
    let ch = ctx.channel()?;
    let signals: Vec<Value> = ch
        .signals()
        .iter()
        .map(|s| {
            json!({
                "eigenvalues": s.eigenvalues(),
                "entropy_bits": von_neumann_entropy(s),
            })
        })
        .collect();
    ok(
        format!("valid channel, alphabet {} in dimension {}", ch.alphabet_size(), ch.dim()),
        json!({
            "alphabet_size": ch.alphabet_size(),
            "dim": ch.dim(),
            "signals": signals,
        }),
    )
}

fn capacity(ctx: &mut Ctx) -> CmdResult {
    let ch = ctx.channel()?;
    let opts = CapacityOptions {
        mesh: ctx.loaded.config.mesh,
        ..CapacityOptions::default()
    };
    let result = stage("capacity", holevo_capacity(&ch, &opts))?;
    ok(
        format!("C ≥ {:.9} bits (mesh {})", result.capacity, result.mesh),
        value(&result)?,
    )
}

fn epsilon_target(ctx: &Ctx) -> Result<f64, CliError> {
    let cfg = &ctx.loaded.config;
    cfg.epsilon.or(cfg.lambda).ok_or_else(|| missing("epsilon"))
}

fn build_tx_code(ctx: &mut Ctx) -> CmdResult {
    let ch = ctx.channel()?;
    let n = ctx.n()?;
    let cfg = &ctx.loaded.config;
    match cfg.method.unwrap_or_default() {
        CodeMethod::Exhaustive => {
            let m = need(cfg.m, "m")?;
            let target = epsilon_target(ctx)?;
            let search = stage("code", build_code_exhaustive(&ch, n, m, target))?;
            match search {
                CodeSearch::Found {
                    code,
                    verification,
                    examined,
                } => {
                    let file = CodeFile::from_code(&code, Some(ctx.provenance("exhaustive", None)));
                    ctx.write_json(&ctx.loaded.config.code_out, &file)?;
                    ok(
                        format!("found an ({n}, {m}) code with ε̂ = {:e}", verification.epsilon_hat),
                        json!({
                            "method": "exhaustive",
                            "found": true,
                            "n": n,
                            "m": m,
                            "epsilon_target": target,
                            "examined": examined,
                            "epsilon_hat": verification.epsilon_hat,
                            "successes": verification.successes,
                            "codewords": code.codewords,
                        }),
                    )
                }
                CodeSearch::NotFound {
                    best_epsilon,
                    examined,
                } => Ok(Done {
                    summary: format!("no ({n}, {m}) code reaches ε = {target}"),
                    exit_code: 1,
                    payload: json!({
                        "method": "exhaustive",
                        "found": false,
                        "n": n,
                        "m": m,
                        "epsilon_target": target,
                        "examined": examined,
                        "best_epsilon": best_epsilon,
                    }),
                }),
            }
        }
        CodeMethod::RandomCoding => {
            let params = RandomCodingParams {
                rate: need(cfg.rate, "rate")?,
                gamma: need(cfg.gamma, "gamma")?,
                alpha: need(cfg.alpha, "alpha")?,
                seed: ctx.seed(),
            };
            let pom = ctx.pom(&ch, n)?;
            let p = ctx.input(&ch, n)?;
            let out = stage("code", build_code_random_coding(&ch, n, &pom, &p, &params))?;
            let attempts: Vec<f64> = out.attempts.iter().map(|a| a.epsilon_hat).collect();
            let mut payload = json!({
                "method": "random_coding",
                "n": n,
                "size": out.size,
                "threshold": out.threshold,
                "good_set_size": out.good_set.len(),
                "good_set_mass": out.good_set_mass,
                "attempt_epsilons": attempts,
                "seed": params.seed,
            });
            match &out.best {
                Some((index, code, verification)) => {
                    let file = CodeFile::from_code(code, Some(ctx.provenance("random_coding", Some(params.seed))));
                    ctx.write_json(&ctx.loaded.config.code_out, &file)?;
                    payload["found"] = json!(true);
                    payload["best_attempt"] = json!(index);
                    payload["epsilon_hat"] = json!(verification.epsilon_hat);
                    payload["successes"] = value(&verification.successes)?;
                    payload["codewords"] = value(&code.codewords)?;
                    ok(
                        format!("random coding: M = {}, best ε̂ = {:e}", out.size, verification.epsilon_hat),
                        payload,
                    )
                }
                None => {
                    payload["found"] = json!(false);
                    Ok(Done {
                        summary: format!(
                            "good set has {} words, fewer than M = {}",
                            out.good_set.len(),
                            out.size
                        ),
                        exit_code: 1,
                        payload,
                    })
                }
            }
        }
    }
}

fn family_params(ctx: &Ctx, ground: usize, lambda: f64) -> Result<FamilyParams, CliError> {
    let cfg = &ctx.loaded.config;
    let params = match (cfg.set_size, cfg.epsilon) {
        (Some(a), _) => FamilyParams::with_set_size(ground, a, lambda),
        (None, Some(eps)) => FamilyParams::from_epsilon(ground, eps, lambda),
        (None, None) => return Err(missing("set_size")),
    };
    let params = stage("family", params)?;
    if cfg.enforce_precondition.unwrap_or(false) && !params.precondition_holds() {
        return Err(CliError::core(
            "family",
            Error::PrerequisiteNotVerified(format!(
                "λ log₂(1/ε − 1) = {} does not exceed 2",
                params.precondition_value()
            )),
        ));
    }
    Ok(params)
}

fn candidate_order(ctx: &Ctx) -> CandidateOrder {
    match ctx.loaded.config.order.unwrap_or_default() {
        OrderSpec::Lexicographic => CandidateOrder::Lexicographic,
        OrderSpec::SeededRandom => CandidateOrder::SeededRandom { seed: ctx.seed() },
    }
}

fn family_summary(params: &FamilyParams) -> Result<Value, CliError> {
    let t = params.intersection_threshold() as u64;
    Ok(json!({
        "params": value(params)?,
        "intersection_threshold": t,
        "precondition_value": params.precondition_value(),
        "precondition_ok": params.precondition_holds(),
        "lemma_bound": value(&lemma_bound(params))?,
        "johnson_bound": johnson_bound(params.ground_size as u64, params.set_size as u64, t),
    }))
}

fn build_family(ctx: &mut Ctx) -> CmdResult {
    let cfg = &ctx.loaded.config;
    let m = need(cfg.m, "m")?;
    let lambda = need(cfg.lambda, "lambda")?;
    let params = family_params(ctx, m, lambda)?;
    let order = candidate_order(ctx);
    let outcome = build_family_greedy(&params, cfg.target, order);
    let check = verify_family(&outcome.family);
    if !check.ok {
        return Err(CliError::core(
            "family",
            Error::InvariantViolation(format!(
                "greedy output fails verification: {}",
                check.problem.clone().unwrap_or_default()
            )),
        ));
    }
    let exact = if cfg.brute_force.unwrap_or(false) {
        let best = stage(
            "brute_force",
            brute_force_max_family(m, params.set_size, lambda),
        )?;
        if (best as usize) < outcome.family.len() {
            return Err(CliError::core(
                "brute_force",
                Error::InvariantViolation(format!(
                    "exact maximum {best} below greedy size {}",
                    outcome.family.len()
                )),
            ));
        }
        Some(best)
    } else {
        None
    };
    let seed = match order {
        CandidateOrder::SeededRandom { seed } => Some(seed),
        CandidateOrder::Lexicographic => None,
    };
    let file = FamilyFile {
        family: outcome.family.clone(),
        provenance: Some(ctx.provenance("greedy", seed)),
    };
    ctx.write_json(&ctx.loaded.config.family_out, &file)?;

    let mut payload = family_summary(&params)?;
    payload["order"] = value(&order)?;
    payload["size"] = json!(outcome.family.len());
    payload["certified_maximal"] = json!(outcome.certified_maximal);
    payload["target_reached"] = json!(outcome.target_reached);
    payload["candidates_scanned"] = json!(outcome.candidates_scanned);
    payload["max_intersection"] = json!(check.max_intersection);
    payload["brute_force_max"] = json!(exact);
    payload["sets"] = value(&outcome.family.sets)?;
    ok(
        format!(
            "family of {} sets of size {} in [{}]",
            outcome.family.len(),
            params.set_size,
            m
        ),
        payload,
    )
}

/// The transmission code for `build-id-code`: the config's code file, or an
/// exhaustive search at error target `λ`.
fn id_code_base(ctx: &mut Ctx, ch: &CqChannel, lambda: f64) -> Result<(QCode, Value), CliError> {
    if let Some(path) = ctx.loaded.config.code_file.clone() {
        let file: CodeFile = ctx.read_json("code_file", &path)?;
        let code = stage("code_file", file.to_code())?;
        return Ok((code, json!({"source": "file", "provenance": value(&file.provenance)?})));
    }
    let n = ctx.n()?;
    let m = need(ctx.loaded.config.m, "m")?;
    match stage("code", build_code_exhaustive(ch, n, m, lambda))? {
        CodeSearch::Found { code, examined, .. } => {
            Ok((code, json!({"source": "exhaustive", "examined": examined})))
        }
        CodeSearch::NotFound { best_epsilon, .. } => Err(CliError::core(
            "code",
            Error::PrerequisiteNotVerified(format!(
                "no ({n}, {m}) code reaches ε = {lambda}; best found {best_epsilon:?}"
            )),
        )),
    }
}

fn error_pair(ctx: &Ctx) -> Result<(f64, f64), CliError> {
    let cfg = &ctx.loaded.config;
    Ok((need(cfg.lambda1, "lambda1")?, need(cfg.lambda2, "lambda2")?))
}

fn verify_options(ctx: &Ctx) -> VerifyOptions {
    let cfg = &ctx.loaded.config;
    VerifyOptions {
        keep_matrix: cfg.keep_matrix.unwrap_or(false),
        sampled_pairs: cfg.sampled_pairs,
        seed: ctx.seed(),
    }
}

fn build_id_code(ctx: &mut Ctx) -> CmdResult {
    let ch = ctx.channel()?;
    let (l1, l2) = error_pair(ctx)?;
    let lambda = l1.min(l2 / 2.0);
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(CliError::core(
            "config",
            Error::InvalidParameter(format!("λ = min(λ₁, λ₂/2) = {lambda} outside (0, 1)")),
        ));
    }
    let (code, code_info) = id_code_base(ctx, &ch, lambda)?;
    let tx = stage("code", qidlab_core::transmission::verify_qcode(&ch, &code))?;
    let m = code.size();
    let params = family_params(ctx, m, lambda)?;
    let order = candidate_order(ctx);
    let greedy = build_family_greedy(&params, ctx.loaded.config.target, order);
    let check = verify_family(&greedy.family);
    if !check.ok {
        return Err(CliError::core(
            "family",
            Error::InvariantViolation(check.problem.unwrap_or_default()),
        ));
    }
    let id = stage("id_code", build_simultaneous_id_code(&code, &greedy.family))?;
    let opts = verify_options(ctx);
    let ver = stage("verify", verify_id_code(&ch, &id, &opts))?;

    let (b1, b2) = proposition_error_bounds(lambda);
    let t = Settings::global().tolerances.validation;
    let code_ok = tx.epsilon_hat <= lambda + t;
    let bounds_met = ver.lambda1_hat <= b1 + t && (ver.sampled || ver.lambda2_hat <= b2 + t);
    if code_ok && !bounds_met {
        return Err(CliError::core(
            "verify",
            Error::InvariantViolation(format!(
                "λ̂₁ = {}, λ̂₂ = {} exceed the guaranteed ({b1}, {b2})",
                ver.lambda1_hat, ver.lambda2_hat
            )),
        ));
    }

    let file = IdCodeFile::from_code(&id, Some(ctx.provenance("simultaneous", Some(ctx.seed()))));
    ctx.write_json(&ctx.loaded.config.id_code_out, &file)?;

    let size_bound = ctx.loaded.config.capacity_estimate.map(|c0| {
        size_bound_proposition(
            code.n,
            c0,
            ctx.loaded.config.size_delta.unwrap_or(0.0),
            params.epsilon,
        )
    });
    let mut family = family_summary(&params)?;
    family["size"] = json!(greedy.family.len());
    family["certified_maximal"] = json!(greedy.certified_maximal);
    family["max_intersection"] = json!(check.max_intersection);
    let n_messages = id.len();
    let payload = json!({
        "lambda": lambda,
        "lambda1": l1,
        "lambda2": l2,
        "code": {
            "info": code_info,
            "n": code.n,
            "m": m,
            "epsilon_hat": tx.epsilon_hat,
            "codewords": code.codewords,
        },
        "family": family,
        "messages": n_messages,
        "messages_exceed_codewords": n_messages > m,
        "verification": value(&ver)?,
        "proposition_bounds": [b1, b2],
        "bounds_met": bounds_met,
        "size_bound": value(&size_bound)?,
    });
    ok(
        format!(
            "N = {n_messages} messages from M = {m} codewords; λ̂₁ = {:e}, λ̂₂ = {:e}",
            ver.lambda1_hat, ver.lambda2_hat
        ),
        payload,
    )
}

fn load_id_code(ctx: &mut Ctx) -> Result<(SimQidCode, Value), CliError> {
    let path = ctx
        .loaded
        .config
        .id_code_file
        .clone()
        .ok_or_else(|| missing("id_code_file"))?;
    let file: IdCodeFile = ctx.read_json("id_code_file", &path)?;
    let code = stage("id_code_file", file.to_code())?;
    Ok((code, value(&file.provenance)?))
}

fn verify_id(ctx: &mut Ctx) -> CmdResult {
    let ch = ctx.channel()?;
    let (code, provenance) = load_id_code(ctx)?;
    let ver = stage("verify", verify_id_code(&ch, &code, &verify_options(ctx)))?;
    let cfg = &ctx.loaded.config;
    let mut payload = json!({
        "messages": code.len(),
        "provenance": provenance,
        "verification": value(&ver)?,
    });
    let mut exit_code = 0;
    if let (Some(l1), Some(l2)) = (cfg.lambda1, cfg.lambda2) {
        let t = Settings::global().tolerances.validation;
        let meets = ver.lambda1_hat <= l1 + t && ver.lambda2_hat <= l2 + t;
        payload["meets"] = json!(meets);
        if !meets {
            exit_code = 1;
        }
    }
    Ok(Done {
        summary: format!(
            "{} messages; λ̂₁ = {:e}, λ̂₂ = {:e}",
            code.len(),
            ver.lambda1_hat,
            ver.lambda2_hat
        ),
        exit_code,
        payload,
    })
}

fn separation(ctx: &mut Ctx) -> CmdResult {
    let ch = ctx.channel()?;
    let (code, provenance) = load_id_code(ctx)?;
    let (l1, l2) = error_pair(ctx)?;
    let opts = VerifyOptions {
        keep_matrix: false,
        sampled_pairs: None,
        seed: ctx.seed(),
    };
    let ver = stage("verify", verify_id_code(&ch, &code, &opts))?;
    let (report, substituted) = match ctx.loaded.config.substitute_pom {
        None => (stage("separation", id_separation_check(&ch, &code, &ver, l1, l2))?, None),
        Some(SubstitutePom::Trivial) => {
            let pom = Pom::trivial(code.base_pom.dim());
            (
                stage(
                    "separation",
                    id_separation_check_with_pom(&ch, &code, &ver, l1, l2, &pom),
                )?,
                Some("trivial"),
            )
        }
    };
    let payload = json!({
        "messages": code.len(),
        "provenance": provenance,
        "lambda1": l1,
        "lambda2": l2,
        "lambda1_hat": ver.lambda1_hat,
        "lambda2_hat": ver.lambda2_hat,
        "substituted_pom": substituted,
        "separation": value(&report)?,
    });
    Ok(Done {
        summary: format!(
            "min distance {:.12} vs threshold {:.12} ({})",
            report.min_distance,
            report.threshold,
            if report.ok { "holds" } else { "fails" }
        ),
        exit_code: if report.ok { 0 } else { 1 },
        payload,
    })
}

fn density_inputs(ctx: &mut Ctx) -> Result<(CqChannel, usize, Pom, WordDistribution), CliError> {
    let ch = ctx.channel()?;
    let n = ctx.n()?;
    let pom = ctx.pom(&ch, n)?;
    let p = ctx.input(&ch, n)?;
    Ok((ch, n, pom, p))
}

fn delta(ctx: &Ctx) -> f64 {
    ctx.loaded.config.delta.unwrap_or(DEFAULT_DELTA)
}

fn quantile_sweep(ctx: &Ctx, samples: &[DensitySample]) -> Result<Value, CliError> {
    let Some(deltas) = &ctx.loaded.config.deltas else {
        return Ok(Value::Null);
    };
    let mut rows = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let q = stage("quantile", sup_information_rate_estimate(samples, d))?;
        rows.push(json!({"delta": d, "estimate": q}));
    }
    Ok(Value::Array(rows))
}

fn resolvability(ctx: &mut Ctx) -> CmdResult {
    let (ch, n, pom, p) = density_inputs(ctx)?;
    let samples = stage("density", information_density_enumerate(&ch, &p, &pom))?;
    let d = delta(ctx);
    let estimate = stage("quantile", sup_information_rate_estimate(&samples, d))?;
    let cfg = &ctx.loaded.config;
    let ladder = cfg.ladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec());
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = ctx.seed();
    let mut rows = Vec::with_capacity(ladder.len());
    let mut means = Vec::with_capacity(ladder.len());
    for &m in &ladder {
        let r = stage("resolve", random_selection_resolve(&ch, &p, &pom, m, trials, seed))?;
        means.push(r.mean);
        rows.push(json!({
            "m": m,
            "mean": r.mean,
            "min": r.min,
            "max": r.max,
            "std_error": r.std_error,
            "rate": r.rate,
            "max_resolution": r.resolutions.iter().max(),
            "distances": r.distances,
            "type_count_bound": mtype_count_bound(ch.alphabet_size() as u64, n as u64, m)
                .to_str_radix(10),
        }));
    }
    let nonincreasing = means.windows(2).all(|w| w[1] <= w[0]);
    let payload = json!({
        "n": n,
        "delta": d,
        "sup_information_estimate": estimate,
        "quantile_sweep": quantile_sweep(ctx, &samples)?,
        "trials": trials,
        "seed": seed,
        "ladder": rows,
        "mean_nonincreasing": nonincreasing,
    });
    ok(
        format!(
            "Ī estimate {estimate:.6} at δ = {d}; mean d_E at M = {} is {:.6}",
            ladder.last().copied().unwrap_or(0),
            means.last().copied().unwrap_or(f64::NAN)
        ),
        payload,
    )
}

fn write_samples_csv(path: &Path, samples: &[DensitySample]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::io(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["word", "outcome", "density", "mass", "input_mass"])
        .map_err(io)?;
    for s in samples {
        w.write_record([
            s.word.to_string(),
            s.outcome.to_string(),
            format!("{:.16e}", s.density),
            format!("{:.16e}", s.mass),
            format!("{:.16e}", s.input_mass),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn info_density(ctx: &mut Ctx) -> CmdResult {
    let (ch, n, pom, p) = density_inputs(ctx)?;
    let samples = stage("density", information_density_enumerate(&ch, &p, &pom))?;
    let sums = density_exponential_sums(&samples, n);
    let max_deviation = sums.values().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    let t = Settings::global().tolerances.algebra;
    if max_deviation > t {
        return Err(CliError::core(
            "density",
            Error::InvariantViolation(format!(
                "Σ_x P(x) 2^(n i(x;y)) deviates from 1 by {max_deviation:e}"
            )),
        ));
    }
    let d = delta(ctx);
    let estimate = stage("quantile", sup_information_rate_estimate(&samples, d))?;
    if let Some(path) = &ctx.loaded.config.samples_csv {
        write_samples_csv(&ctx.loaded.resolve(path), &samples)?;
    }
    let densities = samples.iter().map(|s| s.density);
    let min = densities.clone().fold(f64::INFINITY, f64::min);
    let max = densities.fold(f64::NEG_INFINITY, f64::max);
    let mean: f64 = samples.iter().map(|s| s.mass * s.density).sum();
    let sums: Vec<Value> = sums
        .iter()
        .map(|(y, s)| json!({"outcome": y, "sum": s}))
        .collect();
    ok(
        format!("{} density samples; Ī estimate {estimate:.6} at δ = {d}", samples.len()),
        json!({
            "n": n,
            "samples": samples.len(),
            "min_density": min,
            "max_density": max,
            "mean_density": mean,
            "exponential_sums": sums,
            "max_sum_deviation": max_deviation,
            "delta": d,
            "sup_information_estimate": estimate,
            "quantile_sweep": quantile_sweep(ctx, &samples)?,
        }),
    )
}
