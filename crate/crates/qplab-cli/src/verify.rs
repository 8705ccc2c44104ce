//! Verifier subcommands: qor, lhwp, lhwm, amplify, stod, identify.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use qplab::io::{CircuitFile, InstanceFile, LoadedState, QorFile, StateFile};
use qplab::qcore::{haar_state, min_eigenpair, rng_for, PureState};
use qplab::verify::stod::OracleRegion;
use qplab::verify::{
    amplify_parallel, bernoulli_verifier, identify_exact, identify_state, lhwm_exact, lhwm_verify, lhwp_exact, lhwp_verify,
    qor_accept_exact, qor_run, search_to_decision, CandidateSet, DontCare, LhwmConfig, LhwmWitness, PrefixOracle, Verdict,
    VerdictReport, Witness,
};
use qplab::QError;

use crate::out::{read_json, to_value};
use crate::{CliError, CliResult, Ctx};

fn load_state(path: &PathBuf) -> CliResult<LoadedState> {
    Ok(read_json::<StateFile>(path)?.load()?)
}

fn load_pure(path: &PathBuf) -> CliResult<PureState> {
    match load_state(path)? {
        LoadedState::Pure(p) => Ok(p),
        LoadedState::Mixed(_) => Err(CliError::Q(QError::Invalid(format!("{} holds a mixed state", path.display())))),
    }
}

fn per_trial_seed(seed: u64, i: usize) -> u64 {
    rng_for(seed, (1 << 33) | i as u64).random()
}

/// Bernoulli(p) draws split across the pool.
fn bernoulli_hits(ctx: &Ctx, p: f64, trials: usize) -> usize {
    ctx.pool(|| (0..trials).into_par_iter().filter(|&i| rng_for(per_trial_seed(ctx.seed, i), 0).random::<f64>() < p).count())
}

#[derive(Args, Debug, Serialize)]
pub struct QorArgs {
    /// Instance file written by `gen qor`.
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    pub eta: f64,
    /// Defaults to 1/(64·2^m).
    #[arg(long)]
    pub delta: Option<f64>,
}

pub fn qor(args: &QorArgs, ctx: &Ctx) -> CliResult<Value> {
    let file: QorFile = read_json(&args.instance)?;
    let (inst, rho) = file.load()?;
    let delta = args.delta.unwrap_or(1.0 / (64.0 * inst.n_b() as f64));
    let pv = inst.promise_value(&rho)?;
    match file.case.as_deref() {
        Some("yes") if pv < args.eta - ctx.tol => {
            return Err(QError::Promise(format!("yes-instance with max Tr(Λ(ρ⊗σ)) = {pv} below η = {}", args.eta)).into())
        }
        Some("no") if pv > delta + ctx.tol => {
            return Err(QError::Promise(format!("no-instance with max Tr(Λ(ρ⊗σ)) = {pv} above δ = {delta}")).into())
        }
        _ => {}
    }
    let exact = qor_run(&rho, &inst, args.eta, delta)?;
    let report = if ctx.sampled() {
        let (p, _) = qor_accept_exact(&rho, &inst, args.eta)?;
        let trials = ctx.trials_or(10_000);
        let hits = bernoulli_hits(ctx, p, trials);
        let thr = args.eta * args.eta / 7.0;
        let mut r = VerdictReport::sampled(Verdict::from_bool(hits as f64 >= thr * trials as f64), hits, trials, ctx.seed);
        r.stats = exact.stats.clone();
        r
    } else {
        exact
    };
    Ok(json!({ "case": file.case, "eta": args.eta, "delta": delta, "report": to_value(&report) }))
}

#[derive(Args, Debug, Serialize)]
pub struct LhwpArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Pure input state ψ.
    #[arg(long)]
    pub input: PathBuf,
    /// Witness state; the ground state of H_ψ when absent.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long, default_value_t = 400)]
    pub rounds: usize,
}

pub fn lhwp(args: &LhwpArgs, ctx: &Ctx) -> CliResult<Value> {
    let inst = read_json::<InstanceFile>(&args.instance)?.to_instance()?;
    inst.validate()?;
    let psi = load_pure(&args.input)?;
    let witness = match &args.witness {
        Some(p) => load_state(p)?,
        None => LoadedState::Pure(min_eigenpair(&inst.assemble(&psi)?)?.1),
    };
    let w = match &witness {
        LoadedState::Pure(s) => Witness::Pure(s),
        LoadedState::Mixed(r) => Witness::Mixed(r),
    };
    let exact = lhwp_exact(&inst, &psi, w)?;
    let report = if ctx.sampled() {
        let r = lhwp_verify(&inst, &psi, w, args.rounds, ctx.seed)?;
        let trials = ctx.trials_or(1);
        if trials > 1 {
            let hits = ctx.pool(|| {
                (0..trials)
                    .into_par_iter()
                    .map(|i| lhwp_verify(&inst, &psi, w, args.rounds, per_trial_seed(ctx.seed, i)).map(|r| r.verdict.is_accept()))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            r.with_stat("accept_rate", hits.iter().filter(|&&b| b).count() as f64 / trials as f64)
        } else {
            r
        }
    } else {
        exact.clone()
    };
    Ok(json!({
        "a": inst.a,
        "b": inst.b,
        "p": inst.p,
        "exact_estimate": exact.expectation,
        "report": to_value(&report),
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct LhwmArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Mixed (or pure) input state ρ.
    #[arg(long)]
    pub input: PathBuf,
    /// Copies of ρ in the input register.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// Circuit witness preparing the eigenbasis.
    #[arg(long)]
    pub circuit: PathBuf,
    /// State witness φ.
    #[arg(long)]
    pub phi: PathBuf,
    /// Claimed energy α.
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 200)]
    pub rounds: usize,
    #[arg(long, default_value_t = 400)]
    pub block: usize,
}

pub fn lhwm(args: &LhwmArgs, ctx: &Ctx) -> CliResult<Value> {
    let inst = read_json::<InstanceFile>(&args.instance)?.to_instance()?;
    inst.validate()?;
    let rho = load_state(&args.input)?.density();
    let circuit = read_json::<CircuitFile>(&args.circuit)?.to_circuit()?;
    let phi = load_pure(&args.phi)?;
    let w = LhwmWitness { circuit: &circuit, phi: &phi, alpha: args.alpha };
    let cfg = LhwmConfig { rounds: args.rounds, block: args.block, ..LhwmConfig::default() };
    let report = if ctx.sampled() {
        lhwm_verify(&inst, &rho, args.copies, w, &cfg, ctx.seed)?
    } else {
        lhwm_exact(&inst, &rho, args.copies, w, &cfg)?
    };
    Ok(json!({ "a": inst.a, "b": inst.b, "p": inst.p, "report": to_value(&report) }))
}

fn parse_probs(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("probability {x:?}: {e}"))))
        .collect()
}

#[derive(Args, Debug, Serialize)]
pub struct AmplifyArgs {
    /// Acceptance probability per classical witness, comma separated (2^k entries).
    #[arg(long)]
    pub probs: String,
    /// Classical witness given to every run.
    #[arg(long, default_value_t = 0)]
    pub witness: usize,
    #[arg(long)]
    pub a: f64,
    /// Base gap is 1/p.
    #[arg(long)]
    pub p: f64,
    /// Parallel runs.
    #[arg(long, default_value_t = 64)]
    pub s: usize,
}

pub fn amplify(args: &AmplifyArgs, ctx: &Ctx) -> CliResult<Value> {
    let probs = parse_probs(&args.probs)?;
    let v = bernoulli_verifier(&probs)?;
    if args.witness >= probs.len() {
        return Err(CliError::Usage(format!("witness {} out of range", args.witness)));
    }
    let amp = amplify_parallel(&v, &PureState::zero(0), args.a, args.p, args.s)?;
    let k = v.witness.len();
    let sigma = PureState::basis(k, args.witness).density();
    let ws = vec![sigma; args.s];
    let exact = amp.accept_product(&ws)?;
    let report = if ctx.sampled() {
        amp.sample_product(&ws, ctx.trials_or(10_000), ctx.seed)?
    } else {
        VerdictReport::exact(Verdict::from_bool(exact >= 0.5), exact)
    };
    Ok(json!({
        "base_accept": probs[args.witness],
        "threshold": amp.threshold(),
        "accept_product": exact,
        "iid_bound": amp.iid_bound(),
        "report": to_value(&report),
    }))
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DontCareArg {
    Yes,
    No,
    Random,
}

#[derive(Args, Debug, Serialize)]
pub struct StodArgs {
    /// Acceptance table, comma separated (2^n entries).
    #[arg(long, conflicts_with = "bits")]
    pub probs: Option<String>,
    /// Random verifier with this many witness bits: one witness accepts with
    /// probability `a`, the rest uniformly in [0, a).
    #[arg(long)]
    pub bits: Option<usize>,
    #[arg(long, default_value_t = 0.9)]
    pub a: f64,
    #[arg(long, default_value_t = 0.3)]
    pub slack: f64,
    #[arg(long, value_enum, default_value_t = DontCareArg::Random)]
    pub dont_care: DontCareArg,
}

fn random_table(bits: usize, a: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, 0);
    let n = 1usize << bits;
    let good = rng.random_range(0..n);
    (0..n).map(|w| if w == good { a } else { rng.random::<f64>() * a }).collect()
}

pub fn stod(args: &StodArgs, ctx: &Ctx) -> CliResult<Value> {
    let table = match (&args.probs, args.bits) {
        (Some(p), None) => parse_probs(p)?,
        (None, Some(b)) => {
            if b > 16 {
                return Err(CliError::Usage(format!("{b} witness bits exceeds 16")));
            }
            random_table(b, args.a, ctx.seed)
        }
        _ => return Err(CliError::Usage("pass exactly one of --probs, --bits".into())),
    };
    let dc = match args.dont_care {
        DontCareArg::Yes => DontCare::Yes,
        DontCareArg::No => DontCare::No,
        DontCareArg::Random => DontCare::random(ctx.seed),
    };
    let mut oracle = PrefixOracle::new(table, args.a, args.slack, dc)?;
    let r = search_to_decision(&mut oracle)?;
    let bound = args.a - args.slack;
    let count = |x: OracleRegion| r.regions.iter().filter(|&&g| g == x).count();
    Ok(json!({
        "witness": r.witness,
        "bits": r.bits(),
        "accept": r.accept,
        "bound": bound,
        "pass": r.accept >= bound - ctx.tol,
        "good": r.good,
        "queries": r.regions.len(),
        "yes_queries": count(OracleRegion::Yes),
        "no_queries": count(OracleRegion::No),
        "dont_care_queries": count(OracleRegion::DontCare),
    }))
}

#[derive(Args, Debug, Serialize)]
pub struct IdentifyArgs {
    /// Qubits per candidate.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Number of seeded Haar candidates.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    /// Per-test error budget ε.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Index of the candidate given as input.
    #[arg(long, default_value_t = 0)]
    pub truth: usize,
}

pub fn identify(args: &IdentifyArgs, ctx: &Ctx) -> CliResult<Value> {
    let mut rng = rng_for(ctx.seed, 0);
    let cands = (0..args.count).map(|i| Ok((i, haar_state(args.n, &mut rng)?))).collect::<Result<Vec<_>, QError>>()?;
    let set = CandidateSet::new(cands, args.eps)?;
    if args.truth >= set.len() {
        return Err(CliError::Usage(format!("truth {} out of range", args.truth)));
    }
    let ex = identify_exact(&set, args.truth)?;
    let report = if ctx.sampled() {
        let trials = ctx.trials_or(1000);
        let psi = &set.states[args.truth];
        let found = ctx.pool(|| {
            (0..trials)
                .into_par_iter()
                .map(|i| identify_state(&set, psi, per_trial_seed(ctx.seed, i)))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let hits = found.iter().filter(|&&l| l == set.labels[args.truth]).count();
        VerdictReport::sampled(Verdict::from_bool(2 * hits >= trials), hits, trials, ctx.seed)
    } else {
        VerdictReport::exact(Verdict::from_bool(ex.success >= 0.5), ex.success)
    };
    Ok(json!({
        "candidates": set.len(),
        "success_exact": ex.success,
        "union_bound": ex.union_bound(),
        "report": to_value(&report),
    }))
}
