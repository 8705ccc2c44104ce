//! `qplab protocol <name>`: built-in yes/no inputs or a state file.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use qplab::io::{LoadedState, StateFile};
use qplab::proto::{
    coqsdwp_accept_exact, coqsdwp_protocol, efi_accept_exact, efi_protocol, max_entangled_protocol, maxent_round_pass,
    mixedness_accept_exact, mixedness_protocol, optimal_cheat, public_coin_accept_exact, public_coin_qsd, EfiPair, ProtocolTranscript,
    ProverStrategy, Purified, QsdInstance,
};
use qplab::qcore::linalg::{cr, CMat, CVec};
use qplab::qcore::{rng_for, DensityMatrix, GateCircuit, GateKind, PureState};
use qplab::{QError, Result};

use crate::out::{read_json, to_value, write_json};
use crate::{CliError, CliResult, Ctx};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Name {
    Mixedness,
    Maxent,
    Coqsdwp,
    Publiccoin,
    Efi,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProverArg {
    Honest,
    BestResponse,
    Identity,
    Constant0,
    Constant1,
}

impl ProverArg {
    fn strategy(self) -> ProverStrategy {
        match self {
            ProverArg::Honest => ProverStrategy::honest(),
            ProverArg::BestResponse => ProverStrategy::best_response(),
            ProverArg::Identity => ProverStrategy::identity(),
            ProverArg::Constant0 => ProverStrategy::constant(false),
            ProverArg::Constant1 => ProverStrategy::constant(true),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ProtocolArgs {
    #[arg(value_enum)]
    pub name: Name,
    /// Use the built-in no-case input.
    #[arg(long)]
    pub no_case: bool,
    /// Rounds (mixedness, maxent, efi).
    #[arg(long, default_value_t = 16)]
    pub t: usize,
    /// Input state file (mixedness: ρ_in; maxent: φ_in on 2λ qubits).
    #[arg(long, conflicts_with = "no_case")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ProverArg::Honest)]
    pub prover: ProverArg,
    /// Writes the transcript of the run with the base seed.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}

/// cos θ|00⟩ + sin θ|11⟩.
fn schmidt(theta: f64) -> PureState {
    let mut v = CVec::zeros(4);
    v[0] = cr(theta.cos());
    v[3] = cr(theta.sin());
    PureState::new(2, v).expect("normalized")
}

fn diag(p: f64) -> DensityMatrix {
    DensityMatrix::new(1, CMat::from_row_slice(2, 2, &[cr(p), cr(0.0), cr(0.0), cr(1.0 - p)])).expect("density")
}

enum Input {
    Mixed(DensityMatrix),
    Pure(PureState),
    Qsd(QsdInstance),
    Efi(EfiPair, DensityMatrix, DensityMatrix),
}

fn builtin(name: Name, no: bool) -> Result<Input> {
    Ok(match name {
        Name::Mixedness => Input::Mixed(if no { DensityMatrix::maximally_mixed(1) } else { PureState::zero(1).density() }),
        // TD ½ from the nearest maximally entangled state.
        Name::Maxent => Input::Pure(if no { schmidt(0.5 * 0.5f64.asin()) } else { PureState::epr(1) }),
        Name::Coqsdwp | Name::Publiccoin => {
            let q0 = GateCircuit::new(1);
            let q1 = if no { GateCircuit::new(1).with(GateKind::X, &[0]) } else { GateCircuit::new(1) };
            Input::Qsd(QsdInstance::new(PureState::zero(1), q0, q1, vec![0])?)
        }
        Name::Efi => {
            let pair = EfiPair::new(diag(0.95), diag(0.05))?;
            let (a, b) = if no { (pair.rho0.clone(), pair.rho0.clone()) } else { (pair.rho0.clone(), pair.rho1.clone()) };
            Input::Efi(pair, a, b)
        }
    })
}

fn from_file(name: Name, path: &PathBuf) -> CliResult<Input> {
    let s = read_json::<StateFile>(path)?.load()?;
    match (name, s) {
        (Name::Mixedness, s) => Ok(Input::Mixed(s.density())),
        (Name::Maxent, LoadedState::Pure(p)) => Ok(Input::Pure(p)),
        (Name::Maxent, LoadedState::Mixed(_)) => Err(QError::Invalid("maxent needs a pure input".into()).into()),
        _ => Err(CliError::Usage("--input is supported for mixedness and maxent only".into())),
    }
}

fn exact(input: &Input, name: Name, t: usize, prover: &ProverStrategy) -> Result<f64> {
    match (input, name) {
        (Input::Mixed(r), _) => mixedness_accept_exact(r, t, prover),
        (Input::Pure(p), _) => Ok(maxent_round_pass(p, prover)?.powi(t as i32)),
        (Input::Qsd(i), Name::Coqsdwp) => coqsdwp_accept_exact(i, prover, None),
        (Input::Qsd(i), _) => public_coin_accept_exact(i, prover, None),
        (Input::Efi(pair, a, b), _) => efi_accept_exact(pair, a, b, t, prover),
    }
}

fn sample(input: &Input, name: Name, t: usize, prover: &ProverStrategy, seed: u64) -> Result<ProtocolTranscript> {
    match (input, name) {
        (Input::Mixed(r), _) => mixedness_protocol(r, t, prover, seed),
        (Input::Pure(p), _) => max_entangled_protocol(p, t, prover, seed),
        (Input::Qsd(i), Name::Coqsdwp) => coqsdwp_protocol(i, prover, None, seed),
        (Input::Qsd(i), _) => public_coin_qsd(i, prover, None, seed),
        (Input::Efi(pair, a, b), _) => efi_protocol(pair, a, b, t, prover, seed),
    }
}

pub fn run(args: &ProtocolArgs, ctx: &Ctx) -> CliResult<Value> {
    let input = match &args.input {
        Some(p) => from_file(args.name, p)?,
        None => builtin(args.name, args.no_case)?,
    };
    let prover = args.prover.strategy();
    let p_exact = exact(&input, args.name, args.t, &prover)?;
    let mut res = json!({
        "protocol": args.name,
        "case": if args.input.is_some() { "file" } else if args.no_case { "no" } else { "yes" },
        "prover": prover.label,
        "t": args.t,
        "p_exact": p_exact,
    });
    if let Input::Qsd(inst) = &input {
        let pair = Purified::from_instance(inst)?;
        res["trace_distance"] = json!(pair.trace_distance()?);
        if args.name == Name::Publiccoin {
            let cheat = optimal_cheat(&pair.sigma(0)?, &pair.sigma(1)?, ctx.seed)?;
            res["optimal_cheat"] = json!(cheat.value);
            res["cheat_bound"] = json!(cheat.analytic_bound);
        }
    }
    let first = sample(&input, args.name, args.t, &prover, ctx.seed)?;
    if let Some(path) = &args.transcript {
        write_json(path, &first)?;
    }
    if ctx.sampled() {
        let trials = ctx.trials_or(1000);
        let verdicts = ctx.pool(|| {
            (0..trials)
                .into_par_iter()
                .map(|i| {
                    let seed = rng_for(ctx.seed, (1 << 34) | i as u64).random();
                    sample(&input, args.name, args.t, &prover, seed).map(|tr| tr.verdict.is_some_and(|v| v.is_accept()))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let hits = verdicts.iter().filter(|&&b| b).count();
        res["trials"] = json!(trials);
        res["p_hat"] = json!(hits as f64 / trials.max(1) as f64);
        res["half_width"] = json!(qplab::qprim::hoeffding_half_width(trials.max(1), 1e-3));
    }
    res["verdict"] = to_value(&first.verdict);
    Ok(res)
}
