//! `qplab gen`: instance, scheme and state files.

use std::path::PathBuf;

use clap::Subcommand;
use serde::Serialize;
use serde_json::{json, Value};

use qplab::crypto::PrsScheme;
use qplab::hamlab::{cook_levin_variant, history_state, random_verifier, BSource, ClockLayout, Variant, DEFAULT_PENALTY};
use qplab::io::{CircuitFile, InstanceFile, PrsFile, QorFile, StateFile};
use qplab::qcore::{haar_state, random_density, rng_for};
use qplab::verify::{gen_no, gen_yes};

use crate::out::write_json;
use crate::{CliError, CliResult, Ctx};

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenKind {
    /// Clock Hamiltonian of a random verifier circuit.
    Cooklevin {
        #[arg(long, conflicts_with = "rejecting")]
        accepting: bool,
        #[arg(long)]
        rejecting: bool,
        /// Input qubits.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Gates in the verifier.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        witness_qubits: usize,
        #[arg(long, default_value_t = 1)]
        anc: usize,
        #[arg(long, default_value_t = DEFAULT_PENALTY)]
        penalty: f64,
        /// Build the mixed-input variant.
        #[arg(long)]
        mixed: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        verifier_out: Option<PathBuf>,
        /// Writes the Haar input used for the reported λ_min.
        #[arg(long)]
        input_out: Option<PathBuf>,
    },
    /// Keyed state generator.
    Prs {
        #[arg(long, default_value_t = 4)]
        key_bits: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        layers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantum-OR instance with its input state.
    Qor {
        /// Generate a no-instance.
        #[arg(long)]
        no: bool,
        #[arg(long, default_value_t = 1)]
        n_a: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2.0 / 3.0)]
        eta: f64,
        /// Defaults to 1/(64·2^m).
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Haar pure state or random density matrix.
    State {
        #[arg(long)]
        n: usize,
        /// Rank of a mixed state; pure when absent.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(kind: &GenKind, ctx: &Ctx) -> CliResult<Value> {
    match kind {
        GenKind::Cooklevin { accepting, rejecting, n, m, witness_qubits, anc, penalty, mixed, out, verifier_out, input_out } => {
            if accepting == rejecting {
                return Err(CliError::Usage("pass exactly one of --accepting, --rejecting".into()));
            }
            let layout = ClockLayout { n: *n, copies: 1, n_witness: *witness_qubits, n_anc: *anc, m: *m };
            let mut rng = rng_for(ctx.seed, 0);
            let v = random_verifier(layout, *accepting, &mut rng)?;
            let variant = if *mixed { Variant::Mixed } else { Variant::Pure };
            let ci = cook_levin_variant(&v, layout, *penalty, BSource::Reference, variant)?;
            let inst = &ci.instance;
            inst.validate()?;
            let psi = haar_state(*n, &mut rng_for(ctx.seed, 1))?;
            let lambda_min = inst.lambda_min(&psi)?;
            let mut res = json!({
                "kind": "cooklevin",
                "case": if *accepting { "yes" } else { "no" },
                "n_qubits": inst.n_total_qubits,
                "gates": v.len(),
                "p": inst.p,
                "a": inst.a,
                "b": inst.b,
                "gap": inst.b - inst.a,
                "required_gap": inst.required_gap(),
                "lambda_min": lambda_min,
                "out": out,
            });
            if *accepting {
                let phi = haar_state(*witness_qubits, &mut rng_for(ctx.seed, 2))?;
                let eta = history_state(&v, layout, &psi, &phi)?;
                res["history_energy"] = json!(inst.energy(&psi, &eta)?);
            }
            write_json(out, &InstanceFile::from_instance(inst))?;
            if let Some(p) = verifier_out {
                write_json(p, &CircuitFile::from_circuit(&v))?;
            }
            if let Some(p) = input_out {
                write_json(p, &StateFile::from_pure(&psi))?;
            }
            Ok(res)
        }
        GenKind::Prs { key_bits, m, layers, out } => {
            let s = PrsScheme::keyed(*key_bits, *m, *layers, ctx.seed)?;
            write_json(out, &PrsFile::from_scheme(&s))?;
            Ok(json!({
                "kind": "prs",
                "key_bits": s.key_bits,
                "keys": s.n_keys(),
                "m": s.m,
                "max_cross_overlap": s.max_cross_overlap()?,
                "out": out,
            }))
        }
        GenKind::Qor { no, n_a, m, eta, delta, out } => {
            let mut rng = rng_for(ctx.seed, 0);
            let delta = delta.unwrap_or(1.0 / (64.0 * (1u64 << m) as f64));
            let (rho, inst) = if *no { gen_no(*n_a, *m, delta, &mut rng)? } else { gen_yes(*n_a, *m, *eta, &mut rng)? };
            let case = if *no { "no" } else { "yes" };
            write_json(out, &QorFile::new(&inst, &rho, Some(case)))?;
            Ok(json!({
                "kind": "qor",
                "case": case,
                "n_a": n_a,
                "m": m,
                "eta": eta,
                "delta": delta,
                "promise_value": inst.promise_value(&rho)?,
                "out": out,
            }))
        }
        GenKind::State { n, rank, out } => {
            let mut rng = rng_for(ctx.seed, 0);
            let file = match rank {
                None => StateFile::from_pure(&haar_state(*n, &mut rng)?),
                Some(r) => StateFile::from_mixed(&random_density(*n, *r, &mut rng)?),
            };
            write_json(out, &file)?;
            Ok(json!({ "kind": "state", "n": n, "rank": rank, "out": out }))
        }
    }
}
