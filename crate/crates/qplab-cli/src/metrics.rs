//! `qplab metrics`: trace distance, fidelity and tensor-power distances.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};

use qplab::io::StateFile;
use qplab::qcore::{fidelity, random_density, rng_for, trace_distance, DensityMatrix, MAX_QUBITS};

use crate::out::read_json;
use crate::{CliError, CliResult, Ctx};

#[derive(Args, Debug, Serialize)]
pub struct MetricsArgs {
    /// First state file; with --b. A seeded random pair when both are absent.
    #[arg(long, requires = "b")]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    /// Qubits of the random pair.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Largest tensor power l.
    #[arg(long, default_value_t = 6)]
    pub max_power: usize,
}

fn load(path: &PathBuf) -> CliResult<DensityMatrix> {
    Ok(read_json::<StateFile>(path)?.load()?.density())
}

pub fn run(args: &MetricsArgs, ctx: &Ctx) -> CliResult<Value> {
    let (rho, sigma) = match (&args.a, &args.b) {
        (Some(a), Some(b)) => (load(a)?, load(b)?),
        _ => {
            let mut rng = rng_for(ctx.seed, 0);
            let d = 1usize << args.n;
            (random_density(args.n, d, &mut rng)?, random_density(args.n, d, &mut rng)?)
        }
    };
    if rho.n_qubits() != sigma.n_qubits() {
        return Err(CliError::Usage("states differ in size".into()));
    }
    let td = trace_distance(&rho, &sigma)?;
    let f = fidelity(&rho, &sigma)?;
    let fvdg_ok = 1.0 - f <= td + ctx.tol && td <= (1.0 - f * f).max(0.0).sqrt() + ctx.tol;
    let mut powers = Vec::new();
    let (mut rl, mut sl) = (rho.clone(), sigma.clone());
    for l in 1..=args.max_power {
        if l * rho.n_qubits() > MAX_QUBITS {
            break;
        }
        if l > 1 {
            rl = rl.tensor(&rho);
            sl = sl.tensor(&sigma);
        }
        let tl = trace_distance(&rl, &sl)?;
        let lower = 1.0 - (-(l as f64) * td * td).exp();
        let upper = l as f64 * td;
        powers.push(json!({
            "l": l,
            "td": tl,
            "lower": lower,
            "upper": upper,
            "pass": lower < tl + ctx.tol && tl <= upper + ctx.tol,
        }));
    }
    Ok(json!({
        "n_qubits": rho.n_qubits(),
        "trace_distance": td,
        "fidelity": f,
        "fuchs_van_de_graaf": { "lower": 1.0 - f, "upper": (1.0 - f * f).max(0.0).sqrt(), "pass": fvdg_ok },
        "tensor_powers": powers,
    }))
}
