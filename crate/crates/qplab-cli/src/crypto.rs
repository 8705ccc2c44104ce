//! `qplab crypto`: PRS distinguishing, OWSG key recovery, commitment game values.
//!
//! Per-trial CSV columns:
//! - prs: seed, case, oracle_verdict, advantage
//! - owsg: seed, key, guess, success, ver_accept

use std::path::PathBuf;

use clap::Subcommand;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use qplab::crypto::{
    binding_game_values, flip_value, half_state, hiding_check, owsg_trial, prs_trial, summarize, trial_seed, CommitmentSession,
    OwsgAttack, OwsgScheme, PrsScheme,
};
use qplab::io::PrsFile;
use qplab::qcore::{haar_unitary, linalg, rng_for, PureState};
use qplab::Result;

use crate::out::{fmt12, read_json, write_csv};
use crate::{CliResult, Ctx};

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "game", rename_all = "lowercase")]
pub enum Game {
    /// Distinguish PRS images from Haar states with the membership oracle.
    Prs {
        /// Scheme file from `gen prs`; a seeded keyed scheme when absent.
        #[arg(long)]
        scheme: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        key_bits: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        layers: usize,
        /// Swap tests used in the unconstrained band.
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Recover an OWSG key bit by bit.
    Owsg {
        #[arg(long, default_value_t = 6)]
        key_bits: usize,
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        layers: usize,
        /// Swap tests per Ver call.
        #[arg(long, default_value_t = 1)]
        ver_copies: usize,
        /// Sampled Ver runs per table entry; exact table when absent.
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.3)]
        slack: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Hiding and binding values of the EPR commitment with a Haar T.
    Commit {
        #[arg(long, default_value_t = 1)]
        lambda: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Random R-only adversaries against HALF-type states.
        #[arg(long, default_value_t = 50)]
        adversaries: usize,
    },
}

fn par_trials<T: Send>(ctx: &Ctx, trials: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    ctx.pool(|| (0..trials).into_par_iter().map(|i| f(trial_seed(ctx.seed, i))).collect())
}

pub fn run(game: &Game, ctx: &Ctx) -> CliResult<Value> {
    match game {
        Game::Prs { scheme, key_bits, m, layers, copies, csv } => {
            let s = match scheme {
                Some(p) => read_json::<PrsFile>(p)?.load()?,
                None => PrsScheme::keyed(*key_bits, *m, *layers, ctx.seed)?,
            };
            let trials = ctx.trials_or(1000);
            let rows = par_trials(ctx, trials, |seed| prs_trial(&s, *copies, seed))?;
            if let Some(path) = csv {
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        let case = if r.case == qplab::crypto::PrsCase::Prs { "prs" } else { "haar" };
                        vec![r.seed.to_string(), case.into(), (r.oracle_verdict as u8).to_string(), fmt12(r.advantage)]
                    })
                    .collect();
                write_csv(path, &["seed", "case", "oracle_verdict", "advantage"], &body)?;
            }
            let e = summarize(rows);
            Ok(json!({
                "game": "prs",
                "keys": s.n_keys(),
                "m": s.m,
                "max_cross_overlap": s.max_cross_overlap()?,
                "trials": trials,
                "advantage": e.advantage,
                "exact_advantage": e.exact_advantage,
                "pass": e.advantage >= 0.5,
            }))
        }
        Game::Owsg { key_bits, m, layers, ver_copies, shots, a, slack, csv } => {
            let scheme = OwsgScheme::new(PrsScheme::keyed(*key_bits, *m, *layers, ctx.seed)?, *ver_copies)?;
            let attack = OwsgAttack { a: *a, slack: *slack, shots: *shots };
            let trials = ctx.trials_or(200);
            let rows = par_trials(ctx, trials, |seed| owsg_trial(&scheme, &attack, seed))?;
            if let Some(path) = csv {
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.seed.to_string(),
                            r.key.to_string(),
                            r.guess.map(|g| g.to_string()).unwrap_or_default(),
                            (r.success as u8).to_string(),
                            fmt12(r.ver_accept),
                        ]
                    })
                    .collect();
                write_csv(path, &["seed", "key", "guess", "success", "ver_accept"], &body)?;
            }
            let wins = rows.iter().filter(|r| r.success).count();
            let exact_keys = rows.iter().filter(|r| r.guess == Some(r.key)).count();
            let rate = wins as f64 / trials.max(1) as f64;
            Ok(json!({
                "game": "owsg",
                "keys": scheme.gen.n_keys(),
                "trials": trials,
                "success_rate": rate,
                "exact_key_rate": exact_keys as f64 / trials.max(1) as f64,
                "pass": rate >= 0.95,
            }))
        }
        Game::Commit { lambda, k, adversaries } => {
            let mut session = CommitmentSession::haar(*lambda, *k, ctx.seed)?;
            let hiding = hiding_check(&session)?;
            let none = PureState::zero(0);
            let id = linalg::identity(1 << (lambda * k));
            let t_inv = (0..*k).fold(linalg::identity(1), |acc, _| linalg::kron(&session.t.adjoint(), &acc));
            let (v01_id, v10_id) = binding_game_values(&session, &id, &none)?;
            let (v01_t, v10_t) = binding_game_values(&session, &t_inv, &none)?;
            let mut honest = Vec::new();
            for b in [false, true] {
                let mut s = CommitmentSession::new(*lambda, *k, session.t.clone())?;
                let c = s.commit(b)?;
                honest.push(s.reveal(b, &c)?.accept);
            }
            let c = session.commit(false)?;
            let flip = session.reveal(true, &c)?;
            let mut rng = rng_for(ctx.seed, 7);
            let mut worst: f64 = 0.0;
            for _ in 0..*adversaries {
                let t1 = haar_unitary(*lambda, &mut rng)?;
                let t2 = haar_unitary(*lambda, &mut rng)?;
                let u = haar_unitary(*lambda, &mut rng)?;
                let half = half_state(*lambda, &t1, &t2)?;
                let v = flip_value(&PureState::epr(*lambda), &half, 1, &u, &none)?;
                worst = worst.max(v * v);
            }
            Ok(json!({
                "game": "commit",
                "lambda": lambda,
                "k": k,
                "hiding_td": hiding,
                "honest_accept": { "open0": honest[0], "open1": honest[1] },
                "identity_adversary": { "v01": v01_id, "v10": v10_id, "open1_on_0_accept": flip.accept },
                "t_inverse_adversary": { "v01": v01_t, "v10": v10_t },
                "half_state_max_sq": worst,
                "half_state_pass": worst <= 0.75 + ctx.tol,
            }))
        }
    }
}
