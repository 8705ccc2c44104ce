//! Small cryptographic games: keyed pseudorandom states broken with an
//! L_PRS oracle, key recovery for one-way state generators, and the
//! EPR commitment with auxiliary input. The hard unitary is a seeded Haar
//! sample; only game values and information-theoretic bounds are checked.

pub mod commitment;
pub mod owsg;
pub mod prs;

pub use commitment::{binding_game_values, flip_value, half_state, hiding_check, Commitment, CommitmentSession, Phase, RevealOutcome};
pub use owsg::{owsg_break, owsg_experiment, owsg_trial, OwsgAttack, OwsgResult, OwsgScheme, OwsgTrial};
pub use prs::{prs_experiment, prs_oracle_break, prs_trial, summarize, trial_seed, Membership, PrsCase, PrsExperiment, PrsGuess, PrsScheme, PrsTrial};
