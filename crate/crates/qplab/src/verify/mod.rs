//! Verification procedures: Quantum OR, energy estimation for Hamiltonians
//! with an unknown input, amplification, search-to-decision and state
//! identification.

pub mod amplify;
pub mod base;
pub mod identify;
pub mod lhwm;
pub mod lhwp;
pub mod qor;
pub mod report;
pub mod stod;

pub use amplify::{amplify_parallel, bernoulli_verifier, AmplifiedVerifier};
pub use base::QmaVerifier;
pub use identify::{identify_exact, identify_state, CandidateSet};
pub use lhwm::{lhwm_exact, lhwm_verify, LhwmConfig, LhwmWitness};
pub use lhwp::{lhwp_exact, lhwp_verify, Witness};
pub use qor::{gen_no, gen_yes, qma_to_qor, qor_accept_exact, qor_run, QmaToQor, QorInstance};
pub use stod::{search_to_decision, DontCare, PrefixOracle, StodResult};
pub use report::{Verdict, VerdictReport};
