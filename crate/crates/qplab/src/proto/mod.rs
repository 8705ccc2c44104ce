//! Two-party protocols with pluggable provers, exact acceptance
//! probabilities and honest-verifier simulators.

pub mod efi;
pub mod maxent;
pub mod mixedness;
pub mod qsd;
pub mod simulator;
pub mod transcript;

pub use efi::{efi_accept_exact, efi_protocol, EfiPair};
pub use maxent::{max_entangled_protocol, maxent_round_pass};
pub use mixedness::{mixedness_accept_exact, mixedness_protocol};
pub use qsd::{
    coqsdwp_accept_exact, coqsdwp_protocol, optimal_cheat, public_coin_accept_exact, public_coin_qsd, PolarStep,
    Polarization, Purified, QsdInstance,
};
pub use simulator::{hv_simulator, ProtocolId, SimInput, SimulatedView};
pub use transcript::{Party, Payload, ProtocolTranscript, ProverStrategy, Strategy};
