//! Measurement primitives with exact distributions and seeded samplers.

pub mod dist;
pub mod hadamard;
pub mod sampler;
pub mod sequential;
pub mod swap;

pub use dist::{register_probs, MeasurementOutcomeDist, Outcome};
pub use hadamard::{hadamard_overlap_test, hadamard_x_expectation};
pub use sampler::{hoeffding_half_width, sample_index, sample_trajectory};
pub use sequential::{sequential_measure, SequentialReport};
pub use swap::{partial_swap_test, partial_swap_test_on, swap_accept, swap_test};

/// Probability threshold below which an outcome is marked unreachable.
pub const UNREACHABLE: f64 = 1e-12;
