//! Desk-scale quantum subroutines: an exact statevector for the weighted
//! superposition, Grover amplification, iterative amplitude estimation and
//! measurement-style sampling.

mod amplify;
mod iqae;
mod sampling;
mod state;

pub use amplify::{grover_amplify, prepare_weighted_state, Amplified, WeightedStatePrep, MAX_STATEVECTOR_SAMPLES};
pub use iqae::{
    iqae_estimate, AmplitudeEstimate, AmplitudeOracle, ClosedFormOracle, EstimationConfig, EstimationMode,
    StatevectorOracle,
};
pub use sampling::{sample_indices, SampleOutcome, SamplingMode};
pub use state::StateVector;
