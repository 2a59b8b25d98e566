use super::state::StateVector;
use crate::error::{invalid, BoostError, Result};
use crate::scalar::Real;

/// Largest padded sample count the statevector backend accepts.
pub const MAX_STATEVECTOR_SAMPLES: usize = 64;

const ANCILLA: usize = 0;

/// The preparation unitary
/// `A|0> = M^{-1/2} Σ_i |i> (sqrt(w_i)|1> + sqrt(1 - w_i)|0>)`
/// built from Hadamards on the index register followed by a rotation of the
/// ancilla (qubit 0) controlled on the index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedStatePrep<T> {
    angles: Vec<T>,
    index_qubits: usize,
}

impl<T: Real> WeightedStatePrep<T> {
    /// `padded` must be a power of two no smaller than `weights.len()`;
    /// missing weights are zero.
    pub fn new(weights: &[T], padded: usize) -> Result<Self> {
        if !padded.is_power_of_two() || padded < weights.len().max(2) {
            return invalid(format!(
                "padded size {padded} must be a power of two >= max(2, {})",
                weights.len()
            ));
        }
        if padded > MAX_STATEVECTOR_SAMPLES {
            return Err(BoostError::Unsupported(format!(
                "statevector backend is capped at {MAX_STATEVECTOR_SAMPLES} samples, got {padded}"
            )));
        }
        if let Some(i) = weights.iter().position(|&w| !(w >= T::zero() && w <= T::one())) {
            return invalid(format!("weight {i} = {} is outside [0, 1]", weights[i]));
        }
        let two = T::lit(2.0);
        let mut angles: Vec<T> = weights.iter().map(|&w| two * w.sqrt().asin()).collect();
        angles.resize(padded, T::zero());
        Ok(Self {
            angles,
            index_qubits: padded.trailing_zeros() as usize,
        })
    }

    pub fn qubits(&self) -> usize {
        self.index_qubits + 1
    }

    pub fn padded_len(&self) -> usize {
        self.angles.len()
    }

    pub fn apply(&self, s: &mut StateVector<T>) {
        for q in 1..=self.index_qubits {
            s.hadamard(q);
        }
        s.multiplexed_ry(ANCILLA, &self.angles);
    }

    pub fn apply_inverse(&self, s: &mut StateVector<T>) {
        let neg: Vec<T> = self.angles.iter().map(|&a| -a).collect();
        s.multiplexed_ry(ANCILLA, &neg);
        for q in 1..=self.index_qubits {
            s.hadamard(q);
        }
    }

    pub fn prepare(&self) -> StateVector<T> {
        let mut s = StateVector::zero(self.qubits()).expect("qubit count checked at construction");
        self.apply(&mut s);
        s
    }

    /// One Grover iterate `A (2|0><0| - I) A^† (I - 2P_good)`, the good
    /// subspace being ancilla = 1.
    pub fn grover_iterate(&self, s: &mut StateVector<T>) {
        s.phase_flip_on_one(ANCILLA);
        self.apply_inverse(s);
        s.reflect_about_zero();
        self.apply(s);
    }

    pub fn good_probability(s: &StateVector<T>) -> T {
        s.probability_one(ANCILLA)
    }
}

/// Prepares the weighted superposition; its ancilla-1 probability is
/// `Σ w / padded`.
pub fn prepare_weighted_state<T: Real>(weights: &[T], padded: usize) -> Result<StateVector<T>> {
    Ok(WeightedStatePrep::new(weights, padded)?.prepare())
}

#[derive(Debug, Clone)]
pub struct Amplified<T> {
    pub state: StateVector<T>,
    pub good_probability: T,
    /// Initial good probability was zero, so amplification did nothing.
    pub degenerate: bool,
}

/// Applies `iterations` Grover iterates to the prepared state.
pub fn grover_amplify<T: Real>(prep: &WeightedStatePrep<T>, iterations: usize) -> Amplified<T> {
    let mut state = prep.prepare();
    let degenerate = WeightedStatePrep::good_probability(&state) <= T::zero();
    for _ in 0..iterations {
        prep.grover_iterate(&mut state);
    }
    let good_probability = WeightedStatePrep::good_probability(&state);
    Amplified {
        state,
        good_probability,
        degenerate,
    }
}
