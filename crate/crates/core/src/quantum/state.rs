use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Amplitudes over `2^qubits` basis states. Qubit 0 is the least
/// significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
    qubits: usize,
}

impl<T: Real> StateVector<T> {
    /// `|0...0>` on `qubits` qubits.
    pub fn zero(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > 20 {
            return invalid(format!("unsupported qubit count {qubits}"));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { amps, qubits })
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    #[inline]
    pub fn amplitude(&self, basis: usize) -> Complex<T> {
        self.amps[basis]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability that qubit `q` reads 1.
    pub fn probability_one(&self, q: usize) -> T {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn hadamard(&mut self, q: usize) {
        let bit = 1usize << q;
        let s = T::FRAC_1_SQRT_2();
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b).scale(s);
                self.amps[i | bit] = (a - b).scale(s);
            }
        }
    }

    /// Y-rotation by `angles[rest]` on `target`, where `rest` is the basis
    /// index with the target bit removed (a uniformly controlled rotation).
    pub fn multiplexed_ry(&mut self, target: usize, angles: &[T]) {
        let bit = 1usize << target;
        let half = T::lit(0.5);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let rest = ((i >> (target + 1)) << target) | (i & (bit - 1));
                let theta = angles[rest] * half;
                let (c, s) = (theta.cos(), theta.sin());
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = a0.scale(c) - a1.scale(s);
                self.amps[i | bit] = a0.scale(s) + a1.scale(c);
            }
        }
    }

    /// Negates every amplitude whose basis index has qubit `q` set.
    pub fn phase_flip_on_one(&mut self, q: usize) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = -*a;
            }
        }
    }

    /// `-(I - 2|0><0|)`: negates every amplitude except the all-zero one.
    pub fn reflect_about_zero(&mut self) {
        for a in self.amps.iter_mut().skip(1) {
            *a = -*a;
        }
    }
}
