use num_complex::Complex64;

use crate::error::{Error, Result};

/// Normalization tolerance on the squared norm.
pub const NORM_TOL: f64 = 1e-12;

/// Amplitudes of the particle over sites k = 1..K, stored at index k − 1.
///
/// The same vector describes the N-qubit register through the binary label
/// correspondence, so no separate register state type exists.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes, rejecting vectors whose squared norm is not 1.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParams("state vector must be nonempty".into()));
        }
        let state = Self { amps };
        let n = state.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParams(format!(
                "state is not normalized (squared norm {n})"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Amplitude at site `k` (1-based).
    pub fn site(&self, k: usize) -> Complex64 {
        self.amps[k - 1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.len(), other.len(), "inner product of unequal lengths");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Multiplies every amplitude by a unit complex number.
    pub fn with_global_phase(&self, phase: Complex64) -> StateVector {
        Self::from_raw(self.amps.iter().map(|a| a * phase).collect())
    }
}
