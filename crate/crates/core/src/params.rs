use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported register size; K complex amplitudes must fit in memory.
pub const MAX_QUBITS: u32 = 24;

/// Protocol scale: N qubits (or K = 2^N sites) and the resolution α.
///
/// The measurable range is αK and the working scale is M = αK/10.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    n_qubits: u32,
    k_sites: usize,
    alpha: f64,
    range: f64,
    scale_m: f64,
}

impl ProtocolParams {
    pub fn new(n_qubits: u32, alpha: f64) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::InvalidParams(format!(
                "number of qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        let k_sites = 1usize << n_qubits;
        let range = alpha * k_sites as f64;
        Ok(Self {
            n_qubits,
            k_sites,
            alpha,
            range,
            scale_m: range / 10.0,
        })
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn k_sites(&self) -> usize {
        self.k_sites
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// αK, the period of everything the protocol measures.
    pub fn range(&self) -> f64 {
        self.range
    }

    /// M = αK/10.
    pub fn scale_m(&self) -> f64 {
        self.scale_m
    }

    /// Same N, with a different α.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.n_qubits, alpha)
    }
}

pub fn make_params(n_qubits: u32, alpha: f64) -> Result<ProtocolParams> {
    ProtocolParams::new(n_qubits, alpha)
}
