use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProtocolParams;
use crate::stats::wrap_error;

/// Tolerance on Σ prob = 1.
pub const SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeEntry {
    pub m: usize,
    /// (αm − I) wrapped into (−αK/2, αK/2].
    pub delta_i: f64,
    pub prob: f64,
}

/// Probabilities of the K outcomes Ĩ = αm for a given true integral I.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDistribution {
    pub params: ProtocolParams,
    pub true_integral: f64,
    pub entries: Vec<OutcomeEntry>,
}

impl ErrorDistribution {
    /// Builds a distribution from per-outcome probabilities indexed by m.
    pub fn from_probs(params: ProtocolParams, true_integral: f64, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != params.k_sites() {
            return Err(Error::InvalidParams(format!(
                "expected {} probabilities, got {}",
                params.k_sites(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParams(format!("probability {p} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidParams(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self::from_probs_unchecked(params, true_integral, probs))
    }

    pub(crate) fn from_probs_unchecked(
        params: ProtocolParams,
        true_integral: f64,
        probs: Vec<f64>,
    ) -> Self {
        let alpha = params.alpha();
        let entries = probs
            .into_iter()
            .enumerate()
            .map(|(m, prob)| OutcomeEntry {
                m,
                delta_i: wrap_error(alpha * m as f64, true_integral, &params),
                prob,
            })
            .collect();
        Self {
            params,
            true_integral,
            entries,
        }
    }

    pub fn prob(&self, m: usize) -> f64 {
        self.entries[m].prob
    }

    pub fn probs(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.prob)
    }

    pub fn total(&self) -> f64 {
        self.probs().sum()
    }

    /// Outcome with the largest probability (lowest m on ties).
    pub fn mode(&self) -> usize {
        self.entries
            .iter()
            .fold((0, f64::NEG_INFINITY), |best, e| {
                if e.prob > best.1 {
                    (e.m, e.prob)
                } else {
                    best
                }
            })
            .0
    }

    /// Largest entrywise probability difference against `other`.
    pub fn max_abs_diff(&self, other: &ErrorDistribution) -> f64 {
        self.probs()
            .zip(other.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
