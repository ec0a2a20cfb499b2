//! The single-particle protocol.
//!
//! A particle spread uniformly over K = 2^N sites crosses the field; site k
//! picks up the phase −2πkI/(Kα). Measuring in the basis of states imprinted
//! by I = αm (m = 0..K−1) yields the estimate Ĩ = αm. Those K states are the
//! columns of a discrete Fourier transform, so the outcome probabilities are a
//! K-slit interference pattern in the error δI = Ĩ − I.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::distribution::ErrorDistribution;
use crate::error::{Error, Result};
use crate::numeric::{dist_to_integer, frac, sin_pi};
use crate::params::ProtocolParams;
use crate::state::StateVector;
use crate::stats::wrap_error;

/// Distance of δI/(αK) to an integer below which the closed form returns its limit 1.
pub const SINGULARITY_TOL: f64 = 1e-9;

fn cis_turns(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * turns)
}

/// e^{+2πi j/K} for j = 0..K.
fn twiddles(k_sites: usize) -> Vec<Complex64> {
    (0..k_sites)
        .map(|j| cis_turns(j as f64 / k_sites as f64))
        .collect()
}

/// Equal amplitudes 1/√K with no relative phase.
pub fn prepare_uniform_state(params: &ProtocolParams) -> StateVector {
    let k = params.k_sites();
    let a = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
    StateVector::from_raw(vec![a; k])
}

/// Multiplies the amplitude at site k by exp(−i·2πkI/(Kα)).
///
/// I enters only through I/(αK) mod 1, so integrals one period apart give
/// bit-for-bit comparable phases.
pub fn imprint_phase(state: &StateVector, integral: f64, params: &ProtocolParams) -> StateVector {
    let x = frac(integral / params.range());
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let k = (i + 1) as f64;
            a * cis_turns(-frac(k * x))
        })
        .collect();
    StateVector::from_raw(amps)
}

/// |Ψ_fin(αm)⟩, the m-th measurement basis state.
pub fn outcome_basis_state(m: usize, params: &ProtocolParams) -> Result<StateVector> {
    let k_sites = params.k_sites();
    if m >= k_sites {
        return Err(Error::OutOfRange(format!(
            "outcome m = {m} not in 0..{k_sites}"
        )));
    }
    let norm = 1.0 / (k_sites as f64).sqrt();
    let amps = (1..=k_sites)
        .map(|k| {
            let j = (k as u64 * m as u64 % k_sites as u64) as f64;
            norm * cis_turns(-j / k_sites as f64)
        })
        .collect();
    Ok(StateVector::from_raw(amps))
}

/// How basis overlaps ⟨Ψ(αm)|ψ⟩ are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMethod {
    /// O(K) summation per outcome against a shared twiddle table.
    Direct,
    /// One inverse FFT for all K outcomes.
    #[default]
    Fft,
}

/// ⟨Ψ(αm)|state⟩ for every m = 0..K−1.
pub fn basis_overlaps(
    state: &StateVector,
    params: &ProtocolParams,
    method: OverlapMethod,
) -> Vec<Complex64> {
    let k_sites = params.k_sites();
    assert_eq!(state.len(), k_sites, "state length must equal K");
    let norm = 1.0 / (k_sites as f64).sqrt();
    let amps = state.amplitudes();
    match method {
        OverlapMethod::Direct => {
            let w = twiddles(k_sites);
            let mask = k_sites - 1;
            (0..k_sites)
                .map(|m| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut idx = m & mask;
                    for a in amps {
                        acc += w[idx] * a;
                        idx = (idx + m) & mask;
                    }
                    acc * norm
                })
                .collect()
        }
        OverlapMethod::Fft => {
            // Σ_k e^{2πi km/K} a_k = e^{2πi m/K} · IDFT(a)[m] with a indexed from k = 1.
            let mut buf = amps.to_vec();
            FftPlanner::new().plan_fft_inverse(k_sites).process(&mut buf);
            let w = twiddles(k_sites);
            buf.iter()
                .enumerate()
                .map(|(m, x)| w[m] * x * norm)
                .collect()
        }
    }
}

/// Born-rule distribution of a (possibly externally prepared) final state.
pub fn distribution_from_state(
    state: &StateVector,
    integral: f64,
    params: &ProtocolParams,
    method: OverlapMethod,
) -> ErrorDistribution {
    let probs = basis_overlaps(state, params, method)
        .into_iter()
        .map(|c| c.norm_sqr().min(1.0))
        .collect();
    ErrorDistribution::from_probs_unchecked(*params, integral, probs)
}

pub fn outcome_distribution_with(
    integral: f64,
    params: &ProtocolParams,
    method: OverlapMethod,
) -> ErrorDistribution {
    let state = imprint_phase(&prepare_uniform_state(params), integral, params);
    distribution_from_state(&state, integral, params, method)
}

/// prob(m) = |⟨Ψ(αm)|Ψ(I)⟩|² for every outcome.
pub fn outcome_distribution(integral: f64, params: &ProtocolParams) -> ErrorDistribution {
    outcome_distribution_with(integral, params, OverlapMethod::Fft)
}

/// sin²(πδI/α) / (4^N sin²(πδI/(2^N α))), with the limit 1 at δI ∈ αK·ℤ.
pub fn closed_form_error_prob(delta_i: f64, params: &ProtocolParams) -> f64 {
    let u = delta_i / params.alpha();
    let k = params.k_sites() as f64;
    let r = u / k;
    if dist_to_integer(r) < SINGULARITY_TOL {
        return 1.0;
    }
    let num = sin_pi(u);
    let den = k * sin_pi(r);
    (num * num / (den * den)).clamp(0.0, 1.0)
}

/// The outcome distribution evaluated through the closed form.
pub fn closed_form_distribution(integral: f64, params: &ProtocolParams) -> ErrorDistribution {
    let alpha = params.alpha();
    let probs = (0..params.k_sites())
        .map(|m| closed_form_error_prob(wrap_error(alpha * m as f64, integral, params), params))
        .collect();
    ErrorDistribution::from_probs_unchecked(*params, integral, probs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSample {
    pub m: usize,
    /// Ĩ = αm.
    pub estimate: f64,
    pub delta_i: f64,
}

/// Repeated draws from one distribution via its cumulative table.
#[derive(Debug, Clone)]
pub struct OutcomeSampler<'a> {
    dist: &'a ErrorDistribution,
    cdf: Vec<f64>,
}

impl<'a> OutcomeSampler<'a> {
    pub fn new(dist: &'a ErrorDistribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .probs()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { dist, cdf }
    }

    fn pick(&self, u: f64) -> usize {
        let target = u * self.cdf[self.cdf.len() - 1];
        let i = self.cdf.partition_point(|&c| c <= target);
        if i < self.cdf.len() {
            return i;
        }
        // Roundoff pushed u past the table; take the last outcome with mass.
        self.dist
            .entries
            .iter()
            .rposition(|e| e.prob > 0.0)
            .unwrap_or(0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> OutcomeSample {
        let m = self.pick(rng.random::<f64>());
        let e = &self.dist.entries[m];
        OutcomeSample {
            m,
            estimate: self.dist.params.alpha() * m as f64,
            delta_i: e.delta_i,
        }
    }
}

/// One Born-rule draw; consumes exactly one uniform from `rng`.
pub fn sample_outcome<R: Rng + ?Sized>(dist: &ErrorDistribution, rng: &mut R) -> OutcomeSample {
    OutcomeSampler::new(dist).sample(rng)
}
