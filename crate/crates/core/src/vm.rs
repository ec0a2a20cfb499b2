//! The N-qubit protocol and its correspondence with the single particle.
//!
//! Spin j (0-based, least significant first) starts along +x and accrues the
//! phase −2π·2^j·I/(Kα) when down. Reading the spins as the binary digits of
//! a site label k (up ≡ 0, down ≡ 1) gives the register phase −2πkI/(Kα),
//! which is exactly the single-particle imprint, so both protocols share one
//! outcome law. Here that law is used in its product form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::distribution::ErrorDistribution;
use crate::error::{Error, Result};
use crate::numeric::cos_pi;
use crate::params::ProtocolParams;
use crate::stats::wrap_error;

/// Relative phases θ_j of N spins, each in (|↑⟩ + e^{iθ_j}|↓⟩)/√2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitRegister {
    phases: Vec<f64>,
}

impl QubitRegister {
    /// All spins along +x.
    pub fn new(params: &ProtocolParams) -> Self {
        Self {
            phases: vec![0.0; params.n_qubits() as usize],
        }
    }

    /// Register after the spins have crossed a field with integral I.
    pub fn after_field(integral: f64, params: &ProtocolParams) -> Self {
        let phases = (0..params.n_qubits())
            .map(|j| raw_spin_phase(j, integral, params))
            .collect();
        Self { phases }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Total phase of the component whose down spins are the set bits of k
    /// (bits at or above N are ignored).
    pub fn label_phase(&self, k: usize) -> f64 {
        self.phases
            .iter()
            .enumerate()
            .filter(|(j, _)| (k >> j) & 1 == 1)
            .map(|(_, th)| th)
            .sum()
    }
}

fn raw_spin_phase(j: u32, integral: f64, params: &ProtocolParams) -> f64 {
    -2.0 * PI * (1u64 << j) as f64 * integral / params.range()
}

/// −2π·2^j·I/(Kα), the phase spin j gains when down.
pub fn spin_phase(j: u32, integral: f64, params: &ProtocolParams) -> Result<f64> {
    if j >= params.n_qubits() {
        return Err(Error::OutOfRange(format!(
            "spin index {j} not in 0..{}",
            params.n_qubits()
        )));
    }
    Ok(raw_spin_phase(j, integral, params))
}

/// Phase of the register component whose binary digits spell k.
///
/// Labels 1..K−1 fit in N digits. Label K needs a carry digit N that no spin
/// carries; it is charged with the same law, −2π·2^N·I/(Kα) = −2πI/α, so the
/// sum equals −2πkI/(Kα) for every k in 1..=K.
pub fn register_phase_for_label(k: usize, integral: f64, params: &ProtocolParams) -> Result<f64> {
    if !(1..=params.k_sites()).contains(&k) {
        return Err(Error::OutOfRange(format!(
            "label {k} not in 1..={}",
            params.k_sites()
        )));
    }
    let spins = QubitRegister::after_field(integral, params).label_phase(k);
    let carry = if k == params.k_sites() {
        -2.0 * PI * integral / params.alpha()
    } else {
        0.0
    };
    Ok(spins + carry)
}

/// ∏_{n=1}^{N} cos²(πδI/(2^n α)).
pub fn product_form_error_prob(delta_i: f64, params: &ProtocolParams) -> f64 {
    let u = delta_i / params.alpha();
    let mut p = 1.0;
    let mut scale = 1.0;
    for _ in 0..params.n_qubits() {
        scale *= 0.5;
        let c = cos_pi(u * scale);
        p *= c * c;
    }
    p.clamp(0.0, 1.0)
}

/// prob(m) from the product form at each outcome's wrapped error.
pub fn vm_outcome_distribution(integral: f64, params: &ProtocolParams) -> ErrorDistribution {
    let alpha = params.alpha();
    let probs = (0..params.k_sites())
        .map(|m| product_form_error_prob(wrap_error(alpha * m as f64, integral, params), params))
        .collect();
    ErrorDistribution::from_probs_unchecked(*params, integral, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use crate::train::{closed_form_error_prob, outcome_distribution};
    use proptest::prelude::*;

    #[test]
    fn spin_phase_values() {
        let p1 = make_params(1, 1.0).unwrap();
        assert!((spin_phase(0, 1.0, &p1).unwrap() + PI).abs() < 1e-15);
        assert!(spin_phase(1, 1.0, &p1).is_err());

        let p3 = make_params(3, 1.0).unwrap();
        let want = [-PI / 4.0, -PI / 2.0, -PI];
        for (j, w) in want.iter().enumerate() {
            assert!((spin_phase(j as u32, 1.0, &p3).unwrap() - w).abs() < 1e-15);
            assert_eq!(spin_phase(j as u32, 0.0, &p3).unwrap(), 0.0);
        }
    }

    #[test]
    fn label_five_uses_spins_zero_and_two() {
        let p = make_params(3, 1.0).unwrap();
        let i = 2.7;
        let got = register_phase_for_label(5, i, &p).unwrap();
        let want = spin_phase(0, i, &p).unwrap() + spin_phase(2, i, &p).unwrap();
        assert_eq!(got, want);
        assert!(register_phase_for_label(0, i, &p).is_err());
        assert!(register_phase_for_label(9, i, &p).is_err());
    }

    #[test]
    fn label_phase_matches_single_particle() {
        let p = make_params(4, 1.0).unwrap();
        for step in 0..=100 {
            let i = step as f64 * 0.1;
            for k in 1..=p.k_sites() {
                let reg = register_phase_for_label(k, i, &p).unwrap();
                let direct = -2.0 * PI * k as f64 * i / p.range();
                assert!((reg - direct).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn product_form_values() {
        let p1 = make_params(1, 1.0).unwrap();
        assert_eq!(product_form_error_prob(0.0, &p1), 1.0);
        assert!((product_form_error_prob(0.5, &p1) - 0.5).abs() < 1e-15);
        let p2 = make_params(2, 1.0).unwrap();
        assert!(product_form_error_prob(1.0, &p2).abs() < 1e-30);
    }

    #[test]
    fn grid_and_normalization() {
        let p = make_params(4, 1.0).unwrap();
        let d = vm_outcome_distribution(3.0, &p);
        assert!((d.prob(3) - 1.0).abs() < 1e-12);
        let d = vm_outcome_distribution(3.4, &p);
        assert!((d.total() - 1.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn product_equals_closed_form(
            n in 1u32..=16,
            alpha in prop::sample::select(vec![0.5, 1.0, 2.0]),
            frac in -0.5f64..0.5,
        ) {
            let p = make_params(n, alpha).unwrap();
            let delta = frac * p.range();
            let a = product_form_error_prob(delta, &p);
            let b = closed_form_error_prob(delta, &p);
            prop_assert!((a - b).abs() <= 1e-10, "N={} δ={} {} vs {}", n, delta, a, b);
        }

        #[test]
        fn closed_form_factor_recursion(
            n in 2u32..=16,
            alpha in prop::sample::select(vec![0.5, 1.0, 2.0]),
            frac in -0.5f64..0.5,
        ) {
            let p = make_params(n, alpha).unwrap();
            let prev = make_params(n - 1, alpha).unwrap();
            let delta = frac * p.range();
            let c = cos_pi(delta / alpha / p.k_sites() as f64);
            let lhs = closed_form_error_prob(delta, &p);
            let rhs = closed_form_error_prob(delta, &prev) * c * c;
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }

        #[test]
        fn distributions_coincide(
            n in 1u32..=10,
            alpha in prop::sample::select(vec![0.5, 1.0, 2.0]),
            frac in 0.0f64..1.0,
        ) {
            let p = make_params(n, alpha).unwrap();
            let i = frac * p.range();
            let vm = vm_outcome_distribution(i, &p);
            let q = outcome_distribution(i, &p);
            prop_assert!(vm.max_abs_diff(&q) <= 1e-10);
            prop_assert!((vm.total() - 1.0).abs() <= 1e-10);
        }
    }
}
