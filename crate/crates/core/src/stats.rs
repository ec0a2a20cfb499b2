//! Error statistics on the ring of period αK.
//!
//! The protocol measures I mod αK, so every error is reduced into
//! (−αK/2, αK/2] before moments are taken.

use std::f64::consts::{LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::classical::{counter_analytic_uncertainty, simulate_counter_for_integral, CounterUncertainty, OverflowPolicy};
use crate::distribution::ErrorDistribution;
use crate::error::{Error, Result};
use crate::field::{integrate_field, FieldProfile};
use crate::params::ProtocolParams;
use crate::seeded_rng;
use crate::train::{outcome_distribution, OutcomeSampler};

/// (Ĩ − I) reduced into (−αK/2, αK/2].
pub fn wrap_error(estimate: f64, integral: f64, params: &ProtocolParams) -> f64 {
    wrap_delta(estimate - integral, params.range())
}

/// x reduced into (−period/2, period/2].
pub fn wrap_delta(x: f64, period: f64) -> f64 {
    let r = x - period * (x / period - 0.5).ceil();
    // ceil can land one period off when x/period − 1/2 rounds across an integer.
    if r <= -0.5 * period {
        r + period
    } else if r > 0.5 * period {
        r - period
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// ΔI = √(⟨δI²⟩ − ⟨δI⟩²).
    pub std_dev: f64,
    /// Δ′I = ⟨|δI|⟩.
    pub mean_abs: f64,
    /// ⟨δI⟩.
    pub bias: f64,
    pub n_outcomes: usize,
    pub averaged_over_offsets: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct RawMoments {
    mean: f64,
    mean_sq: f64,
    mean_abs: f64,
}

impl RawMoments {
    fn of(dist: &ErrorDistribution) -> Self {
        dist.entries.iter().fold(Self::default(), |acc, e| Self {
            mean: acc.mean + e.prob * e.delta_i,
            mean_sq: acc.mean_sq + e.prob * e.delta_i * e.delta_i,
            mean_abs: acc.mean_abs + e.prob * e.delta_i.abs(),
        })
    }

    fn report(&self, n_outcomes: usize, averaged_over_offsets: bool) -> MomentReport {
        MomentReport {
            std_dev: (self.mean_sq - self.mean * self.mean).max(0.0).sqrt(),
            mean_abs: self.mean_abs,
            bias: self.mean,
            n_outcomes,
            averaged_over_offsets,
        }
    }
}

pub fn exact_moments(dist: &ErrorDistribution) -> MomentReport {
    RawMoments::of(dist).report(dist.entries.len(), false)
}

/// Moments pooled over I = base + α(i + 1/2)/count, i = 0..count.
///
/// Half-step offsets keep every I off the grid, where the error would vanish.
pub fn offset_averaged_moments(
    params: &ProtocolParams,
    base_integral: f64,
    count: usize,
) -> Result<MomentReport> {
    if count == 0 {
        return Err(Error::InvalidParams("offset count must be at least 1".into()));
    }
    let alpha = params.alpha();
    let mut acc = RawMoments::default();
    for i in 0..count {
        let integral = base_integral + alpha * (i as f64 + 0.5) / count as f64;
        let m = RawMoments::of(&outcome_distribution(integral, params));
        acc.mean += m.mean;
        acc.mean_sq += m.mean_sq;
        acc.mean_abs += m.mean_abs;
    }
    let c = count as f64;
    let pooled = RawMoments {
        mean: acc.mean / c,
        mean_sq: acc.mean_sq / c,
        mean_abs: acc.mean_abs / c,
    };
    Ok(pooled.report(params.k_sites(), true))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticUncertainty {
    /// (10M/(√2·π))·2^{−N/2} = α·2^{N/2}/(√2·π).
    pub delta: f64,
    /// (10M/(2π²))·ln(2^N)/2^N = α·N·ln2/(2π²).
    pub mean_abs: f64,
}

pub fn asymptotic_quantum_uncertainty(params: &ProtocolParams) -> AsymptoticUncertainty {
    let ten_m = 10.0 * params.scale_m();
    let k = params.k_sites() as f64;
    let n = params.n_qubits() as f64;
    AsymptoticUncertainty {
        delta: ten_m / (SQRT_2 * PI) / k.sqrt(),
        mean_abs: ten_m / (2.0 * PI * PI) * (n * LN_2) / k,
    }
}

/// Moments of a sample of errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMoments {
    pub std_dev: f64,
    pub mean_abs: f64,
    pub bias: f64,
    pub samples: usize,
}

impl EmpiricalMoments {
    pub fn from_errors(errors: &[f64]) -> Self {
        let n = errors.len().max(1) as f64;
        let bias = errors.iter().sum::<f64>() / n;
        let var = errors.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / n;
        Self {
            std_dev: var.sqrt(),
            mean_abs: errors.iter().map(|e| e.abs()).sum::<f64>() / n,
            bias,
            samples: errors.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares y ≈ slope·x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared: if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumSummary {
    pub empirical: EmpiricalMoments,
    pub exact: MomentReport,
    pub asymptotic: AsymptoticUncertainty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterSummary {
    pub empirical: EmpiricalMoments,
    pub analytic: CounterUncertainty,
    pub overflowed_trials: usize,
}

/// Head-to-head run of the quantum protocol and the classical counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub params: ProtocolParams,
    pub integral: f64,
    pub trials: usize,
    pub seed: u64,
    pub quantum: QuantumSummary,
    pub counter: CounterSummary,
}

impl ComparisonReport {
    /// Flat CSV, one row per (strategy, source).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy,source,std_dev,mean_abs,trials,seed\n");
        let mut row = |strategy: &str, source: &str, sd: f64, ma: f64, trials: usize| {
            out.push_str(&format!(
                "{strategy},{source},{sd:.17e},{ma:.17e},{trials},{}\n",
                self.seed
            ));
        };
        let q = &self.quantum;
        let c = &self.counter;
        row("quantum", "empirical", q.empirical.std_dev, q.empirical.mean_abs, q.empirical.samples);
        row("quantum", "exact", q.exact.std_dev, q.exact.mean_abs, 0);
        row("quantum", "asymptotic", q.asymptotic.delta, q.asymptotic.mean_abs, 0);
        row("counter", "empirical", c.empirical.std_dev, c.empirical.mean_abs, c.empirical.samples);
        row("counter", "analytic", c.analytic.delta, c.analytic.mean_abs, 0);
        out
    }
}

/// Stream ids inside one seed.
const QUANTUM_STREAM: u64 = 1;
const COUNTER_STREAM: u64 = 2;

pub fn compare_integral(
    integral: f64,
    params: &ProtocolParams,
    trials: usize,
    rng_seed: u64,
) -> Result<ComparisonReport> {
    if !(0.0..params.range()).contains(&integral) {
        return Err(Error::IntegralOutOfRange {
            integral,
            range: params.range(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }

    let dist = outcome_distribution(integral, params);
    let sampler = OutcomeSampler::new(&dist);
    let mut qrng = seeded_rng(rng_seed, QUANTUM_STREAM);
    let q_errors: Vec<f64> = (0..trials).map(|_| sampler.sample(&mut qrng).delta_i).collect();

    let mut crng = seeded_rng(rng_seed, COUNTER_STREAM);
    let counter = simulate_counter_for_integral(integral, params, trials, OverflowPolicy::Wrap, &mut crng);
    let c_errors: Vec<f64> = counter
        .iter()
        .map(|t| wrap_error(t.estimate, integral, params))
        .collect();

    Ok(ComparisonReport {
        params: *params,
        integral,
        trials,
        seed: rng_seed,
        quantum: QuantumSummary {
            empirical: EmpiricalMoments::from_errors(&q_errors),
            exact: exact_moments(&dist),
            asymptotic: asymptotic_quantum_uncertainty(params),
        },
        counter: CounterSummary {
            empirical: EmpiricalMoments::from_errors(&c_errors),
            analytic: counter_analytic_uncertainty(integral, params)?,
            overflowed_trials: counter.iter().filter(|t| t.overflowed).count(),
        },
    })
}

pub fn compare_strategies(
    field: &FieldProfile,
    params: &ProtocolParams,
    trials: usize,
    rng_seed: u64,
) -> Result<ComparisonReport> {
    compare_integral(integrate_field(field), params, trials, rng_seed)
}
