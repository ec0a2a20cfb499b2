//! Classical baselines: an N-bit Poisson click counter carried through the
//! field, and a marker that leaves Poisson marks which N bits then count one
//! after another by ripple counting.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{integrate_field, FieldProfile};
use crate::params::ProtocolParams;
use crate::seeded_rng;

/// Local click rate λ(x) = φ(x)/α, so the expected click count is I/α.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickRate<'a> {
    field: &'a FieldProfile,
    alpha: f64,
}

impl ClickRate<'_> {
    pub fn at(&self, x: f64) -> f64 {
        self.field.eval(x) / self.alpha
    }

    pub fn max_rate(&self) -> f64 {
        self.field.max_value() / self.alpha
    }

    pub fn expected_clicks(&self) -> f64 {
        integrate_field(self.field) / self.alpha
    }
}

pub fn click_rate(field: &FieldProfile, alpha: f64) -> Result<ClickRate<'_>> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
    }
    Ok(ClickRate { field, alpha })
}

fn draw_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    // Poisson::new only fails for non-positive or non-finite means.
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    d.sample(rng) as u64
}

/// What the N-bit counter does past 2^N − 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverflowPolicy {
    /// Reduce mod 2^N, the same ring the quantum protocol measures on.
    #[default]
    Wrap,
    /// Stick at 2^N − 1.
    Saturate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterTrial {
    pub raw_clicks: u64,
    /// Clicks after overflow handling.
    pub clicks: u64,
    /// α · clicks.
    pub estimate: f64,
    pub overflowed: bool,
}

impl CounterTrial {
    fn new(raw_clicks: u64, params: &ProtocolParams, policy: OverflowPolicy) -> Self {
        let k = params.k_sites() as u64;
        let overflowed = raw_clicks >= k;
        let clicks = match policy {
            OverflowPolicy::Wrap => raw_clicks % k,
            OverflowPolicy::Saturate => raw_clicks.min(k - 1),
        };
        Self {
            raw_clicks,
            clicks,
            estimate: params.alpha() * clicks as f64,
            overflowed,
        }
    }
}

/// Click counts for a field whose integral is already known.
pub fn simulate_counter_for_integral<R: Rng + ?Sized>(
    integral: f64,
    params: &ProtocolParams,
    trials: usize,
    policy: OverflowPolicy,
    rng: &mut R,
) -> Vec<CounterTrial> {
    let mean = integral / params.alpha();
    (0..trials)
        .map(|_| CounterTrial::new(draw_poisson(mean, rng), params, policy))
        .collect()
}

pub fn simulate_counter_with(
    field: &FieldProfile,
    params: &ProtocolParams,
    trials: usize,
    rng_seed: u64,
    policy: OverflowPolicy,
) -> Result<Vec<CounterTrial>> {
    if trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let mut rng = seeded_rng(rng_seed, 0);
    Ok(simulate_counter_for_integral(
        integrate_field(field),
        params,
        trials,
        policy,
        &mut rng,
    ))
}

/// Counter trials with clicks ~ Poisson(I/α), wrapped mod 2^N.
pub fn simulate_counter(
    field: &FieldProfile,
    params: &ProtocolParams,
    trials: usize,
    rng_seed: u64,
) -> Result<Vec<CounterTrial>> {
    simulate_counter_with(field, params, trials, rng_seed, OverflowPolicy::Wrap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterUncertainty {
    /// √(10MI/2^N) = √(αI).
    pub delta: f64,
    /// √(20MI/(π·2^N)) = √(2/π)·delta.
    pub mean_abs: f64,
}

pub fn counter_analytic_uncertainty(integral: f64, params: &ProtocolParams) -> Result<CounterUncertainty> {
    if !(0.0..params.range()).contains(&integral) {
        return Err(Error::IntegralOutOfRange {
            integral,
            range: params.range(),
        });
    }
    let k = params.k_sites() as f64;
    let m = params.scale_m();
    Ok(CounterUncertainty {
        delta: (10.0 * m * integral / k).sqrt(),
        mean_abs: (20.0 * m * integral / (std::f64::consts::PI * k)).sqrt(),
    })
}

/// Mark positions in order of encounter along [A, B].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkTape {
    pub support: (f64, f64),
    pub marks: Vec<f64>,
}

impl MarkTape {
    pub fn new(support: (f64, f64), mut marks: Vec<f64>) -> Result<Self> {
        let (a, b) = support;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidField(format!("bad support [{a}, {b}]")));
        }
        if let Some(x) = marks.iter().find(|x| !(a..=b).contains(*x)) {
            return Err(Error::InvalidField(format!("mark {x} outside [{a}, {b}]")));
        }
        marks.sort_by(f64::total_cmp);
        Ok(Self { support, marks })
    }

    /// `count` evenly spaced marks on [0, 1].
    pub fn with_count(count: usize) -> Self {
        let marks = (0..count)
            .map(|i| (i as f64 + 0.5) / count as f64)
            .collect();
        Self {
            support: (0.0, 1.0),
            marks,
        }
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }
}

/// Marks from an inhomogeneous Poisson process with rate φ(x)/α.
///
/// Constant fields place a Poisson(Λ) number of uniform points; other kinds
/// thin a homogeneous process at the peak rate.
pub fn generate_marks_with<R: Rng + ?Sized>(
    field: &FieldProfile,
    alpha: f64,
    rng: &mut R,
) -> Result<MarkTape> {
    let rate = click_rate(field, alpha)?;
    let (a, b) = field.support();
    let width = b - a;
    let peak = rate.max_rate();
    let n = draw_poisson(peak * width, rng);
    let mut marks = Vec::with_capacity(n as usize);
    let constant = matches!(field, FieldProfile::Constant { .. });
    for _ in 0..n {
        let x = a + width * rng.random::<f64>();
        if constant || rng.random::<f64>() * peak < rate.at(x) {
            marks.push(x);
        }
    }
    MarkTape::new((a, b), marks)
}

pub fn generate_marks(field: &FieldProfile, alpha: f64, rng_seed: u64) -> Result<MarkTape> {
    let mut rng = seeded_rng(rng_seed, 0);
    generate_marks_with(field, alpha, &mut rng)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RippleTrace {
    pub initial_marks: usize,
    /// Final bit states, first bit sent (least significant) first.
    pub bits: Vec<bool>,
    /// Marks left on the tape after each pass.
    pub surviving: Vec<usize>,
}

impl RippleTrace {
    /// Counter value read from the bits.
    pub fn value(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .map(|(j, &b)| (b as u64) << j)
            .sum()
    }

    pub fn lsb_first(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn msb_first(&self) -> String {
        self.bits.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// True when the mark count did not fit in the N bits.
    pub fn wrapped(&self) -> bool {
        self.value() != self.initial_marks as u64
    }
}

/// Sends `n_bits` bits, one after another, along a copy of the tape.
///
/// Each bit starts at 0. A 0-bit meeting a mark erases it and becomes 1; a
/// 1-bit meeting a mark leaves it and becomes 0.
pub fn ripple_count_marks(tape: &MarkTape, n_bits: u32) -> RippleTrace {
    let mut marks = tape.marks.clone();
    let mut bits = Vec::with_capacity(n_bits as usize);
    let mut surviving = Vec::with_capacity(n_bits as usize);
    for _ in 0..n_bits {
        let mut bit = false;
        marks.retain(|_| {
            if bit {
                bit = false;
                true
            } else {
                bit = true;
                false
            }
        });
        bits.push(bit);
        surviving.push(marks.len());
    }
    RippleTrace {
        initial_marks: tape.len(),
        bits,
        surviving,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    #[test]
    fn rate_values() {
        let zero = FieldProfile::constant(0.0, 0.0, 1.0).unwrap();
        let r = click_rate(&zero, 1.0).unwrap();
        assert_eq!(r.at(0.5), 0.0);
        assert_eq!(r.expected_clicks(), 0.0);

        let alpha = 0.25;
        let f = FieldProfile::constant(alpha, 0.0, 1.0).unwrap();
        assert_eq!(click_rate(&f, alpha).unwrap().expected_clicks(), 1.0);
        assert!(click_rate(&f, 0.0).is_err());
    }

    #[test]
    fn poisson_mean_at_hundred() {
        let p = make_params(10, 1.0).unwrap();
        let f = FieldProfile::constant(1.0, 0.0, 100.0).unwrap();
        let trials = simulate_counter(&f, &p, 100_000, 7).unwrap();
        let mean = trials.iter().map(|t| t.raw_clicks as f64).sum::<f64>() / trials.len() as f64;
        assert!((mean - 100.0).abs() < 1.0, "{mean}");
    }

    #[test]
    fn zero_field_counter() {
        let p = make_params(5, 1.0).unwrap();
        let f = FieldProfile::constant(0.0, 0.0, 1.0).unwrap();
        for t in simulate_counter(&f, &p, 100, 1).unwrap() {
            assert_eq!(t.estimate, 0.0);
            assert!(!t.overflowed);
        }
        assert!(simulate_counter(&f, &p, 0, 1).is_err());
    }

    #[test]
    fn overflow_near_range() {
        let p = make_params(4, 1.0).unwrap();
        let f = FieldProfile::constant(15.5, 0.0, 1.0).unwrap();
        let trials = simulate_counter(&f, &p, 1000, 3).unwrap();
        assert!(trials.iter().any(|t| t.overflowed));
        for t in &trials {
            assert!(t.raw_clicks >= t.clicks);
            assert_eq!(t.clicks, t.raw_clicks % 16);
        }
        let sat = simulate_counter_with(&f, &p, 1000, 3, OverflowPolicy::Saturate).unwrap();
        for (w, s) in trials.iter().zip(&sat) {
            assert_eq!(w.raw_clicks, s.raw_clicks);
            assert_eq!(s.clicks, s.raw_clicks.min(15));
        }
    }

    #[test]
    fn analytic_values() {
        let p = make_params(10, 1.0).unwrap();
        let u = counter_analytic_uncertainty(0.0, &p).unwrap();
        assert_eq!((u.delta, u.mean_abs), (0.0, 0.0));
        let u = counter_analytic_uncertainty(100.0, &p).unwrap();
        assert!((u.delta - 10.0).abs() < 1e-12);
        let ratio = u.mean_abs / u.delta;
        assert!((ratio - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!(counter_analytic_uncertainty(-1.0, &p).is_err());
        assert!(counter_analytic_uncertainty(1024.0, &p).is_err());
    }

    #[test]
    fn marks_zero_field_and_determinism() {
        let zero = FieldProfile::constant(0.0, 0.0, 10.0).unwrap();
        assert!(generate_marks(&zero, 1.0, 5).unwrap().is_empty());

        let g = FieldProfile::gaussian(4.0, 0.0, 1.0, -5.0, 5.0).unwrap();
        let a = generate_marks(&g, 0.5, 42).unwrap();
        let b = generate_marks(&g, 0.5, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.marks.windows(2).all(|w| w[0] <= w[1]));
        assert!(a.marks.iter().all(|x| (-5.0..=5.0).contains(x)));
    }

    #[test]
    fn marks_constant_mean() {
        let alpha = 2.0;
        let f = FieldProfile::constant(alpha, 0.0, 50.0).unwrap();
        let total: usize = (0..10_000u64)
            .map(|s| generate_marks(&f, alpha, s).unwrap().len())
            .sum();
        let mean = total as f64 / 10_000.0;
        assert!((mean - 50.0).abs() < 1.0, "{mean}");
    }

    #[test]
    fn marks_thinning_mean() {
        // ∫ φ = 3·√(2π)·0.8 over ±6σ; rate φ/α with α = 0.1.
        let f = FieldProfile::gaussian(3.0, 1.0, 0.8, 1.0 - 4.8, 1.0 + 4.8).unwrap();
        let alpha = 0.1;
        let want = integrate_field(&f) / alpha;
        let seeds = 4000u64;
        let total: usize = (0..seeds)
            .map(|s| generate_marks(&f, alpha, s).unwrap().len())
            .sum();
        let mean = total as f64 / seeds as f64;
        let sigma = (want / seeds as f64).sqrt();
        assert!((mean - want).abs() < 5.0 * sigma, "{mean} vs {want}");
    }

    #[test]
    fn ripple_examples() {
        let t = ripple_count_marks(&MarkTape::with_count(0), 3);
        assert_eq!(t.bits, vec![false; 3]);

        let t = ripple_count_marks(&MarkTape::with_count(5), 3);
        assert_eq!(t.bits, vec![true, false, true]);
        assert_eq!(t.msb_first(), "101");
        assert_eq!(t.surviving, vec![2, 1, 0]);

        let t = ripple_count_marks(&MarkTape::with_count(8), 3);
        assert_eq!(t.bits, vec![false; 3]);
        assert!(t.wrapped());
    }

    #[test]
    fn ripple_leaves_input_untouched() {
        let tape = MarkTape::with_count(11);
        let before = tape.clone();
        ripple_count_marks(&tape, 4);
        assert_eq!(tape, before);
    }

    #[test]
    fn tape_validation() {
        assert!(MarkTape::new((0.0, 1.0), vec![0.5, 1.5]).is_err());
        let t = MarkTape::new((0.0, 1.0), vec![0.7, 0.2]).unwrap();
        assert_eq!(t.marks, vec![0.2, 0.7]);
    }
}
