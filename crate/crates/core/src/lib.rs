//! Simulation of a single particle in a superposition of K = 2^N sites that
//! measures the integral I of a classical field, alongside the equivalent
//! N-qubit protocol, two classical baselines, and a single-particle reader
//! for a special family of bit strings.
//!
//! Modules:
//!
//! - [`params`], [`field`], [`state`], [`distribution`]: shared types.
//! - [`train`]: uniform superposition, phase imprint, Fourier-basis
//!   measurement and the closed-form outcome law.
//! - [`vm`]: per-spin phases, the binary label correspondence, and the
//!   product-form outcome law.
//! - [`classical`]: the Poisson click counter and the marker with ripple
//!   counting.
//! - [`stats`]: wrapped errors, exact and offset-averaged moments, asymptotic
//!   uncertainties, and the quantum-vs-counter comparison.
//! - [`strings`]: the string set, sign imprinting and decoding.
//! - [`cli`]: the `qtrain` command-line front end.

pub mod classical;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod field;
pub mod json;
pub mod numeric;
pub mod params;
pub mod state;
pub mod stats;
pub mod strings;
pub mod train;
pub mod vm;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use distribution::{ErrorDistribution, OutcomeEntry};
pub use error::{Error, Result};
pub use field::{integrate_field, FieldProfile, Quadrature};
pub use params::{make_params, ProtocolParams};
pub use state::StateVector;

/// The crate's only source of randomness: ChaCha8 keyed by `seed`, with
/// independent `stream`s for the parts of one run.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
