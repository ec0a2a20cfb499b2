//! Reading one of N+1 special K-bit strings with a single particle.
//!
//! String 1 is all zeros; string n ≥ 2 alternates 0- and 1-blocks of length
//! K/2^{n−1}. Each part of the uniform superposition passes one bit and picks
//! up a sign (−1)^bit. The resulting ±1 patterns are Rademacher functions,
//! so the N+1 imprinted states are orthonormal and one measurement names the
//! string with certainty.

use std::fmt;
use std::io::BufRead;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProtocolParams;
use crate::state::StateVector;
use crate::train::prepare_uniform_state;

/// Overlap deficit below 1 tolerated before a state is declared foreign.
pub const DECODE_TOL: f64 = 1e-9;

/// Bits at positions k = 1..K, stored at index k − 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Parses a line of `0`/`1` characters; whitespace between bits is ignored.
    pub fn parse(line: &str) -> Result<Self> {
        line.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialStringSet {
    n: u32,
    strings: Vec<BitString>,
}

impl SpecialStringSet {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k_sites(&self) -> usize {
        1 << self.n
    }

    /// Strings in order; `strings()[i]` is string i + 1.
    pub fn strings(&self) -> &[BitString] {
        &self.strings
    }

    /// String `index` (1-based).
    pub fn get(&self, index: usize) -> Result<&BitString> {
        index
            .checked_sub(1)
            .and_then(|i| self.strings.get(i))
            .ok_or_else(|| {
                Error::OutOfRange(format!(
                    "string index {index} not in 1..={}",
                    self.strings.len()
                ))
            })
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    /// One string per line, ASCII 0/1.
    pub fn to_lines(&self) -> String {
        self.strings.iter().map(|s| format!("{s}\n")).collect()
    }

    /// Reads a set written by [`to_lines`](Self::to_lines); blank lines are skipped.
    /// The strings must be exactly the special set for their length.
    pub fn from_lines<R: BufRead>(reader: R) -> Result<Self> {
        let mut strings = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            strings.push(BitString::parse(&line)?);
        }
        let k = strings.first().map(BitString::len).unwrap_or(0);
        if k < 2 || !k.is_power_of_two() {
            return Err(Error::Parse(format!("string length {k} is not a power of two ≥ 2")));
        }
        let expected = special_strings(k.trailing_zeros())?;
        if strings != expected.strings {
            return Err(Error::Parse(
                "strings do not form the special set for their length".into(),
            ));
        }
        Ok(expected)
    }
}

/// The N+1 strings of length 2^N.
pub fn special_strings(n: u32) -> Result<SpecialStringSet> {
    if !(1..=crate::params::MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidParams(format!(
            "string set needs 1 ≤ N ≤ {}, got {n}",
            crate::params::MAX_QUBITS
        )));
    }
    let k = 1usize << n;
    let mut strings = vec![BitString(vec![false; k])];
    for idx in 2..=n + 1 {
        let block = k >> (idx - 1);
        strings.push(BitString((0..k).map(|i| (i / block) % 2 == 1).collect()));
    }
    Ok(SpecialStringSet { n, strings })
}

/// Multiplies amplitude k by (−1)^{bit_k}.
pub fn imprint_string(state: &StateVector, bits: &BitString) -> Result<StateVector> {
    if state.len() != bits.len() {
        return Err(Error::LengthMismatch {
            state: state.len(),
            bits: bits.len(),
        });
    }
    let amps = state
        .amplitudes()
        .iter()
        .zip(bits.bits())
        .map(|(&a, &b)| if b { -a } else { a })
        .collect();
    Ok(StateVector::from_raw(amps))
}

fn uniform_for(set: &SpecialStringSet) -> StateVector {
    let params = ProtocolParams::new(set.n(), 1.0).expect("set size already validated");
    prepare_uniform_state(&params)
}

/// Reference states: the uniform superposition imprinted with each string.
pub fn reference_states(set: &SpecialStringSet) -> Vec<StateVector> {
    let uniform = uniform_for(set);
    set.strings()
        .iter()
        .map(|s| imprint_string(&uniform, s).expect("lengths match by construction"))
        .collect()
}

/// Entry (a, b) = ⟨ψ_a|ψ_b⟩ for the imprinted reference states.
pub fn string_gram_matrix(set: &SpecialStringSet) -> Vec<Vec<Complex64>> {
    let refs = reference_states(set);
    refs.iter()
        .map(|a| refs.iter().map(|b| a.inner(b)).collect())
        .collect()
}

/// Largest entrywise deviation of a Gram matrix from the identity.
pub fn gram_identity_error(gram: &[Vec<Complex64>]) -> f64 {
    gram.iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, z)| {
                let want = if i == j { 1.0 } else { 0.0 };
                (z - Complex64::new(want, 0.0)).norm()
            })
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    /// 1-based string index.
    pub index: usize,
    /// |⟨ψ_n|state⟩|² for every n in the set.
    pub overlaps: Vec<f64>,
}

/// Names the string that produced `state`: the reference with the largest
/// squared overlap, which must be 1 within [`DECODE_TOL`].
pub fn decode_string(state: &StateVector, set: &SpecialStringSet) -> Result<Decoded> {
    if state.len() != set.k_sites() {
        return Err(Error::LengthMismatch {
            state: state.len(),
            bits: set.k_sites(),
        });
    }
    let overlaps: Vec<f64> = reference_states(set)
        .iter()
        .map(|r| r.inner(state).norm_sqr())
        .collect();
    let (best, &best_overlap) = overlaps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("set is nonempty");
    if best_overlap < 1.0 - DECODE_TOL {
        return Err(Error::NotInSet { best_overlap });
    }
    Ok(Decoded {
        index: best + 1,
        overlaps,
    })
}
