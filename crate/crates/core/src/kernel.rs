//! Noiseless Grover evolution in the two-amplitude picture.
//!
//! Starting from the uniform superposition, every application of the Grover
//! unitary leaves the state with only two distinct amplitudes: `a` on the
//! marked entry and `b` on each of the other `N - 1` entries. The dynamics
//! then reduce to the 2x2 recursion
//!
//! ```text
//! | a' |   | 1 - 2/N   2 - 2/N | | a |
//! | b' | = |  -2/N     1 - 2/N | | b |
//! ```
//!
//! whose eigenvalues are `exp(±iφ)` with `cos φ = 1 - 2/N`, `φ = 2θ` and
//! `sin θ = 1/√N`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};

/// Largest exponent accepted by [`ProblemSize`].
pub const MAX_EXPONENT: u32 = 40;

/// Largest `N` the dense oracle will expand.
pub const ORACLE_LIMIT: u64 = 4096;

/// A phone book of `N = 2^n` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProblemSize {
    n: u32,
}

impl ProblemSize {
    pub fn new(n: u32) -> Result<Self> {
        if (1..=MAX_EXPONENT).contains(&n) {
            Ok(Self { n })
        } else {
            Err(Error::InvalidSize(n))
        }
    }

    /// Builds the size from `N` directly; `N` must be a power of two.
    pub fn from_len(len: u64) -> Result<Self> {
        if !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "N={len} is not a power of two"
            )));
        }
        Self::new(len.trailing_zeros())
    }

    /// The exponent `n`.
    pub fn n(self) -> u32 {
        self.n
    }

    /// The number of entries `N`.
    pub fn len(self) -> u64 {
        1u64 << self.n
    }

    pub fn len_f64(self) -> f64 {
        self.len() as f64
    }
}

/// The two distinct amplitudes of the collapsed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    /// Amplitude of the searched-for entry.
    pub a: f64,
    /// Amplitude shared by the remaining `N - 1` entries.
    pub b: f64,
}

impl AmplitudePair {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Probability of measuring the searched-for entry.
    pub fn probability(self) -> f64 {
        self.a * self.a
    }

    /// Squared 2-norm of the implied full `N`-vector, `a² + (N-1)·b²`.
    pub fn norm_sqr(self, size: ProblemSize) -> f64 {
        self.a * self.a + (size.len_f64() - 1.0) * self.b * self.b
    }
}

/// Rotation angles of the 2x2 Grover map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAngles {
    pub theta: f64,
    pub phi: f64,
}

/// The uniform superposition `(1/√N, 1/√N)`.
pub fn initial_state(size: ProblemSize) -> AmplitudePair {
    let amp = 1.0 / size.len_f64().sqrt();
    AmplitudePair::new(amp, amp)
}

pub fn angles(size: ProblemSize) -> RotationAngles {
    let theta = (1.0 / size.len_f64().sqrt()).asin();
    RotationAngles {
        theta,
        phi: 2.0 * theta,
    }
}

/// One noiseless Grover iteration on the amplitude pair.
#[inline]
pub fn exact_step(state: AmplitudePair, size: ProblemSize) -> AmplitudePair {
    let two_over_n = 2.0 / size.len_f64();
    let diag = 1.0 - two_over_n;
    AmplitudePair {
        a: diag * state.a + (2.0 - two_over_n) * state.b,
        b: -two_over_n * state.a + diag * state.b,
    }
}

/// Amplitudes after `m` noiseless iterations, from the closed form.
pub fn amplitude_closed_form(size: ProblemSize, m: u64) -> AmplitudePair {
    let len = size.len_f64();
    let root = (len - 1.0).sqrt();
    let (sin, cos) = (m as f64 * angles(size).phi).sin_cos();
    let scale = 1.0 / len.sqrt();
    AmplitudePair {
        a: scale * (cos + root * sin),
        b: scale * (cos - sin / root),
    }
}

/// `P(m) = sin²((2m + 1)θ)`.
pub fn success_probability(size: ProblemSize, m: u64) -> f64 {
    let s = ((2 * m + 1) as f64 * angles(size).theta).sin();
    s * s
}

/// Step count used for measurement: the better of `floor` and `ceil` of
/// `π√N/4`, ties going to the smaller count.
pub fn m_max(size: ProblemSize) -> u64 {
    let target = FRAC_PI_4 * size.len_f64().sqrt();
    let lo = target.floor() as u64;
    let hi = target.ceil() as u64;
    if hi != lo && success_probability(size, hi) > success_probability(size, lo) {
        hi
    } else {
        lo
    }
}

/// Exact location of the first probability peak: the integer nearest to
/// the continuous maximiser `π/(4θ) - 1/2`, checked against its neighbours.
pub fn m_peak(size: ProblemSize) -> u64 {
    let theta = angles(size).theta;
    let guess = (FRAC_PI_2 / (2.0 * theta) - 0.5).max(0.0).round() as u64;
    let lower = guess.saturating_sub(1);
    (lower..=guess + 1)
        .fold((lower, f64::NEG_INFINITY), |best, m| {
            let p = success_probability(size, m);
            if p > best.1 {
                (m, p)
            } else {
                best
            }
        })
        .0
}

/// Applies the dense `N x N` Grover unitary `m` times to the uniform state
/// and returns the full vector. Only meant for cross-checking the 2x2 path.
pub fn full_matrix_oracle(size: ProblemSize, m: u64) -> Result<Vec<f64>> {
    let len = size.len();
    if len > ORACLE_LIMIT {
        return Err(Error::SizeExceeded {
            len,
            limit: ORACLE_LIMIT,
        });
    }
    let dim = len as usize;
    let two_over_n = 2.0 / size.len_f64();
    // U = U2·U1 with U1 = diag(-1, 1, ..., 1) and (U2)_ij = 2/N - δ_ij.
    let entry = |i: usize, j: usize| {
        let diffusion = two_over_n - if i == j { 1.0 } else { 0.0 };
        let phase = if j == 0 { -1.0 } else { 1.0 };
        diffusion * phase
    };

    let mut state = vec![1.0 / size.len_f64().sqrt(); dim];
    let mut next = vec![0.0; dim];
    for _ in 0..m {
        for (i, out) in next.iter_mut().enumerate() {
            *out = state
                .iter()
                .enumerate()
                .map(|(j, v)| entry(i, j) * v)
                .sum();
        }
        std::mem::swap(&mut state, &mut next);
    }
    Ok(state)
}
