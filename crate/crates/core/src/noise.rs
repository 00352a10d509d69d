//! Per-step Gaussian noise on the amplitude pair.
//!
//! Each noisy step applies the exact recursion, adds an independent
//! Box-Muller pair `(a, b)` to the two amplitudes and renormalises so that
//! the implied `N`-vector has unit length.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::kernel::{exact_step, AmplitudePair, ProblemSize};

/// How the width parameter `σ` enters the Box-Muller transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NoiseConvention {
    /// `√(-2σ ln x₁)·(sin 2πx₂, cos 2πx₂)`: `σ` is the variance.
    PaperExact,
    /// `σ·√(-2 ln x₁)·(sin 2πx₂, cos 2πx₂)`: `σ` is the standard deviation.
    #[default]
    StandardDeviation,
}

impl NoiseConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseConvention::PaperExact => "paper",
            NoiseConvention::StandardDeviation => "stddev",
        }
    }

    /// Variance of each noise component at width `sigma`.
    pub fn variance(self, sigma: f64) -> f64 {
        match self {
            NoiseConvention::PaperExact => sigma,
            NoiseConvention::StandardDeviation => sigma * sigma,
        }
    }
}

impl fmt::Display for NoiseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper-exact" | "PAPER_EXACT" => Ok(NoiseConvention::PaperExact),
            "stddev" | "standard-deviation" | "STANDARD_DEVIATION" => {
                Ok(NoiseConvention::StandardDeviation)
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown noise convention '{other}' (expected paper|stddev)"
            ))),
        }
    }
}

/// Width and convention of the per-step noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    sigma: f64,
    convention: NoiseConvention,
}

impl NoiseSpec {
    pub fn new(sigma: f64, convention: NoiseConvention) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be finite and >= 0, got {sigma}"
            )));
        }
        Ok(Self { sigma, convention })
    }

    pub fn noiseless() -> Self {
        Self {
            sigma: 0.0,
            convention: NoiseConvention::default(),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn convention(&self) -> NoiseConvention {
        self.convention
    }
}

/// Additive noise on `(a, b)` for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSample {
    pub a: f64,
    pub b: f64,
}

/// Seeded, platform-independent uniform source.
///
/// Backed by ChaCha8; uniforms are built from the top 53 bits of each
/// 64-bit output so the sequence does not depend on any float-generation
/// convention of the `rand` ecosystem.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The seed this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.rng.next_u64() >> 11) + 1) as f64 * SCALE
    }
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child stream `index` from `master`.
///
/// Depends only on its arguments, so parallel runs are reproducible no
/// matter how they are scheduled.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

/// Draws one noise pair. Always consumes exactly two uniforms.
#[inline]
pub fn sample_noise(spec: &NoiseSpec, rng: &mut RandomStream) -> NoiseSample {
    let x1 = rng.uniform();
    let x2 = rng.uniform();
    let radius = match spec.convention {
        NoiseConvention::PaperExact => (-2.0 * spec.sigma * x1.ln()).sqrt(),
        NoiseConvention::StandardDeviation => spec.sigma * (-2.0 * x1.ln()).sqrt(),
    };
    let (sin, cos) = (TAU * x2).sin_cos();
    NoiseSample {
        a: radius * sin,
        b: radius * cos,
    }
}

/// Rescales the pair so that `a² + (N-1)·b² = 1`.
#[inline]
pub fn renormalize(state: AmplitudePair, size: ProblemSize) -> Result<AmplitudePair> {
    let norm_sqr = state.norm_sqr(size);
    if !(norm_sqr >= 1e-300) {
        return Err(Error::DegenerateState(norm_sqr));
    }
    let norm = norm_sqr.sqrt();
    Ok(AmplitudePair::new(state.a / norm, state.b / norm))
}

/// Exact step, then additive noise, then renormalisation.
#[inline]
pub fn noisy_step(
    state: AmplitudePair,
    size: ProblemSize,
    spec: &NoiseSpec,
    rng: &mut RandomStream,
) -> Result<AmplitudePair> {
    let rotated = exact_step(state, size);
    let noise = sample_noise(spec, rng);
    renormalize(
        AmplitudePair::new(rotated.a + noise.a, rotated.b + noise.b),
        size,
    )
}
