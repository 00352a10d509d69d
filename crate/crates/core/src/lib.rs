//! Grover's quantum search in its two-amplitude form, with per-step
//! Gaussian noise.
//!
//! The crate covers the whole measurement chain for the largest noise width
//! the search tolerates:
//!
//! * [`kernel`]: exact recursion, closed forms, rotation angles, the
//!   measurement step `m_max` and a dense `N x N` cross-check.
//! * [`noise`]: Box-Muller noise, renormalisation and seeded streams.
//! * [`search`]: the `σ` ladder, run averaging and `dσ → 0` extrapolation.
//! * [`fit`]: power-law, linear and shifted power-law least squares.
//! * [`iterated`]: repetition count and break-even cutoff of the iterated
//!   search, and the break-even table.

pub mod error;
pub mod fit;
pub mod iterated;
pub mod kernel;
pub mod noise;
pub mod search;

pub use error::{Error, Result};
pub use fit::{
    average_exponent, fit_linear, fit_power_law, fit_shifted_power, ExponentAverage,
    ExtrapolationFit, LinearFit, PowerLawFit, WeightedPoint,
};
pub use iterated::{
    build_breakeven_table, cell_seed, integer_break_even_p_cut, iterated_params, min_p_cut,
    repetition_count, BreakevenRow, BreakevenTable, IteratedParams,
};
pub use kernel::{
    amplitude_closed_form, angles, exact_step, full_matrix_oracle, initial_state, m_max, m_peak,
    success_probability, AmplitudePair, ProblemSize, RotationAngles,
};
pub use noise::{
    derive_seed, noisy_step, renormalize, sample_noise, NoiseConvention, NoiseSample, NoiseSpec,
    RandomStream,
};
pub use search::{
    extrapolate_to_zero_step, sigma_max_averaged, sigma_max_runs, sigma_max_single_run,
    summarize, trajectory_success_probability, LadderBreak, LadderConfig, RunOutcome,
    SigmaMaxStat,
};
