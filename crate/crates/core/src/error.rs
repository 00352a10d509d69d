use thiserror::Error;

/// Errors produced by the simulation and fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem size exponent n={0} (expected 1..=40)")]
    InvalidSize(u32),

    #[error("dense oracle refused N={len}: limit is {limit}")]
    SizeExceeded { len: u64, limit: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate state: squared norm {0:e} is below 1e-300")]
    DegenerateState(f64),

    #[error("p_cut={p_cut} is not reachable without noise (noiseless P={p_noiseless})")]
    PCutUnreachable { p_cut: f64, p_noiseless: f64 },

    #[error("sigma reached the ceiling {ceiling} without P dropping below p_cut")]
    CeilingExceeded { ceiling: f64 },

    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("point {index} is outside the model domain: {reason}")]
    Domain { index: usize, reason: &'static str },

    #[error("rank-deficient design: {0}")]
    RankDeficient(&'static str),

    #[error("best exponent {alpha} sits on the scan boundary")]
    AlphaAtBoundary { alpha: f64 },

    #[error("non-finite fit result")]
    NonFinite,
}

impl Error {
    /// True for errors caused by bad configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidSize(_)
                | Error::SizeExceeded { .. }
                | Error::InvalidParameter(_)
                | Error::PCutUnreachable { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
