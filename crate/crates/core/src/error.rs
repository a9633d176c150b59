use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch in `{field}`: expected {expected}, got {actual}")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("target {index} has n_delta = {n_delta} outside the unambiguous window [0, {limit})")]
    RangeAmbiguity { index: usize, n_delta: f64, limit: usize },

    #[error("channel delay spread exceeds the cyclic prefix: {fraction:.3e} of the CIR energy lies beyond tap {n_cp}")]
    DelaySpread { fraction: f64, n_cp: usize },

    #[error("singular equalizer: channel frequency response is zero at bin {bin}")]
    SingularEqualizer { bin: usize },

    #[error("zero transmit symbol at subcarrier {subcarrier}, symbol {symbol}")]
    ZeroTransmitSymbol { subcarrier: usize, symbol: usize },

    #[error("reference power must be positive")]
    ZeroReference,

    #[error("image contains no energy")]
    ZeroImage,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by inputs that violate a documented precondition.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::DimensionMismatch { .. }
                | Error::RangeAmbiguity { .. }
                | Error::DelaySpread { .. }
                | Error::SingularEqualizer { .. }
                | Error::ZeroTransmitSymbol { .. }
                | Error::ZeroReference
                | Error::Empty(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
