use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("covariance is ill-conditioned ({reason}); refusing to whiten")]
    IllConditionedCovariance { reason: String },

    #[error("insufficient samples: {samples} samples for {dim} input dimensions (need at least {needed})")]
    InsufficientSamples {
        samples: usize,
        dim: usize,
        needed: usize,
    },

    #[error("requested {requested} slices but only {samples} samples are available")]
    TooManySlices { requested: usize, samples: usize },

    #[error("slice {slice} holds {count} sample(s); within-slice covariance needs at least 2, re-partition with fewer slices")]
    SliceTooSmall { slice: usize, count: usize },

    #[error("subspace dimension {n} is outside 1..={m}")]
    SubspaceDimOutOfRange { n: usize, m: usize },

    #[error("bootstrap requires at least one resample")]
    NoResamples,

    #[error("sample-size grid must be strictly increasing and positive")]
    GridNotIncreasing,

    #[error("reference sample size {reference} is below 10x the largest grid size {largest}")]
    ReferenceTooSmall { reference: usize, largest: usize },

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("bad parameter `{name}`: {reason}")]
    BadParameter { name: String, reason: String },

    #[error("eigensolver failed to converge")]
    EigenFailure,
}

impl Error {
    /// Stable machine-readable identifier, used by the CLI's error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::IllConditionedCovariance { .. } => "ill_conditioned_covariance",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::TooManySlices { .. } => "too_many_slices",
            Error::SliceTooSmall { .. } => "slice_too_small",
            Error::SubspaceDimOutOfRange { .. } => "subspace_dim_out_of_range",
            Error::NoResamples => "no_resamples",
            Error::GridNotIncreasing => "grid_not_increasing",
            Error::ReferenceTooSmall { .. } => "reference_too_small",
            Error::UnknownFunction(_) => "unknown_function",
            Error::BadParameter { .. } => "bad_parameter",
            Error::EigenFailure => "eigen_failure",
        }
    }
}
