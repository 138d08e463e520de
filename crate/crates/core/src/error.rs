use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^H| = {max_deviation:e})")]
    NotHermitian { max_deviation: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    TraceNotUnit { trace: f64 },

    #[error("state is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("coherence too strong for the given temperatures: injected state has eigenvalue {eigenvalue:e}")]
    PositivityViolation { eigenvalue: f64 },

    #[error("index {index} out of range for {len} subsystems")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("support of the first state is not contained in the support of the second (relative entropy is infinite)")]
    SupportViolation,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical tolerance breached: {0}")]
    ToleranceBreach(String),

    #[error("trajectory is missing snapshot data: {0}")]
    MissingSnapshots(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
