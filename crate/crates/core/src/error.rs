use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported qubit count: {0}")]
    UnsupportedQubitCount(usize),

    #[error("unphysical Bloch vector: squared norm {norm_sq} exceeds bound {bound}")]
    UnphysicalBloch { norm_sq: f64, bound: f64 },

    #[error("pure-state fidelity requires pure states (purity {0})")]
    NotPure(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("parameter `{name}` = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("Pauli probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),

    #[error("channel spec syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown channel name `{name}` at position {position}")]
    UnknownChannel { name: String, position: usize },

    #[error("channel `{name}` takes {expected} parameter(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("channel acts on {channel} qubit(s) but dataset has {requested}")]
    QubitMismatch { channel: usize, requested: usize },

    #[error("degenerate pre-normalization output (norm {0:e})")]
    DegenerateOutput(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("loss {loss} is incompatible with head {head}")]
    LossHeadMismatch {
        loss: &'static str,
        head: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset invariant violated at record {index}: {message}")]
    DatasetInvariant { index: usize, message: String },

    #[error("train/test overlap: both datasets were generated from seed {0}")]
    TrainTestOverlap(u64),
}

pub type Result<T> = core::result::Result<T, Error>;
