use thiserror::Error;

/// Errors raised by state construction, measurement and protocol drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state has no nonzero amplitude")]
    ZeroState,

    #[error("inconsistent bitstring length: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid polarization character {0:?} (expected H, V, 0 or 1)")]
    InvalidBit(char),

    #[error("photon index {index} out of range for a {photons}-photon state")]
    PhotonOutOfRange { index: usize, photons: usize },

    #[error("photon {0} is lost")]
    PhotonLost(usize),

    #[error("the two measured photons must be distinct (got {0} twice)")]
    SamePhoton(usize),

    #[error("projector kets are not orthonormal (Gram deviation {0:e})")]
    NonOrthonormal(f64),

    #[error("partial trace needs at least one photon to keep")]
    EmptyKeep,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{requested} photons exceeds the dense-state cap of {cap}")]
    PhotonBudget { requested: usize, cap: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("label/encoding mismatch: {0}")]
    EncodingMismatch(String),

    #[error("no outcomes supplied")]
    EmptyOutcomes,

    #[error("a Pauli correction needs an identified logical outcome")]
    NotIdentified,

    #[error("conditioning event has zero probability")]
    ZeroProbability,

    #[error("the sub-party holds every accessible photon of the run")]
    SubsetCoversAll,

    #[error("no sign-bearing level-0 outcome to vote on")]
    NoSignVotes,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
