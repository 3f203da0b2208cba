use thiserror::Error;

/// Failures raised by the algebra kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not topologically nilpotent: constant term is nonzero")]
    NotNilpotent,
    #[error("log requires constant term 1")]
    LogDomain,
    #[error("log of non-unit series")]
    LogNonUnit,
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("not divisible by hbar")]
    NotDivisible,
    #[error("window overflow: need z-order {needed_m_z}, hbar order {needed_n_hbar}")]
    WindowOverflow { needed_m_z: i64, needed_n_hbar: usize },
    #[error("weight overflow: weight {weight} exceeds cap {cap}")]
    WeightOverflow { weight: u32, cap: u32 },
    #[error("invalid Cartan matrix: {0}")]
    InvalidGcm(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported pole structure: {0}")]
    PoleStructure(String),
    #[error("mismatched operands: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
