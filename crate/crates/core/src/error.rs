use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TerpError {
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("W^omega has odd dimension {0}")]
    OddDimension(usize),
    #[error("subspace is not Lagrangian: {0}")]
    NotLagrangian(String),
    #[error("subspace is not invariant: {0}")]
    NotInvariant(String),
    #[error("pairing is degenerate on L/zL (rank {rank} of {dim})")]
    DegeneratePairing { rank: usize, dim: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("spectral pairs mismatch: {0}")]
    SppMismatch(String),
    #[error("z^-w P(a, tau b) is not constant: {0}")]
    NonConstant(String),
    #[error("endomorphism is not an infinitesimal isometry of P: {0}")]
    NotIsometry(String),
    #[error("zN does not preserve the lattice: {0}")]
    NotPreserved(String),
    #[error("limit does not produce a point of the window model: {0}")]
    LimitNotInWindow(String),
    #[error("unit vanishes at the limit point: {0}")]
    UnitVanishes(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, TerpError>;
