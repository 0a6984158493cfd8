use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("empty part or factor list")]
    Empty,

    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),

    #[error("factor `{0}` has dimension 0")]
    ZeroDimension(String),

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry")]
    NonFinite,

    #[error("state vector has norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix has trace off by {0:.3e} from 1")]
    TraceNotOne(f64),

    #[error("matrix is not positive semidefinite (minimum eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("Kraus operators do not sum to the identity (defect {0:.3e})")]
    IncompleteKraus(f64),

    #[error("invalid projector set: {0}")]
    BadProjectors(String),

    #[error("expectation value has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),

    #[error("probability {0} lies outside [0, 1] beyond tolerance")]
    InvalidProbability(f64),

    #[error("probabilities sum to {0}, expected 1")]
    NotADistribution(f64),

    #[error("unknown outcome axis or label `{0}`")]
    UnknownOutcome(String),
}
