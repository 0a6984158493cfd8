use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Qcore(#[from] wfsim_qcore::Error),

    #[error("channel parameter is not finite")]
    NonFiniteParameter,

    #[error("CHSH sign pattern must contain exactly one negative term")]
    BadSignPattern,

    #[error("parameter grid is empty")]
    EmptyGrid,
}
