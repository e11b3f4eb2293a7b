use thiserror::Error;

use crate::dynamics::PicardReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("lattice mismatch")]
    LatticeMismatch,
    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),
    #[error("zero coefficient")]
    ZeroCoefficient,
    #[error("frequencies do not sum to zero")]
    FrequencySum,
    #[error("resonant coefficient triple: {0}")]
    Resonant(String),
    #[error("cost guard exceeded: {0}")]
    CostGuard(String),
    #[error("blow-up guard tripped at t = {t}: norm {norm:e} exceeds {limit:e}")]
    BlowUp { t: f64, norm: f64, limit: f64 },
    #[error("Picard iteration did not converge: {reason}")]
    NonConvergence {
        reason: String,
        report: Box<PicardReport>,
    },
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
