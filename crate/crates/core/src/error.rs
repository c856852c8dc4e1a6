use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring needs at least 3 sites, got {0}")]
    TooFewSites(usize),

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("site {site} outside ring of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle limited to {cap} sites, got {sites}")]
    OracleCap { sites: usize, cap: usize },

    #[error("Hamiltonian decomposition does not reproduce H (max deviation {0:e})")]
    InconsistentDecomposition(f64),
}
