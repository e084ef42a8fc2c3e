use thiserror::Error;

/// Errors produced by the certification library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition (dimension, ordering, normalization) was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A determinant or wedge product collapsed below the rank tolerance
    /// for inputs that should have been in general position.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    /// An iterative procedure (optimizer, LP solver) failed to converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
