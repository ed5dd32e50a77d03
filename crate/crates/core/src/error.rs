//! Error type shared by every solver layer.

use num_complex::Complex64;

/// Errors produced by evaluation, quadrature and iteration routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// Laplace-variable evaluation at the memory-kernel pole s = -beta.
    #[error("pole encountered at s = {s}")]
    Pole { s: Complex64 },

    /// A quadrature or series did not reach the requested accuracy.
    #[error("accuracy failure in {context}: requested {requested:.3e}, achieved {achieved:.3e}")]
    Accuracy {
        context: &'static str,
        requested: f64,
        achieved: f64,
    },

    /// Fixed-point iteration exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations (last increment {last_increment:.3e})")]
    NonConvergence {
        iterations: usize,
        last_increment: f64,
    },

    /// Non-finite or otherwise unusable data fed into a solver.
    #[error("data error: {0}")]
    Data(String),

    /// Invalid configuration detected before any work started.
    #[error("configuration error: {0}")]
    Config(String),

    /// Grid too coarse for the requested stencil.
    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            context,
            message: message.into(),
        }
    }
}
