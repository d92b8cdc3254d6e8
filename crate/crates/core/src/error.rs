use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters outside the admissible range of a catalog entry.
    #[error("invalid parameters for {kind}: {reason}")]
    Construction { kind: &'static str, reason: String },

    #[error("argument {name}={value} outside the domain of {what}")]
    Domain {
        what: &'static str,
        name: &'static str,
        value: f64,
    },

    #[error("non-finite value {value} from {what} at {at}")]
    NonFinite {
        what: &'static str,
        at: f64,
        value: f64,
    },

    #[error("{what} is not available for this Bernstein function")]
    Unsupported { what: &'static str },

    /// Laplace inversion whose node-count residual exceeds the threshold.
    #[error("Laplace inversion at t={t} has residual {residual:.3e} (threshold {threshold:.1e})")]
    InversionAccuracy {
        t: f64,
        residual: f64,
        threshold: f64,
    },

    #[error("quadrature did not converge: estimate {value}, error {achieved:.3e} after {evals} evaluations")]
    Quadrature {
        value: f64,
        achieved: f64,
        evals: usize,
    },

    #[error("transience in dimension {dim} cannot be decided: {reason}")]
    Undecidable { dim: usize, reason: String },

    #[error("process is recurrent in dimension {dim}; the Green function is infinite")]
    Recurrent { dim: usize },

    #[error("invalid simulation setup: {0}")]
    Simulation(String),
}

impl Error {
    /// True for failures that come from numerical accuracy rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. } | Error::InversionAccuracy { .. } | Error::Quadrature { .. }
        )
    }
}
