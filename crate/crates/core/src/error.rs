use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigenvalue iteration did not converge (dimension {dim}, {iterations} iterations)")]
    NonConvergence { dim: usize, iterations: usize },

    /// A complex eigenvalue had no conjugate partner within tolerance.
    #[error("complex eigenvalue {re}{im:+}i has no conjugate partner (nearest at distance {distance:e})")]
    UnmatchedEigenvalue { re: f64, im: f64, distance: f64 },

    #[error("bracket [{lo}, {hi}] does not isolate transition {index}: pair counts {lo_count} and {hi_count}")]
    Bracket {
        lo: f64,
        hi: f64,
        index: usize,
        lo_count: usize,
        hi_count: usize,
    },

    /// The pair count jumps by more than one across the bracket.
    #[error("ambiguous bracket [{lo}, {hi}]: pair count jumps from {lo_count} to {hi_count}")]
    AmbiguousBracket {
        lo: f64,
        hi: f64,
        lo_count: usize,
        hi_count: usize,
    },

    #[error("at coupling {coupling}: {source}")]
    AtCoupling {
        coupling: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("malformed sweep data: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn at_coupling(self, coupling: f64) -> Self {
        Error::AtCoupling {
            coupling,
            source: Box::new(self),
        }
    }

    /// Innermost error, looking through [`Error::AtCoupling`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtCoupling { source, .. } => source.root(),
            other => other,
        }
    }
}
