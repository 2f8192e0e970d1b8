use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input data (edge endpoints, vector lengths).
    #[error("invalid input: {0}")]
    Input(String),

    /// Generator or model parameters outside their admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An operation's precondition does not hold for the given graph or operator.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A size cap or retry budget was exhausted.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An iterative eigensolver did not reach its tolerance.
    #[error(
        "eigensolver did not converge after {iterations} restarts \
         ({converged}/{requested} pairs converged, best pending residual {best_residual:e})"
    )]
    Convergence {
        iterations: usize,
        requested: usize,
        converged: usize,
        best_residual: f64,
    },

    /// An eigenpair lacks the structure an operation relies on.
    #[error("degenerate eigenpair: {0}")]
    Degenerate(String),

    /// A complex value was supplied where a real one is required.
    #[error("type error: {0}")]
    Type(String),
}
