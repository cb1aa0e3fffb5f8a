use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A cause marginal `P(cause=1)` is 0 or 1.
    #[error("degenerate cause marginal: P({cause}=1) = {value} must lie strictly inside (0, 1)")]
    DegenerateCause { cause: &'static str, value: String },

    #[error("{name} = {value} is not a probability")]
    InvalidProbability { name: String, value: String },

    #[error("lambda = {lambda} outside the admissible interval [{min}, {max}]")]
    LambdaOutOfRange { lambda: String, min: String, max: String },

    /// The two datasets imply different `P(Z=0)`.
    #[error("statistically inconsistent marginals: P(Z=0) is {via_x} via X but {via_y} via Y")]
    StatisticallyInconsistent { via_x: String, via_y: String },

    /// No joint response-function distribution matches both marginal families.
    #[error("no counterfactually consistent joint model exists")]
    CounterfactuallyInfeasible,

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("theta = {0} outside [1/2, 1)")]
    ThetaOutOfRange(String),

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("query is not identifiable from the partial joint model: {0}")]
    UnidentifiableQuery(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
