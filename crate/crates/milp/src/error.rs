use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("variable `{0}` has a non-finite bound")]
    NonFiniteBound(String),
    #[error("variable `{name}` has lower bound {lower} above upper bound {upper}")]
    InvertedBounds { name: String, lower: f64, upper: f64 },
    #[error("reference to undeclared variable index {0}")]
    UnknownVariable(usize),
    #[error("non-finite coefficient in `{0}`")]
    NonFiniteCoefficient(String),
    #[error("exhaustive enumeration needs integral variables, `{0}` is continuous")]
    ContinuousVariable(String),
    #[error("exhaustive enumeration refused: domain size {size} exceeds cap {cap}")]
    DomainTooLarge { size: f64, cap: f64 },
    /// Cannot happen for models built through `MilpModel`, whose variables
    /// are all boxed; kept so the simplex reports it rather than looping.
    #[error("linear relaxation is unbounded")]
    Unbounded,
    #[error("simplex failed to converge after {0} iterations")]
    IterationLimit(u64),
}
