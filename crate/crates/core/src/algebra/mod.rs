//! Exact scalars: rationals, Laurent series in λ, torus weight vectors.

mod laurent;
mod rational;
mod weights;

pub use laurent::{laurent_invert, laurent_mul, LaurentSeries};
pub use rational::{rat_arith, ArithOp, Rational};
pub use weights::WeightVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("series has no nonzero leading coefficient and cannot be inverted")]
    NotInvertible,
    #[error("coefficient of λ^{exponent} is beyond the truncation order {truncation_order}")]
    UnknownCoefficient { exponent: i64, truncation_order: i64 },
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
}
