//! Exact arithmetic: polynomials, characters, and rational functions with
//! linear-product denominators.

pub mod character;
pub mod coefficient;
pub mod polynomial;
pub mod rational;

pub use character::{Character, Weight};
pub use coefficient::{Coefficient, Evaluator};
pub use polynomial::{Monomial, Polynomial, Var};
pub use rational::{LinearForm, RationalFunction};

pub type Q = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a product of linear forms: {0}")]
    NotLinearProduct(String),
    #[error("expected a polynomial of degree at most one: {0}")]
    NotLinear(String),
    #[error("pole at the evaluation point: factor {0} vanishes")]
    PoleAtPoint(String),
    #[error("no limit as {0} -> 0")]
    NoLimit(String),
    #[error("a variable has no value at the evaluation point")]
    MissingValue,
}

/// Integer as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// `num / den` as a rational.
pub fn qq(num: i64, den: i64) -> Q {
    Q::new(num.into(), den.into())
}
