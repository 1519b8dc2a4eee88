//! Coefficient rings used by the localization engine.
//!
//! Symbolic runs use [`RationalFunction`]. Evaluated runs substitute a random
//! rational point for the equivariant parameters; when no other variable is
//! involved they can run in plain [`Q`] arithmetic.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlgebraError, Polynomial, RationalFunction, Var, Weight, Q};

/// Where equivariant parameters go when lifted into a coefficient ring.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evaluator {
    pub lambda_point: Option<Vec<Q>>,
}

impl Evaluator {
    pub fn symbolic() -> Self {
        Evaluator { lambda_point: None }
    }

    pub fn at(point: Vec<Q>) -> Self {
        Evaluator { lambda_point: Some(point) }
    }

    /// A reproducible random point with nonzero integer coordinates in `[-1000, 1000]`.
    /// The localization sums are homogeneous, so integer points lose nothing over rational ones.
    pub fn random(rank: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let point = (0..rank)
            .map(|_| {
                let mut n: i64 = 0;
                while n == 0 {
                    n = rng.gen_range(-1000..=1000);
                }
                Q::from_integer(n.into())
            })
            .collect();
        Evaluator::at(point)
    }

    pub fn is_symbolic(&self) -> bool {
        self.lambda_point.is_none()
    }

    fn lambda_values(&self) -> Vec<(Var, Q)> {
        match &self.lambda_point {
            Some(p) => p.iter().enumerate().map(|(i, v)| (Var::Lambda(i), v.clone())).collect(),
            None => Vec::new(),
        }
    }

    /// Lifts a function of λ (and possibly `z`, `x`) into the evaluator's view.
    pub fn specialize(&self, f: &RationalFunction) -> Result<RationalFunction, AlgebraError> {
        match &self.lambda_point {
            None => Ok(f.clone()),
            Some(_) => f.substitute_values(&self.lambda_values()),
        }
    }
}

/// A commutative field in which localization sums are carried out.
pub trait Coefficient: Clone + Send + Sync + PartialEq + fmt::Debug + fmt::Display + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: Q) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inverse(&self) -> Result<Self, AlgebraError>;

    /// Lifts an exact function into the ring at the evaluator's point.
    fn lift(f: &RationalFunction, ev: &Evaluator) -> Result<Self, AlgebraError>;

    /// Lifts a fractional character.
    fn weight(w: &Weight, ev: &Evaluator) -> Result<Self, AlgebraError> {
        Self::lift(&RationalFunction::from_polynomial(w.to_polynomial()), ev)
    }

    /// Inverse of a fractional character.
    fn inverse_weight(w: &Weight, ev: &Evaluator) -> Result<Self, AlgebraError> {
        Self::weight(w, ev)?.inverse()
    }

    /// The cone variable `z`.
    fn cone_variable(ev: &Evaluator) -> Result<Self, AlgebraError> {
        Self::lift(&RationalFunction::var(Var::Z), ev)
    }

    fn to_rational_function(&self) -> RationalFunction;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Coefficient for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn from_q(q: Q) -> Self {
        RationalFunction::constant(q)
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Result<Self, AlgebraError> {
        RationalFunction::inverse(self)
    }
    fn lift(f: &RationalFunction, ev: &Evaluator) -> Result<Self, AlgebraError> {
        ev.specialize(f)
    }
    fn weight(w: &Weight, ev: &Evaluator) -> Result<Self, AlgebraError> {
        match &ev.lambda_point {
            None => Ok(RationalFunction::from_polynomial(w.to_polynomial())),
            Some(p) if w.numer().aux() == 0 => Ok(RationalFunction::constant(w.evaluate(p, &<Q as Zero>::zero()))),
            Some(_) => ev.specialize(&RationalFunction::from_polynomial(w.to_polynomial())),
        }
    }
    fn inverse_weight(w: &Weight, ev: &Evaluator) -> Result<Self, AlgebraError> {
        RationalFunction::inverse_linear(Self::weight(w, ev)?.numerator())
    }
    fn to_rational_function(&self) -> RationalFunction {
        self.clone()
    }
}

impl Coefficient for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_q(q: Q) -> Self {
        q
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Result<Self, AlgebraError> {
        if Zero::is_zero(self) {
            Err(AlgebraError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn lift(f: &RationalFunction, ev: &Evaluator) -> Result<Self, AlgebraError> {
        let s = ev.specialize(f)?;
        s.as_constant().ok_or(AlgebraError::MissingValue)
    }
    fn weight(w: &Weight, ev: &Evaluator) -> Result<Self, AlgebraError> {
        match &ev.lambda_point {
            Some(p) if w.numer().aux() == 0 => Ok(w.evaluate(p, &<Q as Zero>::zero())),
            _ => Err(AlgebraError::MissingValue),
        }
    }
    fn inverse_weight(w: &Weight, ev: &Evaluator) -> Result<Self, AlgebraError> {
        let v = Self::weight(w, ev)?;
        if Zero::is_zero(&v) {
            Err(AlgebraError::PoleAtPoint(w.to_string()))
        } else {
            Ok(v.recip())
        }
    }
    fn to_rational_function(&self) -> RationalFunction {
        RationalFunction::constant(self.clone())
    }
}

/// Polynomial helper: the polynomial as a rational function.
pub fn rf(p: Polynomial) -> RationalFunction {
    RationalFunction::from_polynomial(p)
}
