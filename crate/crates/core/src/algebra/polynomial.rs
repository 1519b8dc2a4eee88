//! Sparse multivariate polynomials with arbitrary-precision rational coefficients.
//!
//! Variables are addressed by a flat index (see [`Var`]). Exponent vectors are
//! stored with trailing zeros trimmed, so polynomials over different variable
//! counts compare and combine without a shared ring context.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::Q;

/// Variable addressing shared by every polynomial in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// The cone variable of the J-function.
    Z,
    /// The auxiliary weight scaling the fibres of a twisting bundle.
    X,
    /// Equivariant parameter `λ_{i+1}`.
    Lambda(usize),
    /// Scratch variable used for local expansions (never appears in results).
    Scratch,
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::Z => 0,
            Var::X => 1,
            Var::Scratch => 2,
            Var::Lambda(i) => 3 + i,
        }
    }

    pub fn from_index(i: usize) -> Var {
        match i {
            0 => Var::Z,
            1 => Var::X,
            2 => Var::Scratch,
            i => Var::Lambda(i - 3),
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::Z => "z".into(),
            Var::X => "x".into(),
            Var::Scratch => "t".into(),
            Var::Lambda(i) => format!("l{}", i + 1),
        }
    }
}

/// Exponent vector, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[u16; 8]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u16) -> Self {
        let mut m = Monomial::one();
        m.set(v.index(), e);
        m
    }

    pub fn exponent(&self, idx: usize) -> u16 {
        self.0.get(idx).copied().unwrap_or(0)
    }

    pub fn set(&mut self, idx: usize, e: u16) {
        if idx >= self.0.len() {
            if e == 0 {
                return;
            }
            self.0.resize(idx + 1, 0);
        }
        self.0[idx] = e;
        self.trim();
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let mut out: SmallVec<[u16; 8]> = SmallVec::with_capacity(n);
        for i in 0..n {
            out.push(self.exponent(i) + other.exponent(i));
        }
        Monomial(out)
    }

    /// Indices of variables with a positive exponent.
    pub fn support(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e))
    }
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), Q::one())
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(it: I) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// `Some(d)` when every term has total degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        let i = v.index();
        self.terms.keys().map(|m| m.exponent(i)).max().unwrap_or(0)
    }

    pub fn involves(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut seen = std::collections::BTreeSet::new();
        for m in self.terms.keys() {
            for (i, _) in m.support() {
                seen.insert(i);
            }
        }
        seen.into_iter().map(Var::from_index).collect()
    }

    pub fn scale(&self, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Splits into coefficients of powers of `v`: `self = Σ c_j v^j`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Polynomial> {
        let i = v.index();
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Polynomial::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(i) as usize;
            let mut rest = m.clone();
            rest.set(i, 0);
            out[e].add_term(rest, c.clone());
        }
        out
    }

    /// Replaces `v` by the polynomial `by`.
    pub fn substitute(&self, v: Var, by: &Polynomial) -> Polynomial {
        if !self.involves(v) {
            return self.clone();
        }
        let coeffs = self.coefficients_in(v);
        let mut acc = Polynomial::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * by) + c;
        }
        acc
    }

    /// Replaces each listed variable by a rational value.
    pub fn substitute_values(&self, values: &[(Var, Q)]) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = m.clone();
            for (v, val) in values {
                let e = m.exponent(v.index());
                if e > 0 {
                    coeff *= num_traits::pow(val.clone(), e as usize);
                    rest.set(v.index(), 0);
                }
            }
            out.add_term(rest, coeff);
        }
        out
    }

    /// Full evaluation; `value(var)` must be defined for every variable present.
    pub fn evaluate(&self, value: &dyn Fn(Var) -> Option<Q>) -> Option<Q> {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.support() {
                let x = value(Var::from_index(i))?;
                t *= num_traits::pow(x, e as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Exact division by `v - s` where `s` does not involve `v`.
    /// Returns `None` when the remainder is nonzero.
    pub fn div_by_root(&self, v: Var, s: &Polynomial) -> Option<Polynomial> {
        let coeffs = self.coefficients_in(v);
        let n = coeffs.len() - 1;
        if n == 0 {
            return if coeffs[0].is_zero() { Some(Polynomial::zero()) } else { None };
        }
        let mut q = vec![Polynomial::zero(); n];
        q[n - 1] = coeffs[n].clone();
        for j in (1..n).rev() {
            q[j - 1] = &coeffs[j] + &(s * &q[j]);
        }
        let rem = &coeffs[0] + &(s * &q[0]);
        if !rem.is_zero() {
            return None;
        }
        let mut out = Polynomial::zero();
        for (j, c) in q.into_iter().enumerate() {
            let shift = Monomial::var_pow(v, j as u16);
            for (m, val) in c.terms {
                out.add_term(m.mul(&shift), val);
            }
        }
        Some(out)
    }

    /// Leading coefficient under the monomial order (used for normalisation).
    pub fn leading_coefficient(&self) -> Option<&Q> {
        self.terms.values().next_back()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

pub(crate) fn fmt_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.support()
        .map(|(i, e)| {
            let n = Var::from_index(i).name();
            if e == 1 { n } else { format!("{n}^{e}") }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Canonical rendering: terms in descending monomial order, explicit `*` and `^`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.is_one() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", fmt_monomial(m))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), fmt_monomial(m))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> Q {
        Q::from_integer(BigInt::from(n))
    }
    fn l(i: usize) -> Polynomial {
        Polynomial::var(Var::Lambda(i))
    }

    #[test]
    fn difference_of_squares() {
        let a = &l(0) + &l(1);
        let b = &l(0) - &l(1);
        let expect = &(&l(0) * &l(0)) - &(&l(1) * &l(1));
        assert_eq!(&a * &b, expect);
    }

    #[test]
    fn additive_identity_and_cancellation() {
        let p = &l(0) + &Polynomial::constant(q(3));
        assert_eq!(&p + &Polynomial::zero(), p);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn synthetic_division() {
        // (l1^2 - l2^2) / (l1 - l2) = l1 + l2
        let p = &(&l(0) * &l(0)) - &(&l(1) * &l(1));
        let quo = p.div_by_root(Var::Lambda(0), &l(1)).unwrap();
        assert_eq!(quo, &l(0) + &l(1));
        assert!(l(0).div_by_root(Var::Lambda(0), &l(1)).is_none());
    }

    #[test]
    fn substitution_and_rendering() {
        let p = &(&l(0) * &Polynomial::var(Var::Z)) + &Polynomial::constant(q(2));
        let s = p.substitute(Var::Z, &(&l(1) + &Polynomial::one()));
        assert_eq!(s.to_string(), "l1*l2 + l1 + 2");
        assert_eq!(Polynomial::constant(Q::new(BigInt::from(-3), BigInt::from(2))).to_string(), "-3/2");
    }
}
