//! Torus characters and their rational multiples.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::polynomial::{Monomial, Polynomial, Var};
use super::Q;

/// A character of `T = (C*)^m`, optionally with a coordinate for the auxiliary weight `x`.
///
/// Trailing zero coordinates are trimmed, so characters of tori of different
/// rank compare equal when they agree as characters of the larger torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(from = "RawCharacter", into = "RawCharacter")]
pub struct Character {
    coeffs: Vec<i64>,
    aux: i64,
}

/// JSON form: a plain coordinate list, or `{"coeffs": [...], "aux": k}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawCharacter {
    Plain(Vec<i64>),
    WithAux { coeffs: Vec<i64>, #[serde(default)] aux: i64 },
}

impl From<RawCharacter> for Character {
    fn from(r: RawCharacter) -> Self {
        match r {
            RawCharacter::Plain(c) => Character::new(c),
            RawCharacter::WithAux { coeffs, aux } => Character::new(coeffs).with_aux(aux),
        }
    }
}

impl From<Character> for RawCharacter {
    fn from(c: Character) -> Self {
        if c.aux == 0 {
            RawCharacter::Plain(c.coeffs)
        } else {
            RawCharacter::WithAux { coeffs: c.coeffs, aux: c.aux }
        }
    }
}

impl Character {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Character { coeffs, aux: 0 }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn aux(&self) -> i64 {
        self.aux
    }

    pub fn zero() -> Self {
        Character::default()
    }

    /// The `i`-th basis character `λ_{i+1}` in a torus of the given rank.
    pub fn basis(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Character::new(c)
    }

    pub fn with_aux(mut self, aux: i64) -> Self {
        self.aux = aux;
        self
    }

    /// Number of stored coordinates (the smallest torus rank the character lives on).
    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.aux == 0 && self.coeffs.iter().all(|&c| c == 0)
    }

    fn coords(&self, len: usize) -> Vec<i64> {
        let mut v: Vec<i64> = (0..len).map(|i| self.coeff(i)).collect();
        v.push(self.aux);
        v
    }

    /// Exact collinearity over Q: one character is a rational multiple of the other.
    /// The zero character is collinear with everything.
    pub fn is_collinear(&self, other: &Character) -> bool {
        let n = self.rank().max(other.rank());
        let a = self.coords(n);
        let b = other.coords(n);
        for i in 0..a.len() {
            for j in (i + 1)..a.len() {
                if a[i] as i128 * b[j] as i128 != a[j] as i128 * b[i] as i128 {
                    return false;
                }
            }
        }
        true
    }

    /// `Some(k)` when `self = k · other` for an integer `k`.
    pub fn integer_multiple_of(&self, other: &Character) -> Option<i64> {
        if other.is_zero() {
            return None;
        }
        let n = self.rank().max(other.rank());
        let a = self.coords(n);
        let b = other.coords(n);
        let (idx, &pivot) = b.iter().enumerate().find(|(_, &c)| c != 0)?;
        if a[idx] % pivot != 0 {
            return None;
        }
        let k = a[idx] / pivot;
        a.iter().zip(&b).all(|(x, y)| *x == k * y).then_some(k)
    }

    pub fn scale(&self, k: i64) -> Character {
        Character::new(self.coeffs.iter().map(|c| c * k).collect()).with_aux(self.aux * k)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let mut p = Polynomial::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            p.add_term(Monomial::var(Var::Lambda(i)), Q::from_integer(BigInt::from(c)));
        }
        p.add_term(Monomial::var(Var::X), Q::from_integer(BigInt::from(self.aux)));
        p
    }
}

impl Add for &Character {
    type Output = Character;
    fn add(self, rhs: &Character) -> Character {
        let n = self.rank().max(rhs.rank());
        Character::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect()).with_aux(self.aux + rhs.aux)
    }
}

impl Sub for &Character {
    type Output = Character;
    fn sub(self, rhs: &Character) -> Character {
        self + &(-rhs)
    }
}

impl Neg for &Character {
    type Output = Character;
    fn neg(self) -> Character {
        self.scale(-1)
    }
}

impl Mul<i64> for &Character {
    type Output = Character;
    fn mul(self, k: i64) -> Character {
        self.scale(k)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_polynomial())
    }
}

/// A fractional character `numer / denom` with `denom > 0`, kept in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    numer: Character,
    denom: i64,
}

impl Weight {
    pub fn new(numer: Character, denom: i64) -> Self {
        assert!(denom != 0, "fractional character with zero denominator");
        let (mut numer, mut denom) = if denom < 0 { (-&numer, -denom) } else { (numer, denom) };
        let mut g = denom;
        for &c in numer.coeffs.iter().chain(std::iter::once(&numer.aux)) {
            g = g.gcd(&c);
        }
        if g > 1 {
            numer = Character::new(numer.coeffs.iter().map(|c| c / g).collect()).with_aux(numer.aux / g);
            denom /= g;
        }
        Weight { numer, denom }
    }

    pub fn integral(c: &Character) -> Self {
        Weight::new(c.clone(), 1)
    }

    /// `c / k`, the fractional character of a `k`-fold cover of an orbit with character `c`.
    pub fn fraction(c: &Character, k: i64) -> Self {
        Weight::new(c.clone(), k)
    }

    pub fn numer(&self) -> &Character {
        &self.numer
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn to_polynomial(&self) -> Polynomial {
        self.numer.to_polynomial().scale(&Q::new(BigInt::from(1), BigInt::from(self.denom)))
    }

    /// Value at a point of the λ-coordinates (auxiliary coordinate taken as `x_value`).
    pub fn evaluate(&self, lambda: &[Q], x_value: &Q) -> Q {
        let mut acc = Q::zero();
        for (i, &c) in self.numer.coeffs.iter().enumerate() {
            if c != 0 {
                acc += &lambda[i] * Q::from_integer(BigInt::from(c));
            }
        }
        if self.numer.aux != 0 {
            acc += x_value * Q::from_integer(BigInt::from(self.numer.aux));
        }
        acc / Q::from_integer(BigInt::from(self.denom))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == 1 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "({})/{}", self.numer, self.denom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(v: &[i64]) -> Character {
        Character::new(v.to_vec())
    }

    #[test]
    fn collinearity() {
        assert!(ch(&[1, 0]).is_collinear(&ch(&[2, 0])));
        assert!(ch(&[1, 0]).is_collinear(&ch(&[-1, 0])));
        assert!(!ch(&[1, 0]).is_collinear(&ch(&[0, 1])));
        assert!(ch(&[2, -4]).is_collinear(&ch(&[-1, 2])));
        assert!(ch(&[0, 0]).is_collinear(&ch(&[3, 1])));
    }

    #[test]
    fn trailing_zeros_do_not_matter() {
        assert_eq!(ch(&[1, 0, 0]), ch(&[1]));
        assert_eq!(&ch(&[1, 2]) - &ch(&[0, 2]), ch(&[1]));
        let json = serde_json::to_string(&ch(&[1, -1])).unwrap();
        assert_eq!(json, "[1,-1]");
        let back: Character = serde_json::from_str("{\"coeffs\": [0, 3, 0], \"aux\": 1}").unwrap();
        assert_eq!(back, ch(&[0, 3]).with_aux(1));
    }

    #[test]
    fn integer_multiples() {
        assert_eq!(ch(&[3, -3]).integer_multiple_of(&ch(&[1, -1])), Some(3));
        assert_eq!(ch(&[1, 1]).integer_multiple_of(&ch(&[2, 2])), None);
        assert_eq!(ch(&[0, 0]).integer_multiple_of(&ch(&[2, 2])), Some(0));
    }

    #[test]
    fn weights_normalise() {
        assert_eq!(Weight::new(ch(&[2, 4]), 2), Weight::new(ch(&[1, 2]), 1));
        assert_eq!(Weight::new(ch(&[1, 0]), -2), Weight::new(ch(&[-1]), 2));
        assert_eq!(Weight::new(ch(&[2, 0]), 4).to_string(), "(l1)/2");
    }
}
