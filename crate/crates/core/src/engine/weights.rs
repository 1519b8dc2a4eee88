//! ψ-integrals on M̄_{0,n} and the weight decomposition of sections over covers.

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::{Character, Weight, Q};

use super::EngineError;

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `∫_{M̄_{0,n}} ψ_1^{a_1} ⋯ ψ_n^{a_n}` = `(n−3)! / ∏ a_i!` when `Σ a_i = n − 3`, else 0.
pub fn psi_integral(exponents: &[u32]) -> Result<Q, EngineError> {
    let n = exponents.len();
    if n < 3 {
        return Err(EngineError::TooFewPoints(n));
    }
    let total: u64 = exponents.iter().map(|&a| a as u64).sum();
    if total != n as u64 - 3 {
        return Ok(Q::from_integer(BigInt::from(0)));
    }
    let den = exponents.iter().fold(BigInt::one(), |acc, &a| acc * factorial(a as u64));
    Ok(Q::new(factorial(n as u64 - 3), den))
}

/// Multinomial `m! / (s! ∏ a_i!)` as a rational.
pub(crate) fn multinomial(m: u64, s: u64, parts: &[u32]) -> Q {
    let den = parts.iter().fold(factorial(s), |acc, &a| acc * factorial(a as u64));
    Q::new(factorial(m), den)
}

/// Weights of `H^0` and `H^1` of the pullback of a line bundle with weight `l_p`
/// at `p` and degree `d` on an orbit of character `ω` (at `p`), along a `k`-fold cover.
///
/// `d ≥ 0`: `H^0 = {l_p − (a/k) ω : a = 0..kd}`; `d < 0`: `H^1 = {l_p − (a/k) ω : a = kd+1..−1}`.
pub fn section_weights(l_p: &Character, omega: &Character, d: i64, k: u32) -> (Vec<Weight>, Vec<Weight>) {
    assert!(k >= 1, "cover degree must be positive");
    let k = k as i64;
    let w = |a: i64| Weight::fraction(&(&l_p.scale(k) - &omega.scale(a)), k);
    if d >= 0 {
        ((0..=k * d).map(w).collect(), Vec::new())
    } else {
        (Vec::new(), ((k * d + 1)..=-1).map(w).collect())
    }
}

/// As [`section_weights`], also checking `l_p − d ω = l_q`.
pub fn section_weights_checked(
    l_p: &Character,
    l_q: &Character,
    omega: &Character,
    d: i64,
    k: u32,
) -> Result<(Vec<Weight>, Vec<Weight>), EngineError> {
    if &(l_p - &omega.scale(d)) != l_q {
        return Err(EngineError::InconsistentEdgeData(format!("{l_p} - {d}*({omega}) != {l_q}")));
    }
    Ok(section_weights(l_p, omega, d, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qq};

    #[test]
    fn psi_values() {
        assert_eq!(psi_integral(&[0, 0, 0]).unwrap(), q(1));
        assert_eq!(psi_integral(&[1, 0, 0, 0]).unwrap(), q(1));
        assert_eq!(psi_integral(&[1, 1, 0, 0, 0]).unwrap(), q(2));
        assert_eq!(psi_integral(&[2, 0, 0, 0]).unwrap(), q(0));
        assert!(matches!(psi_integral(&[0, 0]), Err(EngineError::TooFewPoints(2))));
        assert_eq!(multinomial(4, 2, &[1, 1]), q(12));
        assert_eq!(multinomial(2, 2, &[]), qq(1, 1));
    }

    #[test]
    fn section_weight_examples() {
        let om = Character::basis(1, 0);
        let (h0, h1) = section_weights(&om, &om, 2, 1);
        let s: Vec<String> = h0.iter().map(|w| w.to_string()).collect();
        assert_eq!(s, vec!["l1", "0", "-l1"]);
        assert!(h1.is_empty());
        let (h0, _) = section_weights(&om, &om, 2, 2);
        let s: Vec<String> = h0.iter().map(|w| w.to_string()).collect();
        assert_eq!(s, vec!["l1", "(l1)/2", "0", "(-l1)/2", "-l1"]);
        for k in 1..4 {
            let (h0, h1) = section_weights(&Character::basis(2, 1), &om, -1, k);
            assert!(h0.is_empty());
            assert_eq!(h1.len(), k as usize - 1);
        }
        let (_, h1) = section_weights(&Character::zero(), &om, -3, 1);
        assert_eq!(h1.len(), 2);
        assert!(section_weights_checked(&om, &Character::zero(), &om, 2, 1).is_err());
        assert!(section_weights_checked(&om, &(-&om), &om, 2, 1).is_ok());
    }
}
