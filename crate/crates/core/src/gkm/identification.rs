//! The identification of two projective bundles over a common base whose
//! Chern classes agree: `h ↦ h'`, base classes fixed, curve classes by pairing.

use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use crate::algebra::{q, Polynomial, RationalFunction, Var, Q};

use super::{linalg, CurveClass, EquivariantClass, GkmError, GkmTarget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentificationMode {
    Equivariant,
    NonEquivariant,
}

/// `𝔉` between `P(V_1)` and `P(V_2)`.
#[derive(Clone, Debug)]
pub struct CohomologyIdentification {
    pub source: Arc<GkmTarget>,
    pub target: Arc<GkmTarget>,
    pub mode: IdentificationMode,
    curve_map: Vec<Vec<Q>>,
}

fn same_base(a: &GkmTarget, b: &GkmTarget) -> bool {
    a.num_points() == b.num_points()
        && a.edges() == b.edges()
        && a.divisors().len() == b.divisors().len()
        && a.divisors().iter().zip(b.divisors()).all(|(x, y)| x.class == y.class)
}

/// Monomials in the given classes of total degree `deg`.
fn monomials(gens: &[EquivariantClass], deg: usize, points: usize) -> Vec<EquivariantClass> {
    if deg == 0 {
        return vec![EquivariantClass::one(points)];
    }
    let mut out = Vec::new();
    fn rec(gens: &[EquivariantClass], start: usize, left: usize, acc: EquivariantClass, out: &mut Vec<EquivariantClass>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..gens.len() {
            rec(gens, i, left - 1, acc.mul(&gens[i]), out);
        }
    }
    rec(gens, 0, deg, EquivariantClass::one(points), &mut out);
    out
}

impl CohomologyIdentification {
    pub fn new(source: Arc<GkmTarget>, target: Arc<GkmTarget>, mode: IdentificationMode) -> Result<Self, GkmError> {
        let (Some(s), Some(t)) = (source.bundle_structure(), target.bundle_structure()) else {
            return Err(GkmError::NotABundle("both sides must be built as projective bundles".into()));
        };
        if !same_base(&s.base, &t.base) {
            return Err(GkmError::NotABundle("the two bundles live over different bases".into()));
        }
        if s.bundle.rank() != t.bundle.rank() {
            return Err(GkmError::NotABundle("bundle ranks differ".into()));
        }
        let base = &s.base;
        match mode {
            IdentificationMode::Equivariant => {
                for p in 0..base.num_points() {
                    let mut a = s.bundle.fiber_weights(p);
                    let mut b = t.bundle.fiber_weights(p);
                    a.sort();
                    b.sort();
                    if a != b {
                        return Err(GkmError::ChernMismatch(p));
                    }
                }
            }
            IdentificationMode::NonEquivariant => {
                // compare ∫_Y c_i(V) · m for base-divisor monomials m of complementary degree
                let dim = base.dimension();
                let gens: Vec<EquivariantClass> = base.divisors().iter().map(|d| d.class.clone()).collect();
                for i in 1..=s.bundle.rank().min(dim) {
                    let ca = s.bundle.chern_class(i, base.num_points());
                    let cb = t.bundle.chern_class(i, base.num_points());
                    for m in monomials(&gens, dim - i, base.num_points()) {
                        let va = base.integrate(&ca.mul(&m))?;
                        let vb = base.integrate(&cb.mul(&m))?;
                        let (Some(x), Some(y)) = (va.as_constant(), vb.as_constant()) else {
                            return Err(GkmError::NonEquivariantChernMismatch(format!("c{i} pairing is not a number")));
                        };
                        if x != y {
                            return Err(GkmError::NonEquivariantChernMismatch(format!("c{i}: {x} vs {y}")));
                        }
                    }
                }
            }
        }
        let curve_map = Self::solve_curve_map(&source, &target)?;
        Ok(CohomologyIdentification { source, target, mode, curve_map })
    }

    /// Matrix `M` with `𝔉β = M β`, from `(𝔉D, 𝔉β) = (D, β)` on the divisor generators.
    fn solve_curve_map(source: &GkmTarget, target: &GkmTarget) -> Result<Vec<Vec<Q>>, GkmError> {
        let k = source.lattice_rank();
        if target.lattice_rank() != k || source.divisors().len() != target.divisors().len() {
            return Err(GkmError::SingularPairing);
        }
        let basis = |i: usize| {
            let mut v = vec![0; k];
            v[i] = 1;
            CurveClass(v)
        };
        let ps: Vec<Vec<Q>> = (0..k).map(|j| source.pair_divisors(&basis(j)).ok_or(GkmError::SingularPairing)).collect::<Result<_, _>>()?;
        let pt: Vec<Vec<Q>> = (0..k).map(|j| target.pair_divisors(&basis(j)).ok_or(GkmError::SingularPairing)).collect::<Result<_, _>>()?;
        let nd = source.divisors().len();
        // rows indexed by divisors: Σ_j M[j][c] pt[j][i] = ps[c][i]
        let a: Vec<Vec<Q>> = (0..nd).map(|i| (0..k).map(|j| pt[j][i].clone()).collect()).collect();
        let b: Vec<Vec<Q>> = (0..nd).map(|i| (0..k).map(|c| ps[c][i].clone()).collect()).collect();
        linalg::solve(&a, &b).ok_or(GkmError::SingularPairing)
    }

    pub fn inverse(&self) -> Result<Self, GkmError> {
        Self::new(self.target.clone(), self.source.clone(), self.mode)
    }

    /// `𝔉β`; the image is integral for bundles over a common base.
    pub fn map_curve(&self, beta: &CurveClass) -> Result<CurveClass, GkmError> {
        let k = beta.rank();
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let v = (0..k).fold(Q::zero(), |acc, c| acc + &self.curve_map[j][c] * q(beta.0[c]));
            if !v.is_integer() {
                return Err(GkmError::SingularPairing);
            }
            out.push(v.to_integer().to_i64().ok_or(GkmError::SingularPairing)?);
        }
        Ok(CurveClass(out))
    }

    /// Writes `α = Σ_{k<r} π*(a_k) h^k`, solving the fiber Vandermonde system by
    /// Lagrange interpolation over each base point. Returns the `a_k` on the base.
    pub fn fiber_decomposition(&self, alpha: &EquivariantClass) -> Result<Vec<EquivariantClass>, GkmError> {
        let s = self.source.bundle_structure().expect("checked in new");
        decompose(&self.source, s.bundle.rank(), s.base.num_points(), alpha)
    }

    /// `𝔉α` in equivariant mode.
    pub fn map_class(&self, alpha: &EquivariantClass) -> Result<EquivariantClass, GkmError> {
        let coeffs = self.fiber_decomposition(alpha)?;
        let t = self.target.bundle_structure().expect("checked in new");
        let h = self.target.class_named("h").expect("bundle has h");
        let mut out = Vec::with_capacity(self.target.num_points());
        for (pt, &(p, _)) in t.fiber_points.iter().enumerate() {
            let mut v = RationalFunction::zero();
            let mut hp = RationalFunction::one();
            for a in &coeffs {
                v = &v + &(a.at(p) * &hp);
                hp = &hp * h.at(pt);
            }
            out.push(v);
        }
        Ok(EquivariantClass::new(out))
    }
}

fn decompose(t: &GkmTarget, r: usize, base_points: usize, alpha: &EquivariantClass) -> Result<Vec<EquivariantClass>, GkmError> {
    let s = t.bundle_structure().expect("bundle target");
    let h = t.class_named("h").expect("bundle has h");
    let x = Polynomial::var(Var::Scratch);
    let mut coeffs = vec![vec![RationalFunction::zero(); base_points]; r];
    for p in 0..base_points {
        let fiber: Vec<usize> = (0..s.fiber_points.len()).filter(|&pt| s.fiber_points[pt].0 == p).collect();
        let xs: Vec<Polynomial> = fiber.iter().map(|&pt| h.at(pt).as_polynomial().cloned().expect("h is polynomial")).collect();
        for (i, &pt) in fiber.iter().enumerate() {
            let mut num = Polynomial::one();
            let mut den = RationalFunction::one();
            for (j, xj) in xs.iter().enumerate() {
                if j == i {
                    continue;
                }
                num = &num * &(&x - xj);
                let diff = &xs[i] - xj;
                if diff.is_zero() {
                    return Err(GkmError::SingularVandermonde(p));
                }
                den = &den * &RationalFunction::from_polynomial(diff);
            }
            let w = alpha.at(pt) * &den.inverse().map_err(|_| GkmError::SingularVandermonde(p))?;
            for (k, c) in num.coefficients_in(Var::Scratch).into_iter().enumerate() {
                coeffs[k][p] = &coeffs[k][p] + &(&w * &RationalFunction::from_polynomial(c));
            }
        }
    }
    Ok(coeffs.into_iter().map(EquivariantClass::new).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Character;
    use crate::gkm::{projective_bundle, projective_space, LineBundle, SplitBundle};

    fn ch(v: &[i64]) -> Character {
        Character::new(v.to_vec())
    }

    fn base() -> GkmTarget {
        projective_space(1, vec![ch(&[]), ch(&[1])]).unwrap()
    }

    fn f0() -> GkmTarget {
        let v = SplitBundle::new(vec![LineBundle::trivial(2, ch(&[0, 1])), LineBundle::trivial(2, ch(&[0, 0, 1]))]);
        projective_bundle(&base(), &v).unwrap()
    }

    fn f2(nu: &[i64]) -> GkmTarget {
        // l1 = (mu, mu - lambda), l2 = (nu, nu + lambda): degrees +1, -1
        let mu = ch(&[0, 1]);
        let l = ch(&[1]);
        let v = SplitBundle::new(vec![
            LineBundle::new(vec![mu.clone(), &mu - &l]),
            LineBundle::new(vec![ch(nu), &ch(nu) + &l]),
        ]);
        projective_bundle(&base(), &v).unwrap()
    }

    #[test]
    fn identity_identification() {
        let a = Arc::new(f0());
        let id = CohomologyIdentification::new(a.clone(), a.clone(), IdentificationMode::Equivariant).unwrap();
        for beta in [vec![1, 0], vec![0, 1], vec![2, 3]] {
            assert_eq!(id.map_curve(&CurveClass(beta.clone())).unwrap(), CurveClass(beta));
        }
        let h = a.class_named("h").unwrap();
        assert_eq!(&id.map_class(h).unwrap(), h);
        let x = a.class_named("d1").unwrap().mul(h).add(&h.pow(2));
        assert_eq!(id.map_class(&x).unwrap(), x);
    }

    #[test]
    fn f0_f2_nonequivariant() {
        let a = Arc::new(f0());
        let b = Arc::new(f2(&[]));
        assert!(b.validate().is_ok());
        assert_eq!(
            CohomologyIdentification::new(a.clone(), b.clone(), IdentificationMode::Equivariant).unwrap_err(),
            GkmError::ChernMismatch(0)
        );
        let id = CohomologyIdentification::new(a.clone(), b.clone(), IdentificationMode::NonEquivariant).unwrap();
        assert_eq!(id.map_curve(&CurveClass(vec![0, 1])).unwrap(), CurveClass(vec![0, 1]));
        assert_eq!(id.map_curve(&CurveClass(vec![1, 0])).unwrap(), CurveClass(vec![1, 0]));
        let back = id.inverse().unwrap();
        for beta in [vec![1, 0], vec![1, -1], vec![2, 5]] {
            let b = CurveClass(beta);
            assert_eq!(back.map_curve(&id.map_curve(&b).unwrap()).unwrap(), b);
        }
    }

    #[test]
    fn chern_matched_equivariant_pair_is_not_chain_free() {
        // fiber weights {mu, mu - lambda} at both base points on the F2 side
        let mu = ch(&[0, 1]);
        let l = ch(&[1]);
        let v2 = SplitBundle::new(vec![
            LineBundle::new(vec![mu.clone(), &mu - &l]),
            LineBundle::new(vec![&mu - &l, mu.clone()]),
        ]);
        let v0 = SplitBundle::new(vec![LineBundle::trivial(2, mu.clone()), LineBundle::trivial(2, &mu - &l)]);
        let a = Arc::new(projective_bundle(&base(), &v0).unwrap());
        let b = Arc::new(projective_bundle(&base(), &v2).unwrap());
        assert!(!a.validate().is_chain_free());
        assert!(!b.validate().is_chain_free());
        let id = CohomologyIdentification::new(a.clone(), b.clone(), IdentificationMode::Equivariant).unwrap();
        let h = a.class_named("h").unwrap();
        assert_eq!(&id.map_class(h).unwrap(), b.class_named("h").unwrap());
        // degree-2 classes go through the relation h^2 = -c1 h - c2
        let h2 = id.map_class(&h.pow(2)).unwrap();
        assert_eq!(h2, b.class_named("h").unwrap().pow(2));
    }
}
