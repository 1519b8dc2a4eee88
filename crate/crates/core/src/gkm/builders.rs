//! Builders for projective spaces, products, and projective bundles of split bundles.

use std::sync::Arc;

use crate::algebra::{Character, Polynomial};

use super::{BundleStructure, CurveClass, Edge, EquivariantClass, GkmError, GkmTarget, NamedClass, SplitBundle};

fn rank_of(chars: &[Character]) -> usize {
    chars.iter().map(|c| c.rank()).max().unwrap_or(0)
}

/// A single fixed point (the unit for [`product`]).
pub fn point_target(torus_rank: usize) -> GkmTarget {
    GkmTarget::new("pt", torus_rank, vec!["p0".into()], Vec::new(), 0, Vec::new()).expect("point target")
}

/// `P^n` with `T` acting by the characters `w_0, …, w_n` on the coordinates.
///
/// The edge `(p_i, p_j)` has character `w_j − w_i` at `p_i`. The hyperplane class
/// `d1` restricts to `−w_i` at `p_i`.
pub fn projective_space(n: usize, weights: Vec<Character>) -> Result<GkmTarget, GkmError> {
    if weights.len() != n + 1 {
        return Err(GkmError::InvalidInput(format!("P^{n} needs {} weights, got {}", n + 1, weights.len())));
    }
    for i in 0..=n {
        for j in (i + 1)..=n {
            if weights[i] == weights[j] {
                return Err(GkmError::DegenerateWeights(i, j));
            }
        }
    }
    let points = (0..=n).map(|i| format!("p{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..=n {
        for j in (i + 1)..=n {
            edges.push(Edge { ends: [i, j], character: &weights[j] - &weights[i], class: CurveClass(vec![1]) });
        }
    }
    let h = EquivariantClass::from_polynomials(weights.iter().map(|w| -&w.to_polynomial()).collect());
    GkmTarget::new(
        format!("P{n}"),
        rank_of(&weights).max(1),
        points,
        edges,
        1,
        vec![NamedClass { name: "d1".into(), class: h }],
    )
}

fn renumbered(classes: impl Iterator<Item = EquivariantClass>, start: usize) -> Vec<NamedClass> {
    classes.enumerate().map(|(i, class)| NamedClass { name: format!("d{}", start + i + 1), class }).collect()
}

/// `A × B`; fixed point `(i, j)` has index `i · |B| + j`. Divisor classes of both
/// factors are pulled back and renumbered `d1, d2, …` (those of `A` first).
pub fn product(a: &GkmTarget, b: &GkmTarget) -> Result<GkmTarget, GkmError> {
    let nb = b.num_points();
    let (ka, kb) = (a.lattice_rank(), b.lattice_rank());
    let points = (0..a.num_points())
        .flat_map(|i| (0..nb).map(move |j| (i, j)))
        .map(|(i, j)| format!("({},{})", a.point_name(i), b.point_name(j)))
        .collect();
    let mut edges = Vec::new();
    for e in a.edges() {
        for j in 0..nb {
            let mut class = e.class.0.clone();
            class.extend(std::iter::repeat(0).take(kb));
            edges.push(Edge { ends: [e.ends[0] * nb + j, e.ends[1] * nb + j], character: e.character.clone(), class: CurveClass(class) });
        }
    }
    for i in 0..a.num_points() {
        for e in b.edges() {
            let mut class = vec![0; ka];
            class.extend(e.class.0.iter().copied());
            edges.push(Edge { ends: [i * nb + e.ends[0], i * nb + e.ends[1]], character: e.character.clone(), class: CurveClass(class) });
        }
    }
    edges.sort_by_key(|e| e.ends);
    let pull_a = a.divisors().iter().map(|d| {
        EquivariantClass::new((0..a.num_points()).flat_map(|i| std::iter::repeat(d.class.at(i).clone()).take(nb)).collect())
    });
    let pull_b = b.divisors().iter().map(|d| {
        EquivariantClass::new((0..a.num_points()).flat_map(|_| (0..nb).map(|j| d.class.at(j).clone())).collect())
    });
    let mut divisors = renumbered(pull_a, 0);
    divisors.extend(renumbered(pull_b, a.divisors().len()));
    if b.num_points() == 1 && b.lattice_rank() == 0 {
        let mut t = a.clone();
        t.torus_rank = a.torus_rank().max(b.torus_rank());
        return Ok(t);
    }
    GkmTarget::new(
        format!("{}x{}", a.name, b.name),
        a.torus_rank().max(b.torus_rank()),
        points,
        edges,
        ka + kb,
        divisors,
    )
}

/// `P(V)`, the bundle of lines in a split bundle `V = L_1 ⊕ … ⊕ L_r` over `base`.
///
/// Fixed point `(p, i)` (index `p · r + i`) is the line `L_i|_p`. Curve classes are
/// `(base class, ⟨h, β⟩)`: the fiber line is `(0, 1)` and the lift of a base edge
/// along `L_i` is `(class, −d_i)`, `d_i` the degree of `L_i` on the edge. The
/// relative hyperplane class `h = c_1(O(1))` restricts to `−l_i(p)` at `(p, i)`.
pub fn projective_bundle(base: &GkmTarget, v: &SplitBundle) -> Result<GkmTarget, GkmError> {
    v.check(base)?;
    let r = v.rank();
    if r == 0 {
        return Err(GkmError::InvalidInput("a projective bundle needs at least one summand".into()));
    }
    for p in 0..base.num_points() {
        let ws = v.fiber_weights(p);
        for i in 0..r {
            for j in (i + 1)..r {
                if ws[i] == ws[j] {
                    return Err(GkmError::RepeatedFiberWeights(p));
                }
            }
        }
    }
    let k = base.lattice_rank();
    let idx = |p: usize, i: usize| p * r + i;
    let mut fiber_points = Vec::new();
    let mut points = Vec::new();
    for p in 0..base.num_points() {
        for i in 0..r {
            fiber_points.push((p, i));
            points.push(format!("({},L{})", base.point_name(p), i + 1));
        }
    }
    let mut edges = Vec::new();
    for p in 0..base.num_points() {
        let ws = v.fiber_weights(p);
        for i in 0..r {
            for j in (i + 1)..r {
                let mut class = vec![0; k];
                class.push(1);
                edges.push(Edge { ends: [idx(p, i), idx(p, j)], character: &ws[j] - &ws[i], class: CurveClass(class) });
            }
        }
    }
    for (ei, e) in base.edges().iter().enumerate() {
        for (i, l) in v.summands.iter().enumerate() {
            let d = l.degree_on(base, ei).ok_or(GkmError::InconsistentBundle { edge: ei, summand: i })?;
            let mut class = e.class.0.clone();
            class.push(-d);
            edges.push(Edge { ends: [idx(e.ends[0], i), idx(e.ends[1], i)], character: e.character.clone(), class: CurveClass(class) });
        }
    }
    let n = points.len();
    let pulled = base.divisors().iter().map(|d| EquivariantClass::new(fiber_points.iter().map(|&(p, _)| d.class.at(p).clone()).collect()));
    let mut divisors = renumbered(pulled, 0);
    let h: Vec<Polynomial> = fiber_points.iter().map(|&(p, i)| -&v.summands[i].weights[p].to_polynomial()).collect();
    divisors.push(super::NamedClass { name: "h".into(), class: EquivariantClass::from_polynomials(h) });
    let all_weights: Vec<Character> = v.summands.iter().flat_map(|l| l.weights.iter().cloned()).collect();
    let mut t = GkmTarget::new(
        format!("P(V)/{}", base.name),
        base.torus_rank().max(rank_of(&all_weights)),
        points,
        edges,
        k + 1,
        divisors,
    )?;
    debug_assert_eq!(t.num_points(), n);
    t.set_structure(BundleStructure { base: Arc::new(base.clone()), bundle: v.clone(), fiber_points });
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, RationalFunction};
    use crate::gkm::{LineBundle, Violation};

    fn ch(v: &[i64]) -> Character {
        Character::new(v.to_vec())
    }

    #[test]
    fn p2_generic_and_degenerate() {
        let t = projective_space(2, vec![ch(&[]), ch(&[1, 0]), ch(&[0, 1])]).unwrap();
        assert!(t.validate().is_ok());
        assert_eq!(t.euler_class_tangent(0).to_string(), "l1*l2");
        let bad = projective_space(2, vec![ch(&[-2]), ch(&[-1]), ch(&[0])]).unwrap();
        let rep = bad.validate();
        assert!(!rep.is_chain_free());
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::CollinearTangentWeights { point: 0, .. })));
        assert_eq!(projective_space(1, vec![ch(&[1]), ch(&[1])]).unwrap_err(), GkmError::DegenerateWeights(0, 1));
    }

    #[test]
    fn products() {
        let a = projective_space(1, vec![ch(&[]), ch(&[1])]).unwrap();
        let b = projective_space(1, vec![ch(&[]), ch(&[0, 1])]).unwrap();
        let f0 = product(&a, &b).unwrap();
        assert_eq!((f0.num_points(), f0.num_edges()), (4, 4));
        assert!(f0.validate().is_ok());
        assert_eq!(f0.anticanonical_degree(&CurveClass(vec![1, 1])), Some(4));
        let same = product(&a, &a).unwrap();
        assert!(!same.validate().is_chain_free());
        let ap = product(&a, &point_target(1)).unwrap();
        assert_eq!(ap.num_points(), 2);
        // Euler classes multiply
        assert_eq!(
            f0.euler_class_tangent(0),
            &(a.euler_class_tangent(0) * b.euler_class_tangent(0))
        );
    }

    #[test]
    fn bundles_satisfy_presentation() {
        // base P1(0, l1); V = L1 + L2 with l1 = (l2, l2 - l1), l2 = (0, l1): degrees +1, -1
        let base = projective_space(1, vec![ch(&[]), ch(&[1])]).unwrap();
        let v = SplitBundle::new(vec![
            LineBundle::new(vec![ch(&[0, 1]), ch(&[-1, 1])]),
            LineBundle::new(vec![ch(&[]), ch(&[1])]),
        ]);
        let t = projective_bundle(&base, &v).unwrap();
        assert!(t.validate().is_ok(), "{}", t.validate());
        let h = t.class_named("h").unwrap();
        // c_T(V)(h) = (h + l_1)(h + l_2) vanishes at every fixed point
        for (pt, &(p, _)) in t.bundle_structure().unwrap().fiber_points.iter().enumerate() {
            let mut prod = RationalFunction::one();
            for w in v.fiber_weights(p) {
                prod = &prod * &(h.at(pt) + &RationalFunction::from_polynomial(w.to_polynomial()));
            }
            assert!(prod.is_zero());
        }
        assert!(t.is_gkm_class(h).is_none());
        assert!(base.is_gkm_class(&v.chern_class(1, 2)).is_none());
        // fiber pairs to 1 with h; the -2 curve is the section of the degree +1 summand
        assert_eq!(t.pair_divisors(&CurveClass(vec![0, 1])).unwrap(), vec![q(0), q(1)]);
        assert_eq!(t.anticanonical_degree(&CurveClass(vec![1, -1])), Some(0));
        assert_eq!(t.anticanonical_degree(&CurveClass(vec![0, 1])), Some(2));
        assert!(t.integrate(&EquivariantClass::one(4)).unwrap().is_zero());
        for p in 0..4 {
            assert_eq!(t.integrate(&t.delta(p)).unwrap(), RationalFunction::one());
        }
    }

    #[test]
    fn repeated_fiber_weights_rejected() {
        let base = projective_space(1, vec![ch(&[]), ch(&[1])]).unwrap();
        let v = SplitBundle::new(vec![LineBundle::trivial(2, ch(&[0, 1])), LineBundle::trivial(2, ch(&[0, 1]))]);
        assert_eq!(projective_bundle(&base, &v).unwrap_err(), GkmError::RepeatedFiberWeights(0));
    }
}
