//! Summation of graph contributions into invariants.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::{AlgebraError, Coefficient, Evaluator, RationalFunction, Var, Q};
use crate::gkm::{CurveClass, GkmTarget};

use super::contribution::Context;
use super::kernel::{count_weights, CountKernel};
use super::graph::{enumerate_trees, DecoratedTree};
use super::{EngineError, EngineOptions, Insertion, Mode, Orientation, TwistSpec};

/// One localization computation.
#[derive(Clone, Debug)]
pub struct Problem<'a> {
    pub target: &'a GkmTarget,
    pub beta: CurveClass,
    pub insertions: Vec<Insertion>,
    pub twist: Option<&'a TwistSpec>,
    /// Put `1/(−z−ψ)` on the first marking.
    pub cone: bool,
    /// Take `x → 0` at the end.
    pub limit_x: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantResult {
    pub value: RationalFunction,
    /// Number of decorated trees summed (before marking assignments).
    pub trees: usize,
    pub mode: Mode,
    /// Seed of the evaluation point actually used (after resampling on poles).
    pub point_seed: Option<u64>,
    pub point: Option<Vec<Q>>,
}

impl<'a> Problem<'a> {
    pub fn new(target: &'a GkmTarget, beta: CurveClass, insertions: Vec<Insertion>) -> Self {
        Problem { target, beta, insertions, twist: None, cone: false, limit_x: false }
    }

    pub fn with_twist(mut self, twist: Option<&'a TwistSpec>) -> Self {
        self.twist = twist;
        self
    }

    pub fn with_cone(mut self, cone: bool) -> Self {
        self.cone = cone;
        self
    }

    pub fn with_limit_x(mut self, limit: bool) -> Self {
        self.limit_x = limit;
        self
    }

    fn check(&self) -> Result<(), EngineError> {
        let t = self.target;
        t.validate().into_result()?;
        if self.beta.rank() != t.lattice_rank() {
            return Err(EngineError::BadClass(self.beta.to_string()));
        }
        for (i, ins) in self.insertions.iter().enumerate() {
            if ins.class.len() != t.num_points() {
                return Err(EngineError::InvalidInsertion(format!("insertion {} has {} restrictions", i + 1, ins.class.len())));
            }
        }
        if self.cone {
            match self.insertions.first() {
                Some(first) if first.psi == 0 => {}
                _ => return Err(EngineError::InvalidInsertion("the cone marking needs an insertion without psi".into())),
            }
        }
        if let Some(tw) = self.twist {
            check_twist(t, tw)?;
        }
        Ok(())
    }
}

/// Checks weights, edge consistency, and declared orientations.
pub fn check_twist(t: &GkmTarget, tw: &TwistSpec) -> Result<(), EngineError> {
    for (i, s) in tw.summands.iter().enumerate() {
        if s.bundle.weights.len() != t.num_points() {
            return Err(EngineError::InvalidTwist(format!("summand {} has {} weights", i + 1, s.bundle.weights.len())));
        }
        for e in 0..t.num_edges() {
            let d = s
                .bundle
                .degree_on(t, e)
                .ok_or_else(|| EngineError::InvalidTwist(format!("summand {} is not an equivariant line bundle along edge {e}", i + 1)))?;
            let ok = match s.orientation {
                Orientation::Convex => d >= 0,
                Orientation::Concave => d < 0,
            };
            if !ok {
                return Err(EngineError::InvalidTwist(format!(
                    "summand {} declared {:?} has degree {d} on edge {e}",
                    i + 1,
                    s.orientation
                )));
            }
        }
    }
    Ok(())
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, EngineError> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| EngineError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

fn run<C: Coefficient>(problem: &Problem, ev: Evaluator, trees: &[DecoratedTree], workers: usize) -> Result<C, EngineError> {
    let ctx = Context::<C>::new(problem.target, ev, &problem.insertions, problem.twist, problem.cone)?;
    if problem.beta.is_zero() {
        return ctx.degree_zero();
    }
    with_pool(workers, || {
        trees
            .par_iter()
            .map(|t| {
                let s = ctx.tree_sum(t)?;
                Ok(s.mul(&C::from_q(Q::new(1.into(), (t.automorphism_order() as i64).into()))))
            })
            .try_reduce(C::zero, |a, b| Ok(a.add(&b)))
    })?
}

fn retryable(e: &EngineError) -> bool {
    matches!(e, EngineError::Algebra(AlgebraError::PoleAtPoint(_)) | EngineError::Algebra(AlgebraError::DivisionByZero))
}

/// Evaluates a problem in the requested mode.
pub fn solve(problem: &Problem, opts: &EngineOptions) -> Result<InvariantResult, EngineError> {
    problem.check()?;
    let trees = if problem.beta.is_zero() { Vec::new() } else { enumerate_trees(problem.target, &problem.beta) };
    let needs_rf = problem.cone || problem.twist.is_some_and(|t| t.auxiliary_weight);
    let (value, point_seed, point) = match opts.mode {
        Mode::Symbolic => (run::<RationalFunction>(problem, Evaluator::symbolic(), &trees, opts.workers)?, None, None),
        Mode::Evaluated { seed } => {
            let mut attempt = 0u64;
            loop {
                let s = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let ev = Evaluator::random(problem.target.torus_rank(), s);
                let r = if needs_rf {
                    run::<RationalFunction>(problem, ev.clone(), &trees, opts.workers)
                } else {
                    run::<Q>(problem, ev.clone(), &trees, opts.workers).map(RationalFunction::constant)
                };
                match r {
                    Ok(v) => break (v, Some(s), ev.lambda_point),
                    Err(e) if retryable(&e) && attempt < 16 => attempt += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    };
    let value = if problem.limit_x { value.limit_at_zero(Var::X)? } else { value };
    Ok(InvariantResult { value, trees: trees.len(), mode: opts.mode, point_seed, point })
}

/// `⟨ψ^{a_1}α_1, …, ψ^{a_n}α_n⟩_{0,n,β}` (twisted if requested).
pub fn gw_invariant(
    target: &GkmTarget,
    beta: &CurveClass,
    insertions: &[Insertion],
    twist: Option<&TwistSpec>,
    opts: &EngineOptions,
) -> Result<InvariantResult, EngineError> {
    solve(&Problem::new(target, beta.clone(), insertions.to_vec()).with_twist(twist), opts)
}

/// Σ (complex degree + ψ-power) of the insertions, when every class is homogeneous.
pub fn insertion_degree(insertions: &[Insertion]) -> Option<i64> {
    let mut total = 0i64;
    for ins in insertions {
        if ins.class.is_zero() {
            return None;
        }
        total += ins.class.degree()? as i64 + ins.psi as i64;
    }
    Some(total)
}

fn right_dimension(target: &GkmTarget, beta: &CurveClass, insertions: &[Insertion]) -> bool {
    match (target.virtual_dimension(beta, insertions.len()), insertion_degree(insertions)) {
        (Some(v), Some(d)) => v == d,
        _ => false,
    }
}

fn symbolic_constant(r: &RationalFunction, right_dim: bool) -> Result<Q, EngineError> {
    let Some(p) = r.as_polynomial() else {
        return Err(EngineError::NotConstant(r.to_string()));
    };
    if right_dim && !p.is_constant() {
        return Err(EngineError::NotConstant(r.to_string()));
    }
    Ok(p.constant_term())
}

fn agreeing_constant(a: &RationalFunction, b: &RationalFunction) -> Result<Q, EngineError> {
    if a != b {
        return Err(EngineError::NotConstant(format!("{a} vs {b} at two random points")));
    }
    a.as_constant().ok_or_else(|| EngineError::NotConstant(a.to_string()))
}

const SECOND_POINT: u64 = 0x5DEE_CE66_D1CE_5EED;

/// The non-equivariant number: the invariant must not depend on the λ's.
///
/// Symbolic mode requires a polynomial result and returns its value at λ = 0,
/// which is the whole (constant) result in the correct dimension. Evaluated
/// mode computes at two independent points and requires agreement; in the
/// wrong dimension it returns 0 without computing.
pub fn nonequivariant_invariant(
    target: &GkmTarget,
    beta: &CurveClass,
    insertions: &[Insertion],
    opts: &EngineOptions,
) -> Result<Q, EngineError> {
    let right_dim = right_dimension(target, beta, insertions);
    match opts.mode {
        Mode::Symbolic => symbolic_constant(&gw_invariant(target, beta, insertions, None, opts)?.value, right_dim),
        Mode::Evaluated { seed } => {
            if !right_dim {
                return Ok(<Q as Zero>::zero());
            }
            let a = gw_invariant(target, beta, insertions, None, opts)?.value;
            let other = EngineOptions { mode: Mode::Evaluated { seed: seed ^ SECOND_POINT }, workers: opts.workers };
            let b = gw_invariant(target, beta, insertions, None, &other)?.value;
            agreeing_constant(&a, &b)
        }
    }
}

fn kernel_run<C: Coefficient>(target: &GkmTarget, beta: &CurveClass, n: usize, tuples: &[&[Insertion]], ev: &Evaluator) -> Result<Vec<C>, EngineError> {
    let weights = tuples.iter().map(|t| count_weights::<C>(t, target.num_points(), ev)).collect::<Result<Vec<_>, _>>()?;
    let needed: BTreeSet<Vec<usize>> = weights.iter().flatten().map(|(c, _)| c.clone()).collect();
    let k = CountKernel::<C>::build(target, beta, n, ev, &needed)?;
    Ok(weights.iter().map(|w| k.pair(w)).collect())
}

/// Values at one seeded point (resampled on poles) of ψ-free tuples of length `n`.
fn kernel_values(target: &GkmTarget, beta: &CurveClass, n: usize, tuples: &[&[Insertion]], seed: u64) -> Result<Vec<Q>, EngineError> {
    let mut attempt = 0u64;
    loop {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let ev = Evaluator::random(target.torus_rank(), s);
        let r = kernel_run::<Q>(target, beta, n, tuples, &ev);
        match r {
            Err(e) if retryable(&e) && attempt < 16 => attempt += 1,
            r => return r,
        }
    }
}

/// [`nonequivariant_invariant`] for many tuples of one class. Tuples without ψ share
/// one tree sum per length; the values are the same as computed one at a time.
pub fn nonequivariant_batch(
    target: &GkmTarget,
    beta: &CurveClass,
    tuples: &[Vec<Insertion>],
    opts: &EngineOptions,
) -> Result<Vec<Q>, EngineError> {
    if beta.is_zero() || tuples.iter().flatten().any(|i| i.psi > 0) {
        return tuples.iter().map(|t| nonequivariant_invariant(target, beta, t, opts)).collect();
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, t) in tuples.iter().enumerate() {
        Problem::new(target, beta.clone(), t.clone()).check()?;
        groups.entry(t.len()).or_default().push(i);
    }
    let mut out = vec![<Q as Zero>::zero(); tuples.len()];
    for (n, idx) in groups {
        match opts.mode {
            Mode::Symbolic => {
                let ts: Vec<&[Insertion]> = idx.iter().map(|&i| tuples[i].as_slice()).collect();
                let vals = kernel_run::<RationalFunction>(target, beta, n, &ts, &Evaluator::symbolic())?;
                for (&i, v) in idx.iter().zip(vals) {
                    out[i] = symbolic_constant(&v, right_dimension(target, beta, &tuples[i]))?;
                }
            }
            Mode::Evaluated { seed } => {
                let idx: Vec<usize> = idx.into_iter().filter(|&i| right_dimension(target, beta, &tuples[i])).collect();
                if idx.is_empty() {
                    continue;
                }
                let ts: Vec<&[Insertion]> = idx.iter().map(|&i| tuples[i].as_slice()).collect();
                let a = kernel_values(target, beta, n, &ts, seed)?;
                let b = kernel_values(target, beta, n, &ts, seed ^ SECOND_POINT)?;
                for (j, &i) in idx.iter().enumerate() {
                    out[i] = agreeing_constant(&RationalFunction::constant(a[j].clone()), &RationalFunction::constant(b[j].clone()))?;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, Character};
    use crate::engine::{enumerate_decorated_graphs, enumerate_trees, graph_contribution, EulerMode, TwistSummand};
    use crate::gkm::builders::projective_space;
    use crate::gkm::{EquivariantClass, LineBundle};

    fn p(n: usize) -> GkmTarget {
        let ws = (0..=n).map(|i| Character::basis(n, i.saturating_sub(1)).scale(if i == 0 { 0 } else { 1 })).collect();
        projective_space(n, ws).unwrap()
    }

    fn pts(t: &GkmTarget, k: usize) -> Vec<Insertion> {
        (0..k).map(|i| Insertion::new(t.delta(i % t.num_points()))).collect()
    }

    #[test]
    fn lines_through_points() {
        let p1 = p(1);
        let r = gw_invariant(&p1, &CurveClass(vec![1]), &pts(&p1, 2), None, &EngineOptions::symbolic()).unwrap();
        assert_eq!(r.value, RationalFunction::one());
        let p2 = p(2);
        let n1 = nonequivariant_invariant(&p2, &CurveClass(vec![1]), &pts(&p2, 2), &EngineOptions::symbolic()).unwrap();
        assert_eq!(n1, q(1));
        let n2 = nonequivariant_invariant(&p2, &CurveClass(vec![2]), &pts(&p2, 5), &EngineOptions::symbolic()).unwrap();
        assert_eq!(n2, q(1));
    }

    #[test]
    fn degree_zero_is_triple_intersection() {
        let p2 = p(2);
        let one = EquivariantClass::one(3);
        let ins = vec![Insertion::new(one.clone()), Insertion::new(one), Insertion::new(p2.delta(1))];
        let r = gw_invariant(&p2, &CurveClass(vec![0]), &ins, None, &EngineOptions::symbolic()).unwrap();
        assert_eq!(r.value, RationalFunction::one());
    }

    #[test]
    fn marking_dp_matches_explicit_graphs() {
        let p2 = p(2);
        let h = p2.class_named("d1").unwrap().clone();
        let ins = vec![Insertion::new(p2.delta(0)), Insertion::with_psi(h.clone(), 1), Insertion::new(h.mul(&h))];
        for d in 1..=2 {
            let beta = CurveClass(vec![d]);
            let mut explicit = RationalFunction::zero();
            for (g, aut) in enumerate_decorated_graphs(&p2, &beta, ins.len()) {
                explicit = &explicit + &graph_contribution(&p2, &g, aut, &ins, None, false).unwrap();
            }
            let dp = gw_invariant(&p2, &beta, &ins, None, &EngineOptions::symbolic()).unwrap().value;
            assert_eq!(dp, explicit, "degree {d}");
        }
    }

    #[test]
    fn count_series_match_subset_dp() {
        let p2 = p(2);
        let h = p2.class_named("d1").unwrap().clone();
        let o1 = LineBundle::new(vec![Character::zero(), Character::basis(2, 0).scale(-1), Character::basis(2, 1).scale(-1)]);
        let tw = TwistSpec {
            summands: vec![TwistSummand { bundle: o1, orientation: Orientation::Convex }],
            euler: EulerMode::Direct,
            auxiliary_weight: true,
        };
        let ins = vec![Insertion::new(p2.delta(0)), Insertion::new(h.clone()), Insertion::new(h.mul(&h)), Insertion::new(h)];
        for d in 1..=2 {
            let beta = CurveClass(vec![d]);
            for twist in [None, Some(&tw)] {
                let ctx = Context::<RationalFunction>::new(&p2, Evaluator::symbolic(), &ins, twist, false).unwrap();
                assert!(ctx.symmetric());
                for t in enumerate_trees(&p2, &beta) {
                    assert_eq!(ctx.tree_sum(&t).unwrap(), ctx.tree_sum_subsets(&t).unwrap());
                }
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_the_result() {
        let p2 = p(2);
        let beta = CurveClass(vec![2]);
        let ins = pts(&p2, 5);
        let a = gw_invariant(&p2, &beta, &ins, None, &EngineOptions::symbolic().with_workers(1)).unwrap();
        let b = gw_invariant(&p2, &beta, &ins, None, &EngineOptions::symbolic().with_workers(4)).unwrap();
        assert_eq!(a, b);
        let c = gw_invariant(&p2, &beta, &ins, None, &EngineOptions::evaluated(7).with_workers(1)).unwrap();
        let d = gw_invariant(&p2, &beta, &ins, None, &EngineOptions::evaluated(7).with_workers(3)).unwrap();
        assert_eq!(c, d);
        assert_eq!(c.value, RationalFunction::one());
    }

    #[test]
    fn trivial_twist_in_degree_zero() {
        let p1 = p(1);
        let u = Character::basis(2, 1);
        let tw = TwistSpec {
            summands: vec![TwistSummand { bundle: LineBundle::trivial(2, u.clone()), orientation: Orientation::Convex }],
            euler: EulerMode::Inverse,
            auxiliary_weight: false,
        };
        let one = EquivariantClass::one(2);
        let ins = vec![Insertion::new(one.clone()), Insertion::new(one), Insertion::new(p1.delta(0))];
        let r = gw_invariant(&p1, &CurveClass(vec![0]), &ins, Some(&tw), &EngineOptions::symbolic()).unwrap();
        assert_eq!(r.value, RationalFunction::from_polynomial(u.to_polynomial()).inverse().unwrap());
    }

    #[test]
    fn orientation_is_checked_per_edge() {
        let p1 = p(1);
        let o1 = LineBundle::new(vec![Character::zero(), Character::basis(1, 0).scale(-1)]);
        assert_eq!(o1.degree_on(&p1, 0), Some(1));
        let tw = TwistSpec {
            summands: vec![TwistSummand { bundle: o1, orientation: Orientation::Concave }],
            euler: EulerMode::Inverse,
            auxiliary_weight: false,
        };
        let err = gw_invariant(&p1, &CurveClass(vec![1]), &pts(&p1, 2), Some(&tw), &EngineOptions::symbolic()).unwrap_err();
        assert!(matches!(err, EngineError::InvalidTwist(_)));
    }

    #[test]
    fn batch_matches_single_tuples() {
        let p2 = p(2);
        let h = p2.class_named("d1").unwrap().clone();
        let one = EquivariantClass::one(3);
        let beta = CurveClass(vec![2]);
        let tuples: Vec<Vec<Insertion>> = vec![
            pts(&p2, 5),
            pts(&p2, 5).into_iter().chain([Insertion::new(h.clone())]).collect(),
            vec![Insertion::new(one), Insertion::new(h.mul(&h)), Insertion::new(h.mul(&h)), Insertion::new(h.mul(&h))],
            vec![Insertion::new(h.clone()); 3],
        ];
        for opts in [EngineOptions::symbolic(), EngineOptions::evaluated(11)] {
            let batch = nonequivariant_batch(&p2, &beta, &tuples, &opts).unwrap();
            let single: Vec<Q> = tuples.iter().map(|t| nonequivariant_invariant(&p2, &beta, t, &opts).unwrap()).collect();
            assert_eq!(batch, single);
            assert_eq!(batch[0], q(1));
            assert_eq!(batch[1], q(2));
        }
    }

    #[test]
    fn wrong_dimension_vanishes() {
        let p2 = p(2);
        let v = nonequivariant_invariant(&p2, &CurveClass(vec![1]), &pts(&p2, 1), &EngineOptions::symbolic()).unwrap();
        assert_eq!(v, q(0));
    }
}
