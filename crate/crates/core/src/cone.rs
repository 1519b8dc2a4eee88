//! Fixed-point restrictions of the small J-function and the principal-part recursion they satisfy.
//!
//! `J^p = Σ_β Q^β J^p_β(z)` with `J^p_0 = 1` and, for `β ≠ 0`,
//! `J^p_β = (−z)^{-1} ⟨ e_tw(p) δ_p / (−z − ψ) ⟩_{0,1,β}`, where `δ_p` is the
//! equivariant point class and `e_tw(p)` undoes the twist at the marking.
//! Poles sit at `z = 0` and at `z = ω_{p,e}/k` for edges `e` at `p`, and
//!
//! `Prin_{z = ω/k} J^p_β = C_{p,e,k} / (ω/k − z) · J^q_{β − k[e]}(ω/k)`,
//!
//! with `C_{p,e,k} = e_T(T_p) e_tw(p) Edge(e, k)`, `q` the other end of `e`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{q, Evaluator, LinearForm, Polynomial, RationalFunction, Var, Weight};
use crate::engine::contribution::Context;
use crate::engine::invariant::{solve, Problem};
use crate::engine::{classes_below, EngineError, EngineOptions, EulerMode, Insertion, TwistSpec};
use crate::gkm::{CurveClass, EquivariantClass, GkmTarget};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("J^{point} at {beta} has a pole at z = {pole}, which is not an edge value ω/k")]
    PoleSupport { point: usize, beta: CurveClass, pole: String },
    #[error("no edge at fixed point {point} has a ray through {chi}")]
    NoMatchingEdge { point: usize, chi: String },
}

impl From<crate::algebra::AlgebraError> for ConeError {
    fn from(e: crate::algebra::AlgebraError) -> Self {
        ConeError::Engine(e.into())
    }
}

/// Coefficients of `J^p` for the classes up to a bound.
#[derive(Clone, Debug, PartialEq)]
pub struct JRestriction {
    pub point: usize,
    pub coefficients: BTreeMap<CurveClass, RationalFunction>,
    pub bound: CurveClass,
}

impl JRestriction {
    pub fn coefficient(&self, beta: &CurveClass) -> Option<&RationalFunction> {
        if beta.is_zero() {
            return None;
        }
        self.coefficients.get(beta)
    }

    /// `J^p_β(z)` with `J^p_0 = 1`; `None` outside the computed range.
    pub fn value(&self, beta: &CurveClass) -> Option<RationalFunction> {
        if beta.is_zero() {
            Some(RationalFunction::one())
        } else {
            self.coefficients.get(beta).cloned()
        }
    }
}

/// `z − a` for a weight `a`.
fn pole_form(a: &Polynomial) -> LinearForm {
    let p = &Polynomial::var(Var::Z) - a;
    match LinearForm::normalize(&p).expect("z - a is linear") {
        crate::algebra::rational::Normalized::Form(_, f) => f,
        crate::algebra::rational::Normalized::Constant(_) => unreachable!("z - a involves z"),
    }
}

/// The value `a` of a pole form `z − a`.
fn pole_value(f: &LinearForm) -> Polynomial {
    &Polynomial::var(Var::Z) - &f.to_polynomial()
}

/// `e_tw(p)`: `∏ l_p` for the inverse Euler class, its inverse for the direct one.
fn twist_unit(twist: Option<&TwistSpec>, p: usize) -> Result<RationalFunction, ConeError> {
    let Some(tw) = twist else { return Ok(RationalFunction::one()) };
    let mut u = RationalFunction::one();
    for b in tw.effective_bundles() {
        u = &u * &RationalFunction::from_polynomial(b.weights[p].to_polynomial());
    }
    Ok(match tw.euler {
        EulerMode::Inverse => u,
        EulerMode::Direct => u.inverse()?,
    })
}

fn cone_insertion(t: &GkmTarget, p: usize, twist: Option<&TwistSpec>) -> Result<Insertion, ConeError> {
    let mut values = vec![RationalFunction::zero(); t.num_points()];
    values[p] = t.euler_class_tangent(p) * &twist_unit(twist, p)?;
    Ok(Insertion::new(EquivariantClass::new(values)))
}

/// Nonzero classes `γ` with `bound − γ` effective or zero, in increasing functional order.
pub fn classes_up_to(t: &GkmTarget, bound: &CurveClass) -> Vec<CurveClass> {
    classes_below(t, bound)
}

/// The edges at `p` and cover degrees whose pole `ω_{p,e}/k` can appear in `J^p_β`.
fn admissible_covers(t: &GkmTarget, p: usize, beta: &CurveClass) -> Vec<(usize, u32)> {
    let below = classes_below(t, beta);
    let mut out = Vec::new();
    for &e in t.incident(p) {
        let c = &t.edge(e).class;
        let mut k = 1u32;
        while below.contains(&c.scale(k as i64)) {
            out.push((e, k));
            k += 1;
        }
    }
    out
}

fn check_support(t: &GkmTarget, p: usize, beta: &CurveClass, f: &RationalFunction) -> Result<(), ConeError> {
    let allowed: Vec<Polynomial> = admissible_covers(t, p, beta)
        .into_iter()
        .map(|(e, k)| Weight::fraction(&t.edge(e).character_at(p), k as i64).to_polynomial())
        .collect();
    for (form, _) in f.poles_in(Var::Z) {
        let a = pole_value(&form);
        if !a.is_zero() && !allowed.contains(&a) {
            return Err(ConeError::PoleSupport { point: p, beta: beta.clone(), pole: a.to_string() });
        }
    }
    Ok(())
}

/// `J^p` for every class up to `bound`, checking the pole support of each coefficient.
pub fn compute_j_restriction(
    t: &GkmTarget,
    p: usize,
    bound: &CurveClass,
    twist: Option<&TwistSpec>,
    workers: usize,
) -> Result<JRestriction, ConeError> {
    let j = j_unchecked(t, p, bound, twist, workers)?;
    for (beta, f) in &j.coefficients {
        check_support(t, p, beta, f)?;
    }
    Ok(j)
}

/// `J^p` for every fixed point.
pub fn compute_all(t: &GkmTarget, bound: &CurveClass, twist: Option<&TwistSpec>, workers: usize) -> Result<Vec<JRestriction>, ConeError> {
    (0..t.num_points()).map(|p| compute_j_restriction(t, p, bound, twist, workers)).collect()
}

fn j_unchecked(t: &GkmTarget, p: usize, bound: &CurveClass, twist: Option<&TwistSpec>, workers: usize) -> Result<JRestriction, ConeError> {
    let opts = EngineOptions::symbolic().with_workers(workers);
    let ins = cone_insertion(t, p, twist)?;
    let minus_z_inv = RationalFunction::var(Var::Z).inverse()?.scale(&q(-1));
    let mut coefficients = BTreeMap::new();
    for beta in classes_up_to(t, bound) {
        let g = solve(&Problem::new(t, beta.clone(), vec![ins.clone()]).with_twist(twist).with_cone(true), &opts)?.value;
        coefficients.insert(beta, &g * &minus_z_inv);
    }
    Ok(JRestriction { point: p, coefficients, bound: bound.clone() })
}

/// Principal part of `J_β` at `z = χ`; zero when there is no pole there.
pub fn principal_part(j: &JRestriction, beta: &CurveClass, chi: &Weight) -> Result<RationalFunction, ConeError> {
    let Some(f) = j.coefficient(beta) else { return Ok(RationalFunction::zero()) };
    Ok(f.principal_part(&pole_form(&chi.to_polynomial()))?)
}

/// `C_{p,e,k} = e_T(T_p) e_tw(p) Edge(e, k)`.
pub fn recursion_coefficient(t: &GkmTarget, p: usize, e: usize, k: u32, twist: Option<&TwistSpec>) -> Result<RationalFunction, ConeError> {
    let ctx = Context::<RationalFunction>::new(t, Evaluator::symbolic(), &[], twist, false)?;
    let edge = ctx.edge_factor(e, k)?;
    Ok(&(&edge * t.euler_class_tangent(p)) * &twist_unit(twist, p)?)
}

/// The edge at `p` and cover degree with `ω_{p,e}/k = χ`.
pub fn matching_cover(t: &GkmTarget, p: usize, chi: &Weight) -> Option<(usize, u32)> {
    t.incident(p).iter().find_map(|&e| {
        // ω/k = c/m  ⇔  m·ω = k·c
        let k = t.edge(e).character_at(p).scale(chi.denom()).integer_multiple_of(chi.numer())?;
        (k >= 1).then_some((e, k as u32))
    })
}

/// Predicted principal part of `J^p_β` at `z = χ`.
pub fn recursion_rhs(
    t: &GkmTarget,
    p: usize,
    chi: &Weight,
    js: &[JRestriction],
    beta: &CurveClass,
    twist: Option<&TwistSpec>,
) -> Result<RationalFunction, ConeError> {
    let (e, k) = matching_cover(t, p, chi).ok_or_else(|| ConeError::NoMatchingEdge { point: p, chi: chi.to_string() })?;
    let shift = t.edge(e).class.scale(k as i64);
    if !classes_below(t, beta).contains(&shift) {
        return Ok(RationalFunction::zero());
    }
    let rest = beta.sub(&shift);
    let other = t.edge(e).other(p);
    let jq = js
        .iter()
        .find(|j| j.point == other)
        .and_then(|j| j.value(&rest))
        .ok_or_else(|| EngineError::BadClass(format!("J^{other} not computed at {rest}")))?;
    let a = chi.to_polynomial();
    let at = jq.substitute_linear(Var::Z, &a)?;
    let c = recursion_coefficient(t, p, e, k, twist)?;
    let simple = RationalFunction::inverse_linear(&(&a - &Polynomial::var(Var::Z)))?;
    Ok(&(&c * &simple) * &at)
}

/// One principal-part comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub point: usize,
    pub beta: String,
    pub edge: usize,
    pub cover: u32,
    pub pole: String,
    pub order: u32,
    pub predicted: String,
    pub computed: String,
    pub matches: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RecursionReport {
    pub comparisons: Vec<Comparison>,
    /// Coefficients with a pole away from `0` and the edge values.
    pub support_violations: Vec<String>,
    /// Coefficients that do not vanish as `z → ∞`.
    pub growth_violations: Vec<String>,
    pub errors: Vec<String>,
    pub max_pole_order: u32,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.support_violations.is_empty()
            && self.growth_violations.is_empty()
            && self.errors.is_empty()
            && self.comparisons.iter().all(|c| c.matches)
    }

    pub fn mismatches(&self) -> usize {
        self.comparisons.iter().filter(|c| !c.matches).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub workers: usize,
    /// Test hook: doubles the first recursion coefficient.
    pub inject_fault: bool,
}

/// Checks every principal part of every `J^p_β` up to `bound` against the recursion.
pub fn verify_recursion(t: &GkmTarget, bound: &CurveClass, twist: Option<&TwistSpec>, opts: VerifyOptions) -> RecursionReport {
    let mut report = RecursionReport::default();
    if let Err(e) = t.validate().into_result() {
        report.errors.push(e.to_string());
        return report;
    }
    let js = match (0..t.num_points()).map(|p| j_unchecked(t, p, bound, twist, opts.workers)).collect::<Result<Vec<_>, _>>() {
        Ok(js) => js,
        Err(e) => {
            report.errors.push(e.to_string());
            return report;
        }
    };
    let mut tasks = Vec::new();
    for j in &js {
        for (beta, f) in &j.coefficients {
            if !f.vanishes_at_infinity(Var::Z) {
                report.growth_violations.push(format!("J^{} at {beta}", j.point));
            }
            if let Err(e) = check_support(t, j.point, beta, f) {
                report.support_violations.push(e.to_string());
            }
            for (_, m) in f.poles_in(Var::Z) {
                report.max_pole_order = report.max_pole_order.max(m);
            }
            for (e, k) in admissible_covers(t, j.point, beta) {
                tasks.push((j.point, beta.clone(), e, k));
            }
        }
    }
    let faulty = opts.inject_fault.then(|| tasks.first().cloned()).flatten();
    let results: Vec<Result<Comparison, String>> = tasks
        .par_iter()
        .map(|(p, beta, e, k)| {
            let chi = Weight::fraction(&t.edge(*e).character_at(*p), *k as i64);
            let mut predicted = recursion_rhs(t, *p, &chi, &js, beta, twist).map_err(|e| e.to_string())?;
            if faulty.as_ref() == Some(&(*p, beta.clone(), *e, *k)) {
                predicted = predicted.scale(&q(2));
            }
            let computed = principal_part(&js[*p], beta, &chi).map_err(|e| e.to_string())?;
            let form = pole_form(&chi.to_polynomial());
            let order = js[*p].coefficients[beta].denominator().find(|(f, _)| **f == form).map_or(0, |(_, m)| m);
            Ok(Comparison {
                point: *p,
                beta: beta.to_string(),
                edge: *e,
                cover: *k,
                pole: chi.to_string(),
                order,
                matches: predicted == computed,
                predicted: predicted.to_string(),
                computed: computed.to_string(),
            })
        })
        .collect();
    for r in results {
        match r {
            Ok(c) => report.comparisons.push(c),
            Err(e) => report.errors.push(e),
        }
    }
    report
}

/// Pole locations (as text) and orders of a coefficient in `z`.
pub fn pole_table(f: &RationalFunction) -> HashMap<String, u32> {
    f.poles_in(Var::Z).into_iter().map(|(form, m)| (pole_value(&form).to_string(), m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Character;
    use crate::engine::{Orientation, TwistSummand};
    use crate::gkm::builders::{product, projective_bundle, projective_space};
    use crate::gkm::{LineBundle, SplitBundle};

    fn pn(n: usize) -> GkmTarget {
        let mut ws = vec![Character::zero()];
        ws.extend((0..n).map(|i| Character::basis(n, i)));
        projective_space(n, ws).unwrap()
    }

    /// `1/∏_{m=1}^d ∏_j (w_j − w_p − m z)` for `P^n` (restriction of the toric J-function).
    fn toric_j(n: usize, p: usize, d: i64) -> RationalFunction {
        let mut ws = vec![Character::zero()];
        ws.extend((0..n).map(|i| Character::basis(n, i)));
        let z = Polynomial::var(Var::Z);
        let mut out = RationalFunction::one();
        for m in 1..=d {
            for w in &ws {
                let f = &(&(w - &ws[p]).to_polynomial() - &z.scale(&q(m)));
                out = &out * &RationalFunction::inverse_linear(f).unwrap();
            }
        }
        out
    }

    #[test]
    fn projective_space_matches_toric_formula() {
        for (n, dmax) in [(1usize, 3i64), (2, 2)] {
            let t = pn(n);
            for p in 0..=n {
                let j = compute_j_restriction(&t, p, &CurveClass(vec![dmax]), None, 0).unwrap();
                for d in 1..=dmax {
                    assert_eq!(j.coefficients[&CurveClass(vec![d])], toric_j(n, p, d), "P{n}, point {p}, degree {d}");
                }
            }
        }
    }

    #[test]
    fn principal_part_examples() {
        let t = pn(1);
        let j = compute_j_restriction(&t, 0, &CurveClass(vec![1]), None, 0).unwrap();
        let lambda = Character::basis(1, 0);
        // no pole at 2λ
        assert!(principal_part(&j, &CurveClass(vec![1]), &Weight::integral(&lambda.scale(2))).unwrap().is_zero());
        let prin = principal_part(&j, &CurveClass(vec![1]), &Weight::integral(&lambda)).unwrap();
        let rhs = recursion_rhs(&t, 0, &Weight::integral(&lambda), &[j.clone(), compute_j_restriction(&t, 1, &CurveClass(vec![1]), None, 0).unwrap()], &CurveClass(vec![1]), None).unwrap();
        assert_eq!(prin, rhs);
        assert!(matches!(
            recursion_rhs(&t, 0, &Weight::integral(&lambda.scale(-1)), &[j], &CurveClass(vec![1]), None),
            Err(ConeError::NoMatchingEdge { .. })
        ));
    }

    #[test]
    fn recursion_on_projective_spaces() {
        for (n, d) in [(1usize, 3i64), (2, 2)] {
            let r = verify_recursion(&pn(n), &CurveClass(vec![d]), None, VerifyOptions::default());
            assert!(r.passed(), "{r:?}");
            assert!(r.comparisons.iter().any(|c| c.cover == 2));
        }
    }

    #[test]
    fn recursion_on_hirzebruch_surfaces() {
        let base = pn(1);
        let fiber = projective_space(1, vec![Character::zero(), Character::basis(3, 2)]).unwrap();
        let f0 = product(&base, &fiber).unwrap();
        let r = verify_recursion(&f0, &CurveClass(vec![1, 1]), None, VerifyOptions::default());
        assert!(r.passed(), "{r:?}");
        let v = SplitBundle::new(vec![
            LineBundle::new(vec![Character::basis(2, 1), &Character::basis(2, 1) - &Character::basis(2, 0)]),
            LineBundle::new(vec![Character::zero(), Character::basis(2, 0)]),
        ]);
        let f2 = projective_bundle(&base, &v).unwrap();
        let r = verify_recursion(&f2, &CurveClass(vec![1, 1]), None, VerifyOptions::default());
        assert!(r.passed(), "{r:?}");
        assert!(!r.comparisons.is_empty());
    }

    #[test]
    fn recursion_with_pullback_twist() {
        let t = projective_space(1, vec![Character::zero(), Character::basis(2, 0)]).unwrap();
        let tw = TwistSpec {
            summands: vec![TwistSummand { bundle: LineBundle::trivial(2, Character::basis(2, 1)), orientation: Orientation::Convex }],
            euler: EulerMode::Inverse,
            auxiliary_weight: false,
        };
        let r = verify_recursion(&t, &CurveClass(vec![2]), Some(&tw), VerifyOptions::default());
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn injected_fault_is_reported() {
        let r = verify_recursion(&pn(1), &CurveClass(vec![2]), None, VerifyOptions { workers: 0, inject_fault: true });
        assert!(!r.passed());
        assert_eq!(r.mismatches(), 1);
    }
}
