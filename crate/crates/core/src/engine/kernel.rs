//! Tree sums shared by every ψ-free, untwisted insertion tuple of one length.
//!
//! Without ψ the vertex factors only see how many markings sit at a vertex, so
//! `⟨α_1, …, α_n⟩_β = Σ_c E_α(c) G_β(c)` over count vectors `c` of markings per
//! fixed point. `G_β` is computed once; `E_α` is a cheap product expansion.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{Coefficient, Evaluator, Q};
use crate::gkm::{CurveClass, GkmTarget};

use super::contribution::{point_count_table, Context};
use super::graph::enumerate_trees;
use super::{EngineError, Insertion};

pub(crate) struct CountKernel<C> {
    n: usize,
    table: BTreeMap<Vec<usize>, C>,
}

/// `E_α`: count vector ↦ weight, for ψ-free insertions lifted at `ev`.
pub(crate) fn count_weights<C: Coefficient>(
    insertions: &[Insertion],
    points: usize,
    ev: &Evaluator,
) -> Result<Vec<(Vec<usize>, C)>, EngineError> {
    let mut lifted = Vec::with_capacity(insertions.len());
    for ins in insertions {
        lifted.push((0..points).map(|p| C::lift(ins.class.at(p), ev)).collect::<Result<Vec<C>, _>>()?);
    }
    Ok(point_count_table(&lifted, points))
}

impl<C: Coefficient> CountKernel<C> {
    /// `G_β(c)` for the count vectors in `needed`, all of total `n`.
    pub fn build(target: &GkmTarget, beta: &CurveClass, n: usize, ev: &Evaluator, needed: &BTreeSet<Vec<usize>>) -> Result<Self, EngineError> {
        let ctx = Context::<C>::new(target, ev.clone(), &[], None, false)?;
        let trees = enumerate_trees(target, beta);
        let mut table: BTreeMap<Vec<usize>, C> = BTreeMap::new();
        for t in &trees {
            let series = ctx.point_series(t, n)?;
            let scale = ctx.edges_product(t)?.mul(&C::from_q(Q::new(1.into(), (t.automorphism_order() as i64).into())));
            for c in needed {
                let mut v = scale.clone();
                for (p, &cp) in c.iter().enumerate() {
                    match series.get(&p) {
                        Some(s) => v = v.mul(&s[cp]),
                        None if cp == 0 => {}
                        None => v = C::zero(),
                    }
                    if v.is_zero() {
                        break;
                    }
                }
                if !v.is_zero() {
                    let slot = table.entry(c.clone()).or_insert_with(C::zero);
                    *slot = slot.add(&v);
                }
            }
        }
        Ok(CountKernel { n, table })
    }

    pub fn pair(&self, weights: &[(Vec<usize>, C)]) -> C {
        let mut total = C::zero();
        for (c, w) in weights {
            debug_assert_eq!(c.iter().sum::<usize>(), self.n);
            if let Some(g) = self.table.get(c) {
                total = total.add(&w.mul(g));
            }
        }
        total
    }
}
