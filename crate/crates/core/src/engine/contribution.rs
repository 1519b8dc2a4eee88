//! Edge and vertex factors of the localization formula.
//!
//! A decorated graph contributes
//! `(1/|Aut Γ|) ∏_e Edge(e) ∏_v e_T(T_p)^{val−1} I_v`, where `I_v` integrates
//! `∏_F 1/(ω_F − ψ_F)` and the insertions at `v` over `M̄_{0,val+n_v}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::algebra::{q, Coefficient, Evaluator, RationalFunction, Weight, Q};
use crate::gkm::{GkmTarget, LineBundle};

use super::graph::{DecoratedGraph, DecoratedTree};
use super::weights::{multinomial, section_weights};
use super::{EngineError, EulerMode, Insertion, TwistSpec};

/// Lifted data shared by every graph of one computation.
pub(crate) struct Context<'a, C: Coefficient> {
    pub target: &'a GkmTarget,
    pub ev: Evaluator,
    /// `insertions[i][p]`: restriction of the i-th class at `p`, lifted.
    pub insertions: Vec<Vec<C>>,
    pub psi: Vec<u32>,
    pub euler: Vec<C>,
    /// `−z` when the first marking carries `1/(−z−ψ)`.
    pub cone: Option<C>,
    twist: Option<TwistData<'a, C>>,
    edge_cache: Mutex<HashMap<(usize, u32), C>>,
    /// Set when no marking carries ψ or the cone weight: for each count vector `c`
    /// (markings per fixed point), `∏_p c_p! · Σ_{σ with counts c} ∏_i α_i(σ(i))`.
    point_counts: Option<Vec<(Vec<usize>, C)>>,
}

struct TwistData<'a, C> {
    bundles: Vec<LineBundle>,
    spec: &'a TwistSpec,
    /// `∏_L l_p` and its inverse (if nonzero).
    unit: Vec<C>,
    unit_inverse: Vec<Option<C>>,
}

fn not_invertible(what: impl std::fmt::Display) -> EngineError {
    EngineError::NonInvertibleEulerFactor(what.to_string())
}

impl<'a, C: Coefficient> Context<'a, C> {
    pub fn new(
        target: &'a GkmTarget,
        ev: Evaluator,
        insertions: &[Insertion],
        twist: Option<&'a TwistSpec>,
        cone: bool,
    ) -> Result<Self, EngineError> {
        let n = target.num_points();
        let mut lifted = Vec::with_capacity(insertions.len());
        for ins in insertions {
            let mut row = Vec::with_capacity(n);
            for p in 0..n {
                row.push(C::lift(ins.class.at(p), &ev)?);
            }
            lifted.push(row);
        }
        let euler = (0..n).map(|p| C::lift(target.euler_class_tangent(p), &ev)).collect::<Result<Vec<C>, _>>()?;
        let cone = if cone { Some(C::cone_variable(&ev)?.neg()) } else { None };
        let twist = match twist {
            None => None,
            Some(spec) => {
                let bundles = spec.effective_bundles();
                let mut unit = Vec::with_capacity(n);
                let mut unit_inverse = Vec::with_capacity(n);
                for p in 0..n {
                    let mut u = C::one();
                    for b in &bundles {
                        u = u.mul(&C::weight(&Weight::integral(&b.weights[p]), &ev)?);
                    }
                    unit_inverse.push(if u.is_zero() { None } else { Some(u.inverse()?) });
                    unit.push(u);
                }
                Some(TwistData { bundles, spec, unit, unit_inverse })
            }
        };
        let symmetric = cone.is_none() && insertions.iter().all(|i| i.psi == 0);
        let point_counts = if symmetric { Some(point_count_table(&lifted, n)) } else { None };
        Ok(Context {
            target,
            ev,
            insertions: lifted,
            psi: insertions.iter().map(|i| i.psi).collect(),
            euler,
            cone,
            twist,
            edge_cache: Mutex::new(HashMap::new()),
            point_counts,
        })
    }

    #[cfg(test)]
    pub fn symmetric(&self) -> bool {
        self.point_counts.is_some()
    }

    /// Vertex factors with `k = 0..=kmax` unit insertions without ψ, divided by `k!`.
    fn unmarked_series(&self, p: usize, flags: &[C], flag_inv: &[C], kmax: usize) -> Result<Vec<C>, EngineError> {
        let val = flags.len();
        let tw = self.twist_vertex(p, val)?;
        let mut inv_sum = C::zero();
        let mut inv_prod = C::one();
        for w in flag_inv {
            inv_sum = inv_sum.add(w);
            inv_prod = inv_prod.mul(w);
        }
        let base = inv_prod.mul(&self.euler[p].pow(val as u32 - 1)).mul(&tw);
        let mut out = Vec::with_capacity(kmax + 1);
        let mut fact = Q::from_integer(1.into());
        for k in 0..=kmax {
            if k > 0 {
                fact *= Q::from_integer((k as i64).into());
            }
            let m = val + k;
            let body = if m >= 3 {
                base.mul(&inv_sum.pow((m - 3) as u32))
            } else if val == 2 {
                self.euler[p].mul(&flags[0].add(&flags[1]).inverse()?).mul(&tw)
            } else if k == 1 {
                tw.clone()
            } else {
                flags[0].mul(&tw)
            };
            out.push(body.mul(&C::from_q(fact.recip())));
        }
        Ok(out)
    }

    /// For each fixed point labelling a vertex, the product over those vertices of
    /// `Σ_{k ≤ n} A_v(k) t^k / k!`.
    pub fn point_series(&self, tree: &DecoratedTree, n: usize) -> Result<BTreeMap<usize, Vec<C>>, EngineError> {
        let mut series: BTreeMap<usize, Vec<C>> = BTreeMap::new();
        for v in 0..tree.num_vertices() {
            let p = tree.labels[v];
            let (flags, inv) = self.flags(tree, v)?;
            let a = self.unmarked_series(p, &flags, &inv, n)?;
            let s = match series.remove(&p) {
                None => a,
                Some(s) => truncated_product(&s, &a, n),
            };
            series.insert(p, s);
        }
        Ok(series)
    }

    /// Marking sum when vertex factors depend only on how many markings sit at each vertex.
    fn tree_sum_symmetric(&self, tree: &DecoratedTree, counts: &[(Vec<usize>, C)]) -> Result<C, EngineError> {
        let series = self.point_series(tree, self.insertions.len())?;
        let mut total = C::zero();
        'outer: for (c, weight) in counts {
            let mut t = weight.clone();
            for (p, &cp) in c.iter().enumerate() {
                match series.get(&p) {
                    Some(s) => t = t.mul(&s[cp]),
                    None if cp == 0 => {}
                    None => continue 'outer,
                }
                if t.is_zero() {
                    continue 'outer;
                }
            }
            total = total.add(&t);
        }
        Ok(total.mul(&self.edges_product(tree)?))
    }

    /// `(1/k) ∏_{tangent lines} ∏H^1 / ∏(nonzero H^0)`, times the twist edge factor.
    pub fn edge_factor(&self, e: usize, k: u32) -> Result<C, EngineError> {
        if let Some(v) = self.edge_cache.lock().expect("edge cache").get(&(e, k)) {
            return Ok(v.clone());
        }
        let edge = self.target.edge(e);
        let a = edge.ends[0];
        let omega = &edge.character;
        let mut val = C::from_q(Q::new(1.into(), (k as i64).into()));
        let tangent = self.target.tangent_weights(a);
        let lines = self
            .target
            .tangent_lines(e)
            .ok_or_else(|| EngineError::InconsistentEdgeData(format!("edge {e} has no tangent splitting")))?;
        for line in lines {
            let (h0, h1) = section_weights(&tangent[line.from_slot], omega, line.degree, k);
            for w in h0.iter().filter(|w| !w.is_zero()) {
                val = val.mul(&C::inverse_weight(w, &self.ev)?);
            }
            for w in &h1 {
                val = val.mul(&C::weight(w, &self.ev)?);
            }
        }
        if let Some(tw) = &self.twist {
            for b in &tw.bundles {
                let d = b
                    .degree_on(self.target, e)
                    .ok_or_else(|| EngineError::InconsistentEdgeData(format!("twist summand is not consistent on edge {e}")))?;
                let (h0, h1) = section_weights(&b.weights[a], omega, d, k);
                let (num, den) = match tw.spec.euler {
                    EulerMode::Inverse => (h1, h0),
                    EulerMode::Direct => (h0, h1),
                };
                for w in &den {
                    if w.is_zero() {
                        return Err(not_invertible(format!("weight {w} on a {k}-fold cover of edge {e}")));
                    }
                    val = val.mul(&C::inverse_weight(w, &self.ev)?);
                }
                for w in &num {
                    val = val.mul(&C::weight(w, &self.ev)?);
                }
            }
        }
        self.edge_cache.lock().expect("edge cache").insert((e, k), val.clone());
        Ok(val)
    }

    /// Twist factor at a vertex of the given valence.
    fn twist_vertex(&self, p: usize, val: usize) -> Result<C, EngineError> {
        let Some(tw) = &self.twist else { return Ok(C::one()) };
        let exp = match tw.spec.euler {
            EulerMode::Inverse => val as i64 - 1,
            EulerMode::Direct => 1 - val as i64,
        };
        if exp >= 0 {
            Ok(tw.unit[p].pow(exp as u32))
        } else {
            let inv = tw.unit_inverse[p].as_ref().ok_or_else(|| not_invertible(format!("twist weights at fixed point {p}")))?;
            Ok(inv.pow((-exp) as u32))
        }
    }

    /// Lifted flag weights `ω_F = ω_{p,e}/k` at a tree vertex, and their inverses.
    pub fn flags(&self, tree: &DecoratedTree, v: usize) -> Result<(Vec<C>, Vec<C>), EngineError> {
        let p = tree.labels[v];
        let mut ws = Vec::new();
        let mut inv = Vec::new();
        for (ei, _) in tree.neighbours(v) {
            let te = &tree.edges[ei];
            let w = Weight::fraction(&self.target.edge(te.gkm_edge).character_at(p), te.degree as i64);
            ws.push(C::weight(&w, &self.ev)?);
            inv.push(C::inverse_weight(&w, &self.ev)?);
        }
        Ok((ws, inv))
    }

    /// `e_T(T_p)^{val−1} I_v` (with twist) for markings `marks` at a vertex labelled `p`.
    pub fn vertex_factor(&self, p: usize, flags: &[C], flag_inv: &[C], marks: &[usize]) -> Result<C, EngineError> {
        let val = flags.len();
        let mut alpha = C::one();
        for &i in marks {
            let a = &self.insertions[i][p];
            if a.is_zero() {
                return Ok(C::zero());
            }
            alpha = alpha.mul(a);
        }
        let cone_here = self.cone.is_some() && marks.contains(&0);
        let m = val + marks.len();
        let tw = self.twist_vertex(p, val)?;
        let body = if m >= 3 {
            let psis: Vec<u32> = marks.iter().map(|&i| self.psi[i]).collect();
            let used: u64 = psis.iter().map(|&a| a as u64).sum();
            if used > (m - 3) as u64 {
                return Ok(C::zero());
            }
            let s = (m - 3) as u64 - used;
            let mut inv_sum = C::zero();
            let mut inv_prod = C::one();
            for w in flag_inv {
                inv_sum = inv_sum.add(w);
                inv_prod = inv_prod.mul(w);
            }
            if cone_here {
                let c = self.cone.as_ref().unwrap().inverse()?;
                inv_sum = inv_sum.add(&c);
                inv_prod = inv_prod.mul(&c);
            }
            let coeff = C::from_q(multinomial(m as u64 - 3, s, &psis));
            let euler = if val >= 1 {
                self.euler[p].pow(val as u32 - 1)
            } else {
                self.euler[p].inverse()?
            };
            coeff.mul(&inv_prod).mul(&inv_sum.pow(s as u32)).mul(&euler)
        } else if m == 2 && val == 2 {
            self.euler[p].mul(&flags[0].add(&flags[1]).inverse()?)
        } else if m == 2 && val == 1 {
            let i = marks[0];
            if cone_here {
                flags[0].add(self.cone.as_ref().unwrap()).inverse()?
            } else {
                flags[0].neg().pow(self.psi[i])
            }
        } else if m == 1 && val == 1 {
            flags[0].clone()
        } else {
            return Err(EngineError::TooFewPoints(m));
        };
        Ok(body.mul(&alpha).mul(&tw))
    }

    /// `∏_e Edge(e)` of a tree.
    pub fn edges_product(&self, tree: &DecoratedTree) -> Result<C, EngineError> {
        let mut acc = C::one();
        for e in &tree.edges {
            acc = acc.mul(&self.edge_factor(e.gkm_edge, e.degree)?);
        }
        Ok(acc)
    }

    /// Sum over all assignments of the markings to the tree's vertices
    /// (each marked graph is hit `|Aut T| / |Aut Γ|` times).
    pub fn tree_sum(&self, tree: &DecoratedTree) -> Result<C, EngineError> {
        if let Some(counts) = &self.point_counts {
            return self.tree_sum_symmetric(tree, counts);
        }
        self.tree_sum_subsets(tree)
    }

    /// Subset DP over marking assignments; handles ψ and cone markings.
    pub fn tree_sum_subsets(&self, tree: &DecoratedTree) -> Result<C, EngineError> {
        let n = self.insertions.len();
        let full = (1usize << n) - 1;
        let mut table: Vec<Option<C>> = vec![None; full + 1];
        table[0] = Some(C::one());
        for v in 0..tree.num_vertices() {
            let p = tree.labels[v];
            let (flags, inv) = self.flags(tree, v)?;
            let support = (0..n).filter(|&i| !self.insertions[i][p].is_zero()).fold(0usize, |m, i| m | (1 << i));
            // vertex factors for every subset of the support
            let mut vf: HashMap<usize, C> = HashMap::new();
            let mut sub = support;
            loop {
                let marks: Vec<usize> = (0..n).filter(|i| sub & (1 << i) != 0).collect();
                if flags.len() + marks.len() >= 1 {
                    let f = self.vertex_factor(p, &flags, &inv, &marks)?;
                    if !f.is_zero() {
                        vf.insert(sub, f);
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & support;
            }
            let mut next: Vec<Option<C>> = vec![None; full + 1];
            for (mask, val) in table.iter().enumerate() {
                let Some(val) = val else { continue };
                for (a, f) in &vf {
                    if mask & a != 0 {
                        continue;
                    }
                    let t = val.mul(f);
                    let slot = &mut next[mask | a];
                    *slot = Some(match slot.take() {
                        Some(x) => x.add(&t),
                        None => t,
                    });
                }
            }
            table = next;
        }
        let Some(total) = table[full].take() else { return Ok(C::zero()) };
        Ok(total.mul(&self.edges_product(tree)?))
    }

    /// Contribution of one explicitly marked graph, divided by its automorphism order.
    pub fn marked_graph(&self, g: &DecoratedGraph, aut: u64) -> Result<C, EngineError> {
        let mut acc = self.edges_product(&g.tree)?;
        for v in 0..g.tree.num_vertices() {
            let (flags, inv) = self.flags(&g.tree, v)?;
            let marks = g.markings_at(v);
            acc = acc.mul(&self.vertex_factor(g.tree.labels[v], &flags, &inv, &marks)?);
            if acc.is_zero() {
                return Ok(acc);
            }
        }
        Ok(acc.mul(&C::from_q(Q::new(1.into(), (aut as i64).into()))))
    }

    /// Degree-zero invariant from `M̄_{0,n}(X, 0) = X × M̄_{0,n}`.
    pub fn degree_zero(&self) -> Result<C, EngineError> {
        let n = self.insertions.len();
        if n < 3 {
            return Err(EngineError::TooFewPoints(n));
        }
        let psi = super::weights::psi_integral(&self.psi)?;
        if num_traits::Zero::is_zero(&psi) {
            return Ok(C::zero());
        }
        let mut acc = C::zero();
        for p in 0..self.target.num_points() {
            let mut t = self.euler[p].inverse()?;
            for i in 0..n {
                t = t.mul(&self.insertions[i][p]);
            }
            if t.is_zero() {
                continue;
            }
            acc = acc.add(&t.mul(&self.twist_vertex(p, 0)?));
        }
        Ok(acc.mul(&C::from_q(psi)))
    }
}

fn truncated_product<C: Coefficient>(a: &[C], b: &[C], n: usize) -> Vec<C> {
    let mut out = vec![C::zero(); n + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

pub(crate) fn point_count_table<C: Coefficient>(insertions: &[Vec<C>], points: usize) -> Vec<(Vec<usize>, C)> {
    let mut states: HashMap<Vec<usize>, C> = HashMap::new();
    states.insert(vec![0; points], C::one());
    for row in insertions {
        let mut next: HashMap<Vec<usize>, C> = HashMap::new();
        for (c, w) in &states {
            for (p, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let mut d = c.clone();
                d[p] += 1;
                let t = w.mul(a);
                let slot = next.entry(d).or_insert_with(C::zero);
                *slot = slot.add(&t);
            }
        }
        states = next;
    }
    let mut out: Vec<(Vec<usize>, C)> = states
        .into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(c, w)| {
            let f: num_bigint::BigInt = c.iter().flat_map(|&k| 1..=k as u64).map(num_bigint::BigInt::from).product();
            let w = w.mul(&C::from_q(Q::from_integer(f)));
            (c, w)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Contribution of a single decorated graph (symbolic), including `1/|Aut Γ|`.
pub fn graph_contribution(
    target: &GkmTarget,
    graph: &DecoratedGraph,
    automorphisms: u64,
    insertions: &[Insertion],
    twist: Option<&TwistSpec>,
    cone: bool,
) -> Result<RationalFunction, EngineError> {
    let ctx = Context::<RationalFunction>::new(target, Evaluator::symbolic(), insertions, twist, cone)?;
    if graph.tree.edges.is_empty() {
        // a bare vertex with n ≥ 3 markings
        let p = graph.tree.labels[0];
        let marks: Vec<usize> = (0..insertions.len()).collect();
        let v = ctx.vertex_factor(p, &[], &[], &marks)?;
        return Ok(v.scale(&(q(1) / q(automorphisms as i64))));
    }
    ctx.marked_graph(graph, automorphisms)
}
