//! Decorated trees: generation by leaf attachment, canonical forms, automorphisms.

use std::collections::{BTreeSet, HashSet};

use crate::gkm::{CurveClass, GkmTarget};

/// Edge of a decorated tree: endpoints (vertex indices), GKM edge, cover degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeEdge {
    pub ends: [usize; 2],
    pub gkm_edge: usize,
    pub degree: u32,
}

/// A tree whose vertices are labelled by fixed points and whose edges are
/// labelled by (GKM edge, cover degree), without markings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedTree {
    pub labels: Vec<usize>,
    pub edges: Vec<TreeEdge>,
}

/// A decorated tree together with an assignment of markings to vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedGraph {
    pub tree: DecoratedTree,
    pub markings: Vec<usize>,
}

impl DecoratedTree {
    pub fn single(label: usize) -> Self {
        DecoratedTree { labels: vec![label], edges: Vec::new() }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.ends.contains(&v)).count()
    }

    /// Incident `(edge index, neighbour)` pairs.
    pub fn neighbours(&self, v: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                if e.ends[0] == v {
                    Some((i, e.ends[1]))
                } else if e.ends[1] == v {
                    Some((i, e.ends[0]))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn class(&self, target: &GkmTarget) -> CurveClass {
        let mut c = CurveClass::zero(target.lattice_rank());
        for e in &self.edges {
            c = c.add(&target.edge(e.gkm_edge).class.scale(e.degree as i64));
        }
        c
    }

    fn with_leaf(&self, at: usize, gkm_edge: usize, degree: u32, label: usize) -> Self {
        let mut t = self.clone();
        let v = t.labels.len();
        t.labels.push(label);
        t.edges.push(TreeEdge { ends: [at, v], gkm_edge, degree });
        t
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.labels.len()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.ends[0]].push((i, e.ends[1]));
            adj[e.ends[1]].push((i, e.ends[0]));
        }
        adj
    }

    /// Rooted encoding; `extra[v]` is appended to vertex `v`'s label (markings).
    fn encode(&self, adj: &[Vec<(usize, usize)>], v: usize, parent: Option<usize>, extra: &[String]) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|(_, w)| Some(*w) != parent)
            .map(|&(ei, w)| {
                let e = &self.edges[ei];
                format!("{}:{}{}", e.gkm_edge, e.degree, self.encode(adj, w, Some(v), extra))
            })
            .collect();
        kids.sort();
        format!("({}{}{})", self.labels[v], extra.get(v).map_or("", |s| s.as_str()), kids.concat())
    }

    fn canonical_with(&self, extra: &[String]) -> String {
        let adj = self.adjacency();
        (0..self.labels.len()).map(|r| self.encode(&adj, r, None, extra)).min().unwrap_or_default()
    }

    /// Canonical string: minimum rooted encoding over all roots.
    pub fn canonical(&self) -> String {
        self.canonical_with(&[])
    }

    /// All label- and edge-label-preserving vertex permutations.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let n = self.labels.len();
        let enc: Vec<String> = (0..n).map(|r| self.encode(&adj, r, None, &[])).collect();
        let mut out = Vec::new();
        for r2 in 0..n {
            if enc[r2] != enc[0] {
                continue;
            }
            let mut maps = vec![vec![usize::MAX; n]];
            maps[0][0] = r2;
            self.extend_iso(&adj, 0, None, r2, None, &mut maps);
            out.extend(maps);
        }
        out
    }

    /// Extends every partial map in `maps` by all isomorphisms of the subtree at
    /// `v` onto the subtree at `w` (which are known to have equal encodings).
    fn extend_iso(
        &self,
        adj: &[Vec<(usize, usize)>],
        v: usize,
        pv: Option<usize>,
        w: usize,
        pw: Option<usize>,
        maps: &mut Vec<Vec<usize>>,
    ) {
        let child = |x: usize, px: Option<usize>| -> Vec<(String, usize)> {
            adj[x]
                .iter()
                .filter(|(_, y)| Some(*y) != px)
                .map(|&(ei, y)| {
                    let e = &self.edges[ei];
                    (format!("{}:{}{}", e.gkm_edge, e.degree, self.encode(adj, y, Some(x), &[])), y)
                })
                .collect()
        };
        let cv = child(v, pv);
        let cw = child(w, pw);
        // each child of v can map to any child of w with the same encoding
        let mut pairings: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        let mut used_sets: Vec<Vec<bool>> = vec![vec![false; cw.len()]];
        for (code, a) in &cv {
            let mut np = Vec::new();
            let mut nu = Vec::new();
            for (pairs, used) in pairings.iter().zip(&used_sets) {
                for (j, (code2, b)) in cw.iter().enumerate() {
                    if !used[j] && code == code2 {
                        let mut p2 = pairs.clone();
                        p2.push((*a, *b));
                        let mut u2 = used.clone();
                        u2[j] = true;
                        np.push(p2);
                        nu.push(u2);
                    }
                }
            }
            pairings = np;
            used_sets = nu;
        }
        let mut result = Vec::new();
        for m in maps.iter() {
            for pairs in &pairings {
                let mut ms = vec![m.clone()];
                for &(a, b) in pairs {
                    for mm in ms.iter_mut() {
                        mm[a] = b;
                    }
                    self.extend_iso(adj, a, Some(v), b, Some(w), &mut ms);
                }
                result.extend(ms);
            }
        }
        *maps = result;
    }

    /// Order of the automorphism group.
    pub fn automorphism_order(&self) -> u64 {
        self.automorphisms().len() as u64
    }
}

impl DecoratedGraph {
    pub fn canonical(&self) -> String {
        let mut extra = vec![String::new(); self.tree.num_vertices()];
        for (i, &v) in self.markings.iter().enumerate() {
            extra[v] += &format!("m{i}");
        }
        self.tree.canonical_with(&extra)
    }

    /// Markings at vertex `v`, in increasing order.
    pub fn markings_at(&self, v: usize) -> Vec<usize> {
        self.markings.iter().enumerate().filter(|(_, &w)| w == v).map(|(i, _)| i).collect()
    }
}

/// Nonzero sums of edge classes whose functional value is at most `f(β)`.
pub fn reachable_classes(target: &GkmTarget, beta: &CurveClass) -> HashSet<CurveClass> {
    let Some(f) = target.positive_functional() else { return HashSet::new() };
    let limit = beta.dot(f);
    let gens = target.edge_classes();
    let mut seen: HashSet<CurveClass> = HashSet::new();
    let mut frontier = vec![CurveClass::zero(target.lattice_rank())];
    while let Some(c) = frontier.pop() {
        for g in &gens {
            let s = c.add(g);
            if s.dot(f) <= limit && seen.insert(s.clone()) {
                frontier.push(s);
            }
        }
    }
    seen
}

/// Effective classes `γ ≠ 0` with `β − γ` effective or zero.
pub fn classes_below(target: &GkmTarget, beta: &CurveClass) -> Vec<CurveClass> {
    let reach = reachable_classes(target, beta);
    let mut out: Vec<CurveClass> = reach
        .iter()
        .filter(|c| {
            let rest = beta.sub(c);
            rest.is_zero() || reach.contains(&rest)
        })
        .cloned()
        .collect();
    out.sort_by_key(|c| (target.positive_functional().map_or(0, |f| c.dot(f)), c.clone()));
    out
}

/// All isomorphism classes of decorated trees of total class `β ≠ 0`.
pub fn enumerate_trees(target: &GkmTarget, beta: &CurveClass) -> Vec<DecoratedTree> {
    let reach = reachable_classes(target, beta);
    if !reach.contains(beta) {
        return Vec::new();
    }
    let f = target.positive_functional().expect("reachable implies functional").to_vec();
    let fits = |used: &CurveClass| {
        let rest = beta.sub(used);
        rest.is_zero() || reach.contains(&rest)
    };
    let mut done = Vec::new();
    let mut level: Vec<(DecoratedTree, CurveClass)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (ei, e) in target.edges().iter().enumerate() {
        for k in 1.. {
            let c = e.class.scale(k as i64);
            if c.dot(&f) > beta.dot(&f) {
                break;
            }
            if !fits(&c) {
                continue;
            }
            let t = DecoratedTree { labels: vec![e.ends[0], e.ends[1]], edges: vec![TreeEdge { ends: [0, 1], gkm_edge: ei, degree: k }] };
            if seen.insert(t.canonical()) {
                level.push((t, c));
            }
        }
    }
    while !level.is_empty() {
        let mut next = Vec::new();
        let mut seen_next = BTreeSet::new();
        for (t, used) in level {
            if &used == beta {
                done.push(t);
                continue;
            }
            for v in 0..t.num_vertices() {
                let p = t.labels[v];
                for &ei in target.incident(p) {
                    let e = target.edge(ei);
                    for k in 1.. {
                        let c = used.add(&e.class.scale(k as i64));
                        if c.dot(&f) > beta.dot(&f) {
                            break;
                        }
                        if !fits(&c) {
                            continue;
                        }
                        let nt = t.with_leaf(v, ei, k, e.other(p));
                        if seen_next.insert(nt.canonical()) {
                            next.push((nt, c));
                        }
                    }
                }
            }
        }
        level = next;
    }
    done
}

/// Decorated graphs with `n` markings: each isomorphism class once, with its
/// automorphism order (label-, edge- and marking-preserving).
pub fn enumerate_decorated_graphs(target: &GkmTarget, beta: &CurveClass, n: usize) -> Vec<(DecoratedGraph, u64)> {
    let trees = if beta.is_zero() {
        (0..target.num_points()).map(DecoratedTree::single).collect()
    } else {
        enumerate_trees(target, beta)
    };
    let mut out = Vec::new();
    for tree in trees {
        let auts = tree.automorphisms();
        let nv = tree.num_vertices();
        let total = nv.pow(n as u32);
        for code in 0..total {
            let mut markings = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                markings.push(c % nv);
                c /= nv;
            }
            // keep the lexicographically smallest assignment in each orbit
            let mut minimal = true;
            let mut stabilizer = 0u64;
            for a in &auts {
                let image: Vec<usize> = markings.iter().map(|&v| a[v]).collect();
                if image < markings {
                    minimal = false;
                    break;
                }
                if image == markings {
                    stabilizer += 1;
                }
            }
            if minimal {
                out.push((DecoratedGraph { tree: tree.clone(), markings }, stabilizer));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Character;
    use crate::gkm::projective_space;

    fn p1() -> GkmTarget {
        projective_space(1, vec![Character::zero(), Character::basis(1, 0)]).unwrap()
    }

    #[test]
    fn p1_low_degree_graphs() {
        let t = p1();
        let g1 = enumerate_decorated_graphs(&t, &CurveClass(vec![1]), 0);
        assert_eq!(g1.len(), 1);
        assert_eq!(g1[0].1, 1);
        let g2 = enumerate_decorated_graphs(&t, &CurveClass(vec![2]), 0);
        let mut orders: Vec<u64> = g2.iter().map(|g| g.1).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 2]);
    }

    #[test]
    fn degree_zero_three_markings() {
        let t = projective_space(2, vec![Character::zero(), Character::basis(2, 0), Character::basis(2, 1)]).unwrap();
        let g = enumerate_decorated_graphs(&t, &CurveClass(vec![0]), 3);
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|(_, a)| *a == 1));
    }

    #[test]
    fn orbit_stabilizer_matches_assignment_count() {
        // Σ |Aut T| / |Aut Γ| over marked graphs equals |V|^n per tree
        let t = p1();
        for d in 1..=3 {
            for n in 0..=3 {
                let trees = enumerate_trees(&t, &CurveClass(vec![d]));
                let expected: f64 = trees.iter().map(|tr| (tr.num_vertices() as f64).powi(n) / tr.automorphism_order() as f64).sum();
                let got: f64 = enumerate_decorated_graphs(&t, &CurveClass(vec![d]), n as usize).iter().map(|(_, a)| 1.0 / *a as f64).sum();
                assert!((expected - got).abs() < 1e-9, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn star_automorphisms() {
        // p0 joined to three copies of p1 by degree-1 covers
        let tree = DecoratedTree {
            labels: vec![0, 1, 1, 1],
            edges: (1..4).map(|v| TreeEdge { ends: [0, v], gkm_edge: 0, degree: 1 }).collect(),
        };
        assert_eq!(tree.automorphism_order(), 6);
        let path = DecoratedTree {
            labels: vec![1, 0, 1],
            edges: vec![TreeEdge { ends: [0, 1], gkm_edge: 0, degree: 1 }, TreeEdge { ends: [1, 2], gkm_edge: 0, degree: 1 }],
        };
        assert_eq!(path.automorphism_order(), 2);
    }
}
