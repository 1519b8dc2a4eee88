//! GKM targets: moment graphs, equivariant classes by fixed-point restriction,
//! line bundles, and the projective-bundle identification.

pub mod builders;
pub mod identification;
pub mod linalg;

use std::fmt;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{q, Character, LinearForm, Polynomial, RationalFunction, Q};

pub use builders::{point_target, product, projective_bundle, projective_space};
pub use identification::{CohomologyIdentification, IdentificationMode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GkmError {
    #[error("invalid target data: {0}")]
    InvalidInput(String),
    #[error("degenerate weights: {0} and {1} coincide")]
    DegenerateWeights(usize, usize),
    #[error("repeated fiber weights over base point {0}")]
    RepeatedFiberWeights(usize),
    #[error("summand {summand} is inconsistent along edge {edge}: weight difference is not an integer multiple of the edge character")]
    InconsistentBundle { edge: usize, summand: usize },
    #[error("target is not chain-free: {0}")]
    NotChainFree(String),
    #[error("target failed validation: {0}")]
    NotValidated(String),
    #[error("fiber-weight multisets differ over base point {0}")]
    ChernMismatch(usize),
    #[error("non-equivariant Chern classes differ: {0}")]
    NonEquivariantChernMismatch(String),
    #[error("fiber restrictions of h collide over base point {0}")]
    SingularVandermonde(usize),
    #[error("divisor/curve pairing matrix is singular")]
    SingularPairing,
    #[error("{0}")]
    NotABundle(String),
    #[error("class is not expressible in the generators: {0}")]
    NotExpressible(String),
}

/// Integer coordinates in the curve lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    pub fn zero(rank: usize) -> Self {
        CurveClass(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &CurveClass) -> CurveClass {
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CurveClass) -> CurveClass {
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> CurveClass {
        CurveClass(self.0.iter().map(|a| a * k).collect())
    }

    pub fn dot(&self, f: &[i64]) -> i64 {
        self.0.iter().zip(f).map(|(a, b)| a * b).sum()
    }

    /// Parses `"2,1"`.
    pub fn parse(s: &str) -> Result<CurveClass, GkmError> {
        let parts: Result<Vec<i64>, _> = s.split(',').map(|t| t.trim().parse::<i64>()).collect();
        match parts {
            Ok(v) if !s.trim().is_empty() => Ok(CurveClass(v)),
            _ => Err(GkmError::InvalidInput(format!("malformed curve class {s:?}; expected comma-separated integers"))),
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A one-dimensional orbit closure between two fixed points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub ends: [usize; 2],
    /// Tangent character of the orbit at `ends[0]`; at `ends[1]` it is the negative.
    pub character: Character,
    pub class: CurveClass,
}

impl Edge {
    pub fn character_at(&self, p: usize) -> Character {
        if p == self.ends[0] {
            self.character.clone()
        } else {
            -&self.character
        }
    }

    pub fn other(&self, p: usize) -> usize {
        if p == self.ends[0] {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

/// One summand `O(d)` of the restriction of the tangent bundle to an edge:
/// tangent slot `from_slot` at `ends[0]` matched to `to_slot` at `ends[1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentLine {
    pub from_slot: usize,
    pub to_slot: usize,
    pub degree: i64,
}

/// A localized equivariant class: its restrictions to the fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantClass {
    restrictions: Vec<RationalFunction>,
}

impl EquivariantClass {
    pub fn new(restrictions: Vec<RationalFunction>) -> Self {
        EquivariantClass { restrictions }
    }

    pub fn from_polynomials(ps: Vec<Polynomial>) -> Self {
        EquivariantClass::new(ps.into_iter().map(RationalFunction::from_polynomial).collect())
    }

    pub fn constant(points: usize, c: Q) -> Self {
        EquivariantClass::new(vec![RationalFunction::constant(c); points])
    }

    pub fn one(points: usize) -> Self {
        Self::constant(points, q(1))
    }

    pub fn zero(points: usize) -> Self {
        Self::constant(points, Q::zero())
    }

    pub fn len(&self) -> usize {
        self.restrictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.restrictions.is_empty()
    }

    pub fn at(&self, p: usize) -> &RationalFunction {
        &self.restrictions[p]
    }

    pub fn restrictions(&self) -> &[RationalFunction] {
        &self.restrictions
    }

    pub fn add(&self, other: &Self) -> Self {
        EquivariantClass::new(self.restrictions.iter().zip(&other.restrictions).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        EquivariantClass::new(self.restrictions.iter().zip(&other.restrictions).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        EquivariantClass::new(self.restrictions.iter().zip(&other.restrictions).map(|(a, b)| a * b).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        EquivariantClass::new(self.restrictions.iter().map(|a| a.scale(c)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = EquivariantClass::one(self.len());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.restrictions.iter().all(|r| r.is_zero())
    }

    pub fn is_polynomial(&self) -> bool {
        self.restrictions.iter().all(|r| r.is_polynomial())
    }

    /// Common homogeneous degree of the nonzero restrictions (complex degree).
    /// `Some(0)` for the zero class is avoided: the zero class has no degree.
    pub fn degree(&self) -> Option<u32> {
        let mut deg = None;
        for r in &self.restrictions {
            if r.is_zero() {
                continue;
            }
            let d = r.as_polynomial()?.homogeneous_degree()?;
            match deg {
                None => deg = Some(d),
                Some(e) if e == d => {}
                Some(_) => return None,
            }
        }
        deg
    }
}

/// An equivariant line bundle given by its fiber weights at the fixed points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundle {
    pub weights: Vec<Character>,
}

impl LineBundle {
    pub fn new(weights: Vec<Character>) -> Self {
        LineBundle { weights }
    }

    pub fn trivial(points: usize, weight: Character) -> Self {
        LineBundle { weights: vec![weight; points] }
    }

    /// Degree on edge `e`: `(l_a - l_b) / ω`, oriented from `ends[0]`.
    pub fn degree_on(&self, target: &GkmTarget, e: usize) -> Option<i64> {
        let edge = target.edge(e);
        let diff = &self.weights[edge.ends[0]] - &self.weights[edge.ends[1]];
        diff.integer_multiple_of(&edge.character)
    }

    /// First Chern class: restriction `l_p` at `p`.
    pub fn chern_class(&self) -> EquivariantClass {
        EquivariantClass::from_polynomials(self.weights.iter().map(|w| w.to_polynomial()).collect())
    }

    pub fn tensor(&self, other: &LineBundle) -> LineBundle {
        LineBundle::new(self.weights.iter().zip(&other.weights).map(|(a, b)| a + b).collect())
    }

    pub fn dual(&self) -> LineBundle {
        LineBundle::new(self.weights.iter().map(|a| -a).collect())
    }

    pub fn with_aux(&self, aux: i64) -> LineBundle {
        LineBundle::new(self.weights.iter().map(|w| w.clone().with_aux(w.aux() + aux)).collect())
    }
}

/// A direct sum of equivariant line bundles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitBundle {
    pub summands: Vec<LineBundle>,
}

impl SplitBundle {
    pub fn new(summands: Vec<LineBundle>) -> Self {
        SplitBundle { summands }
    }

    pub fn rank(&self) -> usize {
        self.summands.len()
    }

    pub fn fiber_weights(&self, p: usize) -> Vec<Character> {
        self.summands.iter().map(|l| l.weights[p].clone()).collect()
    }

    /// `c_i` restricted to each point: elementary symmetric functions of the fiber weights.
    pub fn chern_class(&self, i: usize, points: usize) -> EquivariantClass {
        let ps = (0..points)
            .map(|p| {
                let ws: Vec<Polynomial> = self.fiber_weights(p).iter().map(|w| w.to_polynomial()).collect();
                elementary_symmetric(&ws, i)
            })
            .collect();
        EquivariantClass::from_polynomials(ps)
    }

    /// Checks the edge-degree invariant for every summand.
    pub fn check(&self, target: &GkmTarget) -> Result<(), GkmError> {
        for (i, l) in self.summands.iter().enumerate() {
            if l.weights.len() != target.num_points() {
                return Err(GkmError::InvalidInput(format!(
                    "summand {i} has {} weights for {} fixed points",
                    l.weights.len(),
                    target.num_points()
                )));
            }
            for e in 0..target.num_edges() {
                if l.degree_on(target, e).is_none() {
                    return Err(GkmError::InconsistentBundle { edge: e, summand: i });
                }
            }
        }
        Ok(())
    }
}

pub fn elementary_symmetric(xs: &[Polynomial], k: usize) -> Polynomial {
    let mut e = vec![Polynomial::zero(); k + 1];
    e[0] = Polynomial::one();
    for x in xs {
        for j in (1..=k).rev() {
            e[j] = &e[j] + &(&e[j - 1] * x);
        }
    }
    e[k].clone()
}

/// A named class on a target (divisor generators, the relative hyperplane class).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedClass {
    pub name: String,
    pub class: EquivariantClass,
}

/// How a target was built as `P(V) → Y`; fixed point `(p, i)` sits over `p` in the line `L_i`.
#[derive(Clone, Debug)]
pub struct BundleStructure {
    pub base: Arc<GkmTarget>,
    pub bundle: SplitBundle,
    pub fiber_points: Vec<(usize, usize)>,
}

/// One violated target invariant, with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    CollinearTangentWeights { point: usize, first: String, second: String },
    ZeroTangentWeight { point: usize },
    UnequalDimension { point: usize, valence: usize, expected: usize },
    GkmIncompatible { edge: usize, weight: String },
    AmbiguousSplitting { edge: usize },
    NonIntegralPairing { divisor: String, edge: usize },
    NotGkmClass { class: String, edge: usize },
    ClassesDoNotSpan,
    NoPositiveFunctional,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CollinearTangentWeights { point, first, second } => write!(
                f,
                "collinear tangent weights at fixed point {point}: {first} and {second} lie on one line, so chains of covers could sweep out positive-dimensional fixed loci"
            ),
            Violation::ZeroTangentWeight { point } => write!(f, "zero tangent weight at fixed point {point}"),
            Violation::UnequalDimension { point, valence, expected } => {
                write!(f, "fixed point {point} has {valence} tangent weights, expected {expected}")
            }
            Violation::GkmIncompatible { edge, weight } => {
                write!(f, "edge {edge}: tangent weight {weight} has no partner congruent modulo the edge character")
            }
            Violation::AmbiguousSplitting { edge } => write!(f, "edge {edge}: tangent weights do not match uniquely across the edge"),
            Violation::NonIntegralPairing { divisor, edge } => {
                write!(f, "divisor {divisor} does not pair integrally with edge {edge}")
            }
            Violation::NotGkmClass { class, edge } => write!(f, "class {class} violates the GKM relation on edge {edge}"),
            Violation::ClassesDoNotSpan => write!(f, "edge classes do not span the curve lattice"),
            Violation::NoPositiveFunctional => write!(f, "no integral functional is positive on every edge class"),
        }
    }
}

/// Result of [`GkmTarget::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_chain_free(&self) -> bool {
        !self.violations.iter().any(|v| matches!(v, Violation::CollinearTangentWeights { .. }))
    }

    /// Converts a failed report into the matching error.
    pub fn into_result(self) -> Result<(), GkmError> {
        if self.is_ok() {
            Ok(())
        } else if !self.is_chain_free() {
            Err(GkmError::NotChainFree(self.to_string()))
        } else {
            Err(GkmError::NotValidated(self.to_string()))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A smooth projective GKM variety encoded by its moment graph.
#[derive(Clone, Debug)]
pub struct GkmTarget {
    pub name: String,
    torus_rank: usize,
    points: Vec<String>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<usize>>,
    lattice_rank: usize,
    divisors: Vec<NamedClass>,
    structure: Option<BundleStructure>,
    euler: Vec<RationalFunction>,
    euler_inverse: Vec<Option<RationalFunction>>,
    splittings: Vec<Option<Vec<TangentLine>>>,
    functional: Option<Vec<i64>>,
    divisor_pairing: Option<Vec<Vec<Q>>>,
    anticanonical: Option<Vec<Q>>,
    structural: Vec<Violation>,
}

impl GkmTarget {
    /// Assembles a target; tangent weights at each point are the characters of
    /// the incident edges. Semantic problems are deferred to [`validate`](Self::validate).
    pub fn new(
        name: impl Into<String>,
        torus_rank: usize,
        points: Vec<String>,
        edges: Vec<Edge>,
        lattice_rank: usize,
        divisors: Vec<NamedClass>,
    ) -> Result<GkmTarget, GkmError> {
        let n = points.len();
        if n == 0 {
            return Err(GkmError::InvalidInput("a target needs at least one fixed point".into()));
        }
        let mut incidence = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.ends[0] >= n || e.ends[1] >= n {
                return Err(GkmError::InvalidInput(format!("edge {i} has an endpoint out of range")));
            }
            if e.ends[0] == e.ends[1] {
                return Err(GkmError::InvalidInput(format!("edge {i} is a loop")));
            }
            if e.class.rank() != lattice_rank {
                return Err(GkmError::InvalidInput(format!(
                    "edge {i} has a class of length {}, expected {lattice_rank}",
                    e.class.rank()
                )));
            }
            if e.character.rank() > torus_rank {
                return Err(GkmError::InvalidInput(format!("edge {i} character exceeds torus rank {torus_rank}")));
            }
            incidence[e.ends[0]].push(i);
            incidence[e.ends[1]].push(i);
        }
        for d in &divisors {
            if d.class.len() != n {
                return Err(GkmError::InvalidInput(format!("class {} has {} restrictions for {n} points", d.name, d.class.len())));
            }
        }
        let mut t = GkmTarget {
            name: name.into(),
            torus_rank,
            points,
            edges,
            incidence,
            lattice_rank,
            divisors,
            structure: None,
            euler: Vec::new(),
            euler_inverse: Vec::new(),
            splittings: Vec::new(),
            functional: None,
            divisor_pairing: None,
            anticanonical: None,
            structural: Vec::new(),
        };
        t.derive();
        Ok(t)
    }

    pub(crate) fn set_structure(&mut self, s: BundleStructure) {
        self.structure = Some(s);
    }

    fn derive(&mut self) {
        let n = self.points.len();
        let mut structural = Vec::new();
        self.euler = (0..n)
            .map(|p| {
                let mut e = RationalFunction::one();
                for w in self.tangent_weights(p) {
                    e = &e * &RationalFunction::from_polynomial(w.to_polynomial());
                }
                e
            })
            .collect();
        self.euler_inverse = self.euler.iter().map(|e| if e.is_zero() { None } else { e.inverse().ok() }).collect();
        self.splittings = (0..self.edges.len())
            .map(|e| match self.match_tangent_lines(e) {
                Ok(s) => Some(s),
                Err(v) => {
                    structural.push(v);
                    None
                }
            })
            .collect();
        self.functional = find_positive_functional(&self.edge_classes(), self.lattice_rank);
        if self.functional.is_none() && !self.edges.is_empty() {
            structural.push(Violation::NoPositiveFunctional);
        }
        // pairings of divisors with edges, then solved on the lattice basis
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut c1_rhs = Vec::new();
        let mut pairing_ok = true;
        for (ei, e) in self.edges.iter().enumerate() {
            rows.push(e.class.0.iter().map(|&c| q(c)).collect::<Vec<Q>>());
            let mut row = Vec::new();
            for d in &self.divisors {
                match edge_pairing(&d.class, e) {
                    Some(v) => row.push(v),
                    None => {
                        structural.push(Violation::NonIntegralPairing { divisor: d.name.clone(), edge: ei });
                        pairing_ok = false;
                        row.push(Q::zero());
                    }
                }
            }
            rhs.push(row);
            c1_rhs.push(vec![q(self.splittings[ei].as_ref().map_or(0, |s| s.iter().map(|l| l.degree).sum()))]);
        }
        if self.lattice_rank > 0 && !self.edges.is_empty() {
            if linalg::rank(&rows) < self.lattice_rank {
                structural.push(Violation::ClassesDoNotSpan);
            } else {
                if pairing_ok {
                    self.divisor_pairing = linalg::solve(&rows, &rhs);
                }
                self.anticanonical = linalg::solve(&rows, &c1_rhs).map(|m| m.into_iter().map(|r| r[0].clone()).collect());
            }
        } else {
            self.divisor_pairing = Some(vec![vec![Q::zero(); self.divisors.len()]; self.lattice_rank]);
            self.anticanonical = Some(vec![Q::zero(); self.lattice_rank]);
        }
        self.structural = structural;
    }

    fn match_tangent_lines(&self, e: usize) -> Result<Vec<TangentLine>, Violation> {
        let edge = &self.edges[e];
        let [a, b] = edge.ends;
        let wa = self.tangent_weights(a);
        let wb = self.tangent_weights(b);
        let mut out = Vec::new();
        let mut used = vec![false; wb.len()];
        for (i, w) in wa.iter().enumerate() {
            let candidates: Vec<(usize, i64)> = wb
                .iter()
                .enumerate()
                .filter_map(|(j, u)| (w - u).integer_multiple_of(&edge.character).map(|d| (j, d)))
                .collect();
            match candidates.as_slice() {
                [] => return Err(Violation::GkmIncompatible { edge: e, weight: w.to_string() }),
                [(j, d)] => {
                    if used[*j] {
                        return Err(Violation::AmbiguousSplitting { edge: e });
                    }
                    used[*j] = true;
                    out.push(TangentLine { from_slot: i, to_slot: *j, degree: *d });
                }
                _ => return Err(Violation::AmbiguousSplitting { edge: e }),
            }
        }
        if wa.len() != wb.len() {
            return Err(Violation::AmbiguousSplitting { edge: e });
        }
        Ok(out)
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point_name(&self, p: usize) -> &str {
        &self.points[p]
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges incident to `p`; slot `i` of the tangent space at `p` is edge `incident(p)[i]`.
    pub fn incident(&self, p: usize) -> &[usize] {
        &self.incidence[p]
    }

    pub fn tangent_weights(&self, p: usize) -> Vec<Character> {
        self.incidence[p].iter().map(|&e| self.edges[e].character_at(p)).collect()
    }

    /// Complex dimension (valence of fixed point 0).
    pub fn dimension(&self) -> usize {
        self.incidence[0].len()
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn divisors(&self) -> &[NamedClass] {
        &self.divisors
    }

    pub fn class_named(&self, name: &str) -> Option<&EquivariantClass> {
        self.divisors.iter().find(|d| d.name == name).map(|d| &d.class)
    }

    pub fn bundle_structure(&self) -> Option<&BundleStructure> {
        self.structure.as_ref()
    }

    /// Splitting of the tangent bundle along edge `e`, when the target is GKM there.
    pub fn tangent_lines(&self, e: usize) -> Option<&[TangentLine]> {
        self.splittings[e].as_deref()
    }

    pub fn positive_functional(&self) -> Option<&[i64]> {
        self.functional.as_deref()
    }

    /// Distinct edge classes.
    pub fn edge_classes(&self) -> Vec<CurveClass> {
        let mut v: Vec<CurveClass> = self.edges.iter().map(|e| e.class.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `e_T(T_p X)`: the product of tangent weights at `p`.
    pub fn euler_class_tangent(&self, p: usize) -> &RationalFunction {
        &self.euler[p]
    }

    pub fn euler_class_inverse(&self, p: usize) -> Option<&RationalFunction> {
        self.euler_inverse[p].as_ref()
    }

    /// `Σ_p α(p) / e_T(T_p X)`.
    pub fn integrate(&self, alpha: &EquivariantClass) -> Result<RationalFunction, GkmError> {
        let mut acc = RationalFunction::zero();
        for p in 0..self.num_points() {
            if alpha.at(p).is_zero() {
                continue;
            }
            let inv = self
                .euler_class_inverse(p)
                .ok_or_else(|| GkmError::NotValidated(format!("tangent Euler class vanishes at fixed point {p}")))?;
            acc = &acc + &(alpha.at(p) * inv);
        }
        Ok(acc)
    }

    pub fn poincare_pair(&self, a: &EquivariantClass, b: &EquivariantClass) -> Result<RationalFunction, GkmError> {
        self.integrate(&a.mul(b))
    }

    /// The equivariant class of the fixed point `p`: `e_T(T_p X)` at `p`, zero elsewhere.
    pub fn delta(&self, p: usize) -> EquivariantClass {
        let mut r = vec![RationalFunction::zero(); self.num_points()];
        r[p] = self.euler[p].clone();
        EquivariantClass::new(r)
    }

    /// Checks the GKM relations: restrictions differ by a multiple of ω along each edge.
    pub fn is_gkm_class(&self, alpha: &EquivariantClass) -> Option<usize> {
        for (i, e) in self.edges.iter().enumerate() {
            let (Some(a), Some(b)) = (alpha.at(e.ends[0]).as_polynomial(), alpha.at(e.ends[1]).as_polynomial()) else {
                return Some(i);
            };
            let diff = a - b;
            let w = e.character.to_polynomial();
            let ok = match LinearForm::normalize(&w) {
                Ok(crate::algebra::rational::Normalized::Form(_, f)) => f.divide(&diff).is_some(),
                _ => diff.is_zero(),
            };
            if !ok {
                return Some(i);
            }
        }
        None
    }

    /// Pairings `⟨D_i, β⟩` with the stored divisor classes.
    pub fn pair_divisors(&self, beta: &CurveClass) -> Option<Vec<Q>> {
        let m = self.divisor_pairing.as_ref()?;
        Some(
            (0..self.divisors.len())
                .map(|i| beta.0.iter().enumerate().fold(Q::zero(), |acc, (j, &c)| acc + &m[j][i] * q(c)))
                .collect(),
        )
    }

    /// `⟨c_1(TX), β⟩`.
    pub fn anticanonical_degree(&self, beta: &CurveClass) -> Option<i64> {
        let v = self.anticanonical.as_ref()?;
        let s = beta.0.iter().zip(v).fold(Q::zero(), |acc, (&c, x)| acc + x * q(c));
        s.is_integer().then(|| s.to_integer().to_i64()).flatten()
    }

    /// `dim X + ⟨c_1, β⟩ + n − 3`.
    pub fn virtual_dimension(&self, beta: &CurveClass, n: usize) -> Option<i64> {
        Some(self.dimension() as i64 + self.anticanonical_degree(beta)? + n as i64 - 3)
    }

    /// Checks every target invariant; never fails, reports violations with witnesses.
    pub fn validate(&self) -> ValidationReport {
        let mut v = self.structural.clone();
        let dim = self.dimension();
        for p in 0..self.num_points() {
            let ws = self.tangent_weights(p);
            if ws.len() != dim {
                v.push(Violation::UnequalDimension { point: p, valence: ws.len(), expected: dim });
            }
            for (i, w) in ws.iter().enumerate() {
                if w.is_zero() {
                    v.push(Violation::ZeroTangentWeight { point: p });
                    continue;
                }
                for u in &ws[i + 1..] {
                    if !u.is_zero() && w.is_collinear(u) {
                        v.push(Violation::CollinearTangentWeights { point: p, first: w.to_string(), second: u.to_string() });
                    }
                }
            }
        }
        for d in &self.divisors {
            if let Some(e) = self.is_gkm_class(&d.class) {
                v.push(Violation::NotGkmClass { class: d.name.clone(), edge: e });
            }
        }
        ValidationReport { violations: v }
    }

    /// Human-readable moment-graph summary.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: dimension {}, torus rank {}, {} fixed points, {} edges, curve lattice rank {}\n",
            self.name,
            self.dimension(),
            self.torus_rank,
            self.num_points(),
            self.num_edges(),
            self.lattice_rank
        );
        for (i, e) in self.edges.iter().enumerate() {
            s += &format!(
                "  edge {i}: {} -- {}  character {}  class ({})\n",
                self.points[e.ends[0]], self.points[e.ends[1]], e.character, e.class
            );
        }
        for d in &self.divisors {
            s += &format!("  class {}\n", d.name);
        }
        s
    }
}

/// `(D(a) − D(b)) / ω` when it is a rational constant.
fn edge_pairing(d: &EquivariantClass, e: &Edge) -> Option<Q> {
    let diff = d.at(e.ends[0]) - d.at(e.ends[1]);
    let diff = diff.as_polynomial()?;
    let w = e.character.to_polynomial();
    exact_ratio(diff, &w)
}

/// `c` with `p = c · w`, if it exists.
pub fn exact_ratio(p: &Polynomial, w: &Polynomial) -> Option<Q> {
    if p.is_zero() {
        return Some(Q::zero());
    }
    let (m, c) = w.terms().next()?;
    let pc = p.terms().find(|(pm, _)| *pm == m).map(|(_, c)| c.clone())?;
    let ratio = pc / c;
    (&w.scale(&ratio) == p).then_some(ratio)
}

/// Small integral functional that is strictly positive on all given classes.
fn find_positive_functional(classes: &[CurveClass], rank: usize) -> Option<Vec<i64>> {
    if classes.iter().any(|c| c.is_zero()) {
        return None;
    }
    if rank == 0 {
        return Some(Vec::new());
    }
    let ok = |f: &[i64]| classes.iter().all(|c| c.dot(f) > 0);
    let ones = vec![1; rank];
    if ok(&ones) {
        return Some(ones);
    }
    for bound in 1..=6i64 {
        let mut f = vec![-bound; rank];
        loop {
            if f.iter().any(|x| x.abs() == bound) && ok(&f) {
                return Some(f);
            }
            let mut k = 0;
            while k < rank {
                f[k] += 1;
                if f[k] <= bound {
                    break;
                }
                f[k] = -bound;
                k += 1;
            }
            if k == rank {
                break;
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Var;

    fn lam(i: usize, rank: usize) -> Character {
        Character::basis(rank, i)
    }

    #[test]
    fn p1_basics() {
        let t = projective_space(1, vec![Character::zero(), lam(0, 1)]).unwrap();
        assert!(t.validate().is_ok());
        assert_eq!(t.tangent_weights(0), vec![lam(0, 1)]);
        assert_eq!(t.euler_class_tangent(0), &RationalFunction::var(Var::Lambda(0)));
        assert_eq!(t.euler_class_tangent(1), &-&RationalFunction::var(Var::Lambda(0)));
        assert!(t.integrate(&EquivariantClass::one(2)).unwrap().is_zero());
        let pt = EquivariantClass::new(vec![RationalFunction::var(Var::Lambda(0)), RationalFunction::zero()]);
        assert_eq!(t.integrate(&pt).unwrap(), RationalFunction::one());
        assert_eq!(t.anticanonical_degree(&CurveClass(vec![1])), Some(2));
        assert_eq!(t.pair_divisors(&CurveClass(vec![1])).unwrap(), vec![q(1)]);
    }

    #[test]
    fn functional_search() {
        let cs = vec![CurveClass(vec![1, -1]), CurveClass(vec![0, 1]), CurveClass(vec![1, 1])];
        let f = find_positive_functional(&cs, 2).unwrap();
        assert!(cs.iter().all(|c| c.dot(&f) > 0));
        assert!(find_positive_functional(&[CurveClass(vec![1]), CurveClass(vec![-1])], 1).is_none());
    }

    #[test]
    fn parse_classes() {
        assert_eq!(CurveClass::parse("2, 1").unwrap(), CurveClass(vec![2, 1]));
        assert!(CurveClass::parse("2;x").is_err());
        assert!(CurveClass::parse("").is_err());
    }
}
