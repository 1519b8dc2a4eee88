//! Localization graph sums for genus-zero (twisted) equivariant invariants.

pub mod contribution;
pub mod graph;
pub mod invariant;
mod kernel;
pub mod weights;

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraError;
use crate::gkm::{EquivariantClass, GkmError, LineBundle};

pub use contribution::graph_contribution;
pub use graph::{classes_below, enumerate_decorated_graphs, enumerate_trees, DecoratedGraph, DecoratedTree, TreeEdge};
pub use invariant::{gw_invariant, nonequivariant_batch, nonequivariant_invariant, solve, InvariantResult, Problem};
pub use weights::{psi_integral, section_weights};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("psi integral needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("inconsistent edge data: {0}")]
    InconsistentEdgeData(String),
    #[error("Euler factor vanishes and cannot be inverted: {0}")]
    NonInvertibleEulerFactor(String),
    #[error(transparent)]
    Target(#[from] GkmError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("result is not constant in the equivariant parameters: {0}")]
    NotConstant(String),
    #[error("invalid insertion: {0}")]
    InvalidInsertion(String),
    #[error("invalid twist: {0}")]
    InvalidTwist(String),
    #[error("curve class {0} does not match the curve lattice")]
    BadClass(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// One insertion `ψ^a α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub class: EquivariantClass,
    pub psi: u32,
}

impl Insertion {
    pub fn new(class: EquivariantClass) -> Self {
        Insertion { class, psi: 0 }
    }

    pub fn with_psi(class: EquivariantClass, psi: u32) -> Self {
        Insertion { class, psi }
    }
}

/// Declared cohomological behaviour of a twist summand; checked on every edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Nonnegative degree on every edge, so only `H^0` appears.
    Convex,
    /// Negative degree on every edge, so only `H^1` appears over covers.
    Concave,
}

/// Which Euler class of the index bundle multiplies the integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EulerMode {
    /// `e(E_{0,n,β})^{-1} = e(H^1) / e(H^0)`.
    Inverse,
    /// `e(E_{0,n,β}) = e(H^0) / e(H^1)`.
    Direct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistSummand {
    pub bundle: LineBundle,
    pub orientation: Orientation,
}

/// Twisting data: a split bundle with declared orientations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistSpec {
    pub summands: Vec<TwistSummand>,
    pub euler: EulerMode,
    /// Adds the auxiliary weight `x` to every summand weight.
    pub auxiliary_weight: bool,
}

impl TwistSpec {
    /// Summand bundles with the auxiliary weight applied.
    pub fn effective_bundles(&self) -> Vec<LineBundle> {
        self.summands
            .iter()
            .map(|s| if self.auxiliary_weight { s.bundle.with_aux(1) } else { s.bundle.clone() })
            .collect()
    }
}

/// Symbolic arithmetic, or evaluation at a seeded random point of the λ's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    Symbolic,
    Evaluated { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub mode: Mode,
    /// Worker threads; 0 uses the default pool.
    pub workers: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { mode: Mode::Symbolic, workers: 0 }
    }
}

impl EngineOptions {
    pub fn symbolic() -> Self {
        Self::default()
    }

    pub fn evaluated(seed: u64) -> Self {
        EngineOptions { mode: Mode::Evaluated { seed }, workers: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}
