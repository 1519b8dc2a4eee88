//! Equivariant genus-zero Gromov–Witten invariants of GKM targets by torus localization.

pub mod algebra;
pub mod gkm;
pub mod engine;
pub mod cone;
pub mod oracles;
pub mod io;
pub mod cache;
pub mod compare;
pub mod cli;
