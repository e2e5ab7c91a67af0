//! Exact computation of Koszul cohomology `K_{p,q}(B, L)` for monomial section
//! systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactlin`]: prime-field and rational sparse elimination (the hot path).
//! * [`sections`]: lattice-point models of the graded pieces `H^0(B + mL)`.
//! * [`koszul`]: wedge-basis differentials, Betti tables, duality and Euler checks.
//! * [`resolution`]: an independent Tor oracle built from a degree-by-degree
//!   minimal free resolution.
//! * [`equivariant`]: the signed diagonal complex, its invariant sections and a
//!   brute-force group-averaging check.
//! * [`asymptotics`]: sweeps over `L_d = dA + P`, finite differences and exact
//!   polynomial fits.
//!
//! Independent work items (multidegree blocks, Betti cells, sweep members) are
//! scheduled with rayon when the `parallel` feature is enabled; every result is
//! independent of the schedule.

pub mod asymptotics;
pub mod equivariant;
mod error;
pub mod exactlin;
pub mod koszul;
pub mod par;
pub mod resolution;
pub mod sections;

pub use error::{Error, Result};
pub use exactlin::{Exec, FieldSpec, LinAlg, SparseMatrix};
pub use koszul::{BettiTable, Engine, KoszulCell};
pub use sections::MonomialSystem;
