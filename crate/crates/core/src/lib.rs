//! Lattice-valued subgroup theory over finite groups and finite lattices.

pub mod error;
pub mod fixtures;
pub mod group;
pub mod io;
pub mod lattice;
pub mod lgroup;
pub mod lset;
pub mod maxfrat;
pub mod perm;
pub mod reconstruct;
pub mod verify;

pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupElement, GroupHomomorphism, GroupKind, GroupSpec, Subgroup};
pub use lattice::{FiniteLattice, LatticeElement, LatticeSpec};
pub use lset::{LPoint, LSubset};
