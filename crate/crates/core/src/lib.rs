//! Finite group computations for equivariant bordism of surfaces: group
//! arithmetic, presentations, subgroup lattices, bar-complex homology in
//! low degrees, Bogomolov multipliers and the assembled bordism groups.

pub mod error;
pub mod group;
pub mod abelian;
pub mod bar;
pub mod bogomolov;
pub mod bordism;
pub mod builtins;
pub mod homology;
pub mod lattice;
pub mod local;
pub mod presentation;
pub mod snf;

pub use error::{Error, ErrorKind, Result};
pub use group::{FiniteGroup, GroupMap, SpecialShape, SubgroupHandle};
