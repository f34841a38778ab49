//! Binary qualitative calculi and model-existence reasoning.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the relation
//! algebra of a calculus ([`calculus`]), constraint networks ([`network`]),
//! a native backtracking solver with composition-table propagation
//! ([`solver`]), generation of answer-set programs for the same problem
//! ([`emit`]) and the disk geometry used to derive RCC-5 networks from
//! point data ([`geo`]).

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod calculus;
pub mod emit;
pub mod geo;
pub mod network;
pub mod relation;
pub mod solver;

pub use calculus::{AlgebraicProfile, Calculus, Diagnostic, IdentityLaw, InvalidCalculus, Tier};
pub use network::{normalize, Constraint, ConstraintNetwork, NetworkError, NormalizedNetwork};
pub use relation::{RelationIndex, RelationSet, MAX_RELATIONS};
