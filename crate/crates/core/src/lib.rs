//! Exact combinatorics of compact toric locally conformally symplectic
//! manifolds of LCK type.
//!
//! The classification data is a pair (C, a): a good rational polyhedral cone
//! C together with a positive period a. This crate provides the arithmetic
//! backbone (Hermite/Smith normal forms, saturation), the polyhedral model
//! (double description, face lattice), the goodness predicate with
//! machine-checkable certificates, the invariant pair with unimodular
//! equivalence, moment-polytope slices and deck reduction, and an exact
//! LP-certified check that deck-equivariant strictly convex potentials are
//! positive.
//!
//! All arithmetic is exact: arbitrary-precision integers and rationals
//! throughout, with no floating-point paths.

pub mod cone;
pub mod goodness;
pub mod invariant;
pub mod lattice;
pub mod potential;
