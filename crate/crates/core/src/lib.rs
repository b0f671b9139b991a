//! Exact-arithmetic toolkit for multilinear polynomials in noncommuting
//! indeterminates, polynomial-identity testing on matrix algebras, and
//! analysis of linear maps that preserve zeros of a polynomial.
//!
//! All arithmetic is done over arbitrary-precision rationals; nothing in
//! this crate ever rounds. Randomized operations take an explicit RNG so
//! that every run is reproducible from a seed.

pub mod exact_matrix;
pub mod free_algebra;
pub mod group_lab;
pub mod pi_lab;
pub mod preserver_lab;
pub mod rat;
pub mod sampling;

pub use rat::Rat;
