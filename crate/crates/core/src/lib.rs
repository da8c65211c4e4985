//! Exact cohomology computations for generalized Bott towers.
//!
//! A tower is given by its integer vector matrix ([`tower::TowerSpec`]).
//! From it we build the integral cohomology ring as a quotient of a
//! polynomial ring ([`cohomring::CohomRing`]), read off Chern classes of
//! the stage bundles, decide rational and integral triviality
//! ([`triviality`]), and search for graded ring isomorphisms between two
//! towers ([`isosearch`]). [`census`] enumerates towers in bulk.

pub mod census;
pub mod cohomring;
pub mod error;
pub mod exactpoly;
pub mod isosearch;
mod serde_big;
pub mod tower;
pub mod triviality;

pub use cohomring::{ChernData, CohomRing};
pub use error::{Error, Result};
pub use exactpoly::{Monomial, Polynomial, Rational};
pub use isosearch::{Degree2Map, SearchMode};
pub use tower::{Permutation, StageSpec, TowerSpec};
pub use triviality::{Degree2Class, GeneratorCandidate, TrivialityReport};
