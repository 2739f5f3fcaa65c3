//! Exact analysis of two-dimensional configurations `η: Z² → A`: pattern
//! complexity and discrepancy, generating sets, finite-scale nonexpansive
//! directions, balanced sets and periodicity.

pub mod balanced;
pub mod complexity;
pub mod config;
pub mod error;
pub mod expansivity;
pub mod extension;
pub mod geometry;
pub mod language;
pub mod periodicity;
pub mod verifier;

pub use config::{Alphabet, Configuration, Grid, LiftRule, Pattern, Source, SubstitutionRule, Symbol};
pub use error::{Error, Result};
pub use geometry::{ConvexLatticeSet, DirectedLine, Direction, Edge, LatticePoint, Unimodular};
