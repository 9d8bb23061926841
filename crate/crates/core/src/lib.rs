//! Galton-Watson tree laboratory.
//!
//! Exact and Monte Carlo computation of GW tree laws, derived offspring
//! distributions, samplers for Kesten's and condensation trees, and an
//! enumeration oracle for local limits of conditioned trees.

pub mod functional;
pub mod lab;
pub mod offspring;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod series;
pub mod stats;
pub mod tree;
pub mod weight;

pub use functional::{DegreeSet, FunctionalSpec, Window};
pub use offspring::OffspringDistribution;
pub use tree::{ExtendedTree, FiniteTree, NodeLabel};
pub use weight::{Rational, Weight};
