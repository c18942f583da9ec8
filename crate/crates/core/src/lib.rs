//! Exact analysis and simulation of Grover walks on finite graphs with
//! semi-infinite tails attached at a set of boundary vertices.
//!
//! The crate computes the stationary state of the walk on the internal arcs,
//! the surface scattering matrix, and the comfortability (half the squared
//! amplitude mass stored in the interior) by three independent routes:
//!
//! * a direct rational solve of the internal fixed-point equation
//!   ([`stationary`]),
//! * Laplacian / signless-Laplacian potentials ([`potential`]),
//! * spanning-forest and odd-unicyclic factor counts ([`factors`]).
//!
//! A floating-point time-domain simulator ([`simulator`]) witnesses the
//! convergence of the walk to the exact stationary state.

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod factors;
pub mod graph;
pub mod instance;
pub mod potential;
pub mod selftest;
pub mod simulator;
pub mod stationary;

pub use algebra::{RatMatrix, Rational};
pub use error::{Error, Result};
pub use graph::{Arc, Bipartition, Graph, Vertex};
pub use instance::{parse_instance, Phase, WalkInstance};
