//! Periodic graph embeddings and critical percolation experiments.
//!
//! The crate is organised around a few layers:
//!
//! * [`graph`] holds genus-1 graphs as rotation systems with integer
//!   displacements, their duals, face refinements and covering graphs.
//! * [`embedding`] turns a [`graph::TorusGraph`] into concrete plane
//!   embeddings of a given modulus (square, sheared, balanced) and computes
//!   edge vectors and the local deviation field `psi`.
//! * [`modulus`] contains the random-walk modulus, covariance diagnostics and
//!   the periodic circle packing solver.
//! * [`percolation`] discretises domains and runs site-percolation Monte Carlo
//!   (crossings, separation fields, edge increments, contour sums).
//! * [`mixed`] covers mixed percolation on the centered square lattice,
//!   pivotal sites and exact enumeration in rational arithmetic.

pub mod embedding;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod mixed;
pub mod modulus;
pub mod parallel;
pub mod percolation;
pub mod rng;
pub mod stats;
pub mod unionfind;

pub use error::{Error, Result};
pub use num_complex::Complex64;
