//! Core toolkit for measuring network controllability robustness.
//!
//! A directed network is attacked by removing nodes one at a time; after
//! every removal the number of external control inputs needed to keep the
//! remainder controllable is recorded. The resulting sequence (the
//! controllability curve) is the robustness measure produced here, either
//! for structural controllability (maximum matching) or state
//! controllability (matrix rank).
//!
//! Modules:
//! - [`graph`]: directed-graph values, adjacency matrices, node surgery
//! - [`netgen`]: seeded generators for the four studied topologies
//! - [`control`]: driver-node counts and the sparsity measure
//! - [`attack`]: attack strategies and the curve-simulation oracle
//! - [`dataset`]: gray-scale matrix images, sample files, manifests

pub mod attack;
pub mod control;
pub mod dataset;
pub mod error;
pub mod graph;
pub mod netgen;
pub mod rng;

pub use error::CoreError;

pub type Result<T> = std::result::Result<T, CoreError>;
