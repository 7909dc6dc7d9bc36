//! Spectral analysis of randomly weighted random networks.
//!
//! The crate generates ER and link-cut BA topologies with random link
//! weights, computes the full spectrum of the normalized Laplacian
//! N = D^{-1/2}(D - A)D^{-1/2}, measures how close the bulk eigenvalue
//! distribution is to a semicircle of radius r centered at 1, and derives
//! random-walk propagation metrics from the spectrum: per-node expected
//! first-arrival times, their stationary average m = sum_{l>=2} 1/lambda_l,
//! and the semicircle closed form 2(n-1)(1 - sqrt(1-r^2))/r^2 with its
//! relative error.
//!
//! Modules:
//! - [`graph`]: weighted graph data model, degree statistics, edge-list I/O
//! - [`generators`]: seeded ER / cut-BA topologies and link-weight laws
//! - [`eigen`]: dense symmetric eigensolver (tridiagonalization + QL)
//! - [`spectral`]: normalized Laplacian, eigenvalue histograms, semicircle fits
//! - [`walk`]: first-arrival times, m, the closed form and a Monte Carlo oracle
//! - [`harness`]: trial/sweep driver and figure-data emission
//!
//! The `specnet` binary exposes the same pipeline as subcommands
//! (`generate`, `spectrum`, `hist`, `walk`, `sweep`, `figure`).

// `!(x > 0.0)` is the NaN-rejecting form of a positivity check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use generators::{GenConfig, Model, WeightDistribution, WeightKind};
pub use graph::{DegreeStats, WeightedGraph};
pub use harness::ExperimentConfig;
pub use spectral::{RadiusMode, SemicircleFit, SpectralDecomposition};
