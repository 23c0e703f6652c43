//! Bounded arctan entropy and its applications.
//!
//! The arctan ("t") entropy of a probability vector is
//! `H_c(p) = Σ p_i atan(1 / p_i^c) − π/4`; it is non-negative, bounded by
//! `π/4` and maximal at the uniform distribution. On top of it this crate
//! provides:
//!
//! - [`entropy`]: the measure, its joint and conditional forms, Shannon /
//!   Rényi / Tsallis baselines, and an executable axiom suite;
//! - [`divergence`]: the arctan divergence between finite distributions and
//!   the robust minimum-divergence estimator, with contamination,
//!   breakdown and consistency experiments;
//! - [`thresholding`] with [`diffevo`]: multilevel Kapur thresholding of
//!   grayscale images under any entropy, optimized by differential evolution;
//! - [`ewkm`]: entropy-weighted k-means with the arctan regularizer;
//! - [`metrics`]: NMI, ARI, PRI, GCE and VoI;
//! - [`io`]: PGM rasters, delimited datasets and canonical JSON reports.

pub mod cli;
pub mod diffevo;
pub mod divergence;
pub mod entropy;
pub mod error;
pub mod ewkm;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod thresholding;

pub use entropy::{EntropyMeasure, JointDistribution, ProbabilityVector, VectorKind};
pub use error::{Error, Result};
