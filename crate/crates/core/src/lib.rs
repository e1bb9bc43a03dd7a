//! Spectral adversarial attacks on graph structure.
//!
//! A graph's edges are flipped under a budget so that the eigenvalues of its
//! normalized Laplacian move as far as possible from the clean ones. The
//! search relaxes the binary flip matrix to `[0, 1]`, runs projected gradient
//! ascent on the spectral distance (optionally mixed with a GCN task loss), and
//! rounds the result back to flips by sampling.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the precision.

extern crate blas_src;

pub mod attack;
pub mod baselines;
pub mod error;
pub mod gcn;
pub mod graph;
pub mod laplacian;
pub mod linalg;
pub mod perturbation;
pub mod scalar;
pub mod spectral;

pub use error::{Result, SpacError};
pub use scalar::Scalar;

pub type Graph64 = graph::Graph<f64>;
pub type Graph32 = graph::Graph<f32>;
pub type AttackConfig64 = attack::AttackConfig<f64>;
pub type AttackConfig32 = attack::AttackConfig<f32>;
pub type AttackResult64 = attack::AttackResult<f64>;
pub type AttackResult32 = attack::AttackResult<f32>;
pub type SpectralBasis64 = spectral::SpectralBasis<f64>;
pub type SpectralBasis32 = spectral::SpectralBasis<f32>;
pub type GcnModel64 = gcn::GcnModel<f64>;
pub type GcnModel32 = gcn::GcnModel<f32>;
