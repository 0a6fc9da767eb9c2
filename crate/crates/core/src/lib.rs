//! Critical curves of activator–inhibitor reaction–diffusion systems with
//! unilateral sources and sinks of the activator.
//!
//! The crate computes, for a fixed inhibitor diffusion `d2`, the largest
//! activator diffusion `d1` at which the homogenized stationary problem has a
//! non-trivial solution, both without unilateral terms (the classical
//! envelope of Turing hyperbolas) and with them (the maximum of a nonsmooth
//! generalized Rayleigh quotient). Sweeping `d2` exposes the strip of
//! parameters in which unilateral terms exclude bifurcation. A spectral
//! time integrator checks the linear picture dynamically.
//!
//! Module map:
//! - [`eigenbasis`]: analytic Laplace eigenbases, quadrature, projections;
//! - [`geometry`]: reaction matrix, hyperbolas, envelope, region labels;
//! - [`unilateral`]: the operators `β`, `β_N`, `S_{d2}` and the quotient maximizer;
//! - [`sweep`]: critical curves over a `d2` window, CSV/SVG output;
//! - [`simulator`]: exact-diffusion splitting integrator and growth rates;
//! - [`cli`]: JSON configuration and the `turing-unilateral` subcommands.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod eigenbasis;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod simulator;
pub mod sweep;
pub mod unilateral;

pub use eigenbasis::{BoundarySpec, DomainSpec, FaceCondition, SpectralBasis};
pub use error::{Error, Result};
pub use geometry::{DiffusionPoint, ReactionMatrix, RegionLabel};
pub use unilateral::{MaximizerOptions, MaximizerResult, Placement, SourceSinkProfile};
