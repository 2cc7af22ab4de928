//! Solver library and benchmark harness for a subdiffusion equation with a
//! constant time delay.
//!
//! The problem is posed on a 1D interval with homogeneous Dirichlet data:
//! a Caputo derivative of order `alpha` in (0,1) on the left, diffusion and
//! reaction on the right, plus a Riemann-Liouville integral of order
//! `1 - alpha` acting on the solution one delay window back, and a forcing
//! term. Time is discretized with the L1 formula for the Caputo derivative
//! and the fractional right-rectangle rule for the delay integral, on a
//! family of symmetric graded meshes that degenerates to a uniform mesh for
//! grading exponent 1. Space is discretized with piecewise linear finite
//! elements.
//!
//! Module map:
//! - [`mesh`]: symmetric graded temporal meshes and uniform spatial meshes
//! - [`powcalc`]: exact fractional calculus on shifted power expansions
//! - [`fracops`]: discrete fractional operators, kernel sequences, probes
//! - [`fem1d`]: P1 assembly, loads, norms, tridiagonal solves
//! - [`solver`]: the fully discrete time-stepping scheme
//! - [`bench`]: error tables, reference runs, kernel verification, CSV/CLI
//! - [`quadrature`]: tanh-sinh quadrature used as an independent oracle

pub mod bench;
pub mod error;
pub mod fem1d;
pub mod fracops;
pub mod mesh;
pub mod powcalc;
pub mod quadrature;
pub mod solver;
pub(crate) mod special;

pub use error::{Error, Result};
