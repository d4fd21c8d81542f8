//! Two-dimensional finite element assembly on triangular meshes.
//!
//! Discretizations are declared as lists of `(coefficient, test, trial)`
//! entries over a small term language (`"v.grad"`, `"u1.dy + u2.dx"`, ...)
//! and assembled into sparse systems for conforming P1/P2/P3 Lagrange
//! spaces. Scalar and multi-component (block) forms are supported, over
//! the interior of the mesh and over selected boundary edges.
//!
//! The [`problems`] module contains complete drivers (Poisson, linear
//! elasticity, mixed biharmonic, Stokes, heat, Navier-Stokes Newton) built
//! only from the public assembly API.

pub mod assembly;
pub mod error;
pub mod fespace;
pub mod io;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod system;
pub mod vform;

pub use error::{Error, Result};

use std::sync::Arc;

/// Shared scalar field `f(x, y)`.
pub type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Wraps a closure as a [`ScalarFn`].
pub fn scalar_fn<F>(f: F) -> ScalarFn
where
    F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}
