//! Numerical laboratory for two nonlocal operators on a bounded interval:
//! the integral fractional Laplacian of order `2s` and the logarithmic
//! Laplacian arising as its derivative at `s = 0`.
//!
//! The crate assembles dense symmetric matrices for both operators under the
//! exterior Dirichlet condition (`u = 0` outside the interval), computes
//! least-energy ground states of the superlinear power problem and of its
//! logarithmic limit by projected gradient descent on the Nehari manifold,
//! and runs verification suites for the small-order asymptotics: operator
//! expansion in `s`, sharp logarithmic Sobolev inequality, eigenvalue bounds,
//! mountain-pass structure, and the `s -> 0` sweep of ground states.

pub mod config;
pub mod energy;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod ops;
mod par;
pub mod profile;
pub mod solver;
pub mod specialfn;

pub use error::{Error, Result};
