//! Spectral solver for `−∇·(−Δ)^{(α−2)/2} K(x)∇ũ = f` on the unit disk with `ũ = 0` outside,
//! built on the weighted Jacobi × solid-harmonic basis, plus an audit of its norm constants.
//!
//! Module map:
//! * [`specfun`]: log-gamma, gamma ratios, Jacobi polynomials;
//! * [`basis`]: basis indices, evaluation, weighted norms, coefficient containers;
//! * [`ops`]: exact coefficient actions of the gradient and Riesz operators;
//! * [`quadrature`]: disk quadrature, projection, diffusivity fields and Gram integrals;
//! * [`solver`]: assembly, linear solve, forward map, evaluation, regularity estimate;
//! * [`verify`]: executable checks returning [`verify::CheckResult`]s.
//!
//! Parallel loops use rayon; set `RAYON_NUM_THREADS` to bound the thread count. Results do
//! not depend on the thread count.

pub mod basis;
pub mod error;
pub mod ops;
pub mod quadrature;
pub mod solver;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
