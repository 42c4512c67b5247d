//! Exact solutions of the one-dimensional quantum Hamilton-Jacobi equation.
//!
//! The crate provides the analytic oscillator solutions, numerical solvers
//! for the real and imaginary parts of the quantum action, eigenvalues by
//! turning-point matching, and the coarse-graining tools used to compare the
//! quantum quantities with their classical counterparts.

// `!(a > b)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod classical;
pub mod error;
pub mod figures;
pub mod io;
pub mod limits;
pub mod model;
pub mod ode;
pub mod qhj;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{EnergySlice, Potential, PotentialModel, Region};

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
            v[n - 1] = b;
            v
        }
    }
}
