//! Numerical toolkit for correlations of multiplicative functions with
//! polynomial and nilsequence orbits.

pub mod arith;
pub mod circle;
pub mod correlator;
pub mod dd;
pub mod dirichlet;
pub mod equidist;
pub mod error;
pub mod heisenberg;
pub mod param;
pub mod polyseq;
pub mod psi;
pub mod selftest;
pub mod sum;

pub use error::{Error, Result};
