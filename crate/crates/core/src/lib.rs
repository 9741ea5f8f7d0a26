//! laxlab is a numerical laboratory for four integrable N-body families
//! whose flows linearize algebraically: positions, Lax data, conserved
//! traces and their companion-matrix evolution laws, with an independent
//! ODE oracle to verify every claim numerically.

pub mod error;
pub mod integrate;
pub mod linalg;
pub mod observables;
pub mod solver;
pub mod systems;

pub use error::{Error, Result};
pub use num_complex::Complex64;
