//! Dense complex linear algebra at small dimension: products, traces,
//! characteristic polynomial by two independent routes, eigenvalues, matrix
//! exponential. Everything is written in-repo; tolerances use the
//! max-abs-entry norm throughout.

pub mod charpoly;
pub mod eig;
pub mod expm;
pub mod lu;
pub mod matrix;
pub mod newton;
pub mod reference;

pub use charpoly::{cayley_hamilton_residual, cayley_hamilton_tolerance, char_poly, CharPolyCoeffs};
pub use eig::{eigenvalues, sort_canonical};
pub use expm::mat_exp;
pub use matrix::{mat_trace_power, trace_powers, CMatrix, MAX_DIM};
pub use newton::{coeffs_to_power_sums, newton_roundtrip, power_sums_to_coeffs};
