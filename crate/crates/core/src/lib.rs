//! Quantum channel interpolation: matrix kernels, channel representations,
//! orthogonal interpolators and conic interpolation programs.

pub mod channel;
pub mod cone;
pub mod error;
pub mod io;
pub mod matrix;
pub mod orthogonal;
pub mod random;
pub mod solver;
pub mod tol;

pub use error::{Error, Result};
pub use matrix::{BipartiteDims, Factor, Matrix, C64};
pub use tol::Tolerances;
