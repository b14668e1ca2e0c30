//! Forward and inverse eigenfunction transforms, level-blocked coefficient
//! vectors, powers of `E`, and the coefficient file format.
//!
//! Grid conventions: circle `x_i = 2πi/N`; torus `(2πi/N, 2πj/N)` stored
//! row-major in `i`; sphere colatitudes `θ_i = arccos t_i` for the
//! Gauss-Legendre nodes `t_i` in decreasing order, longitudes `2πk/N_φ`,
//! stored row-major in `i`.

mod coef_file;
mod fourier;
mod grid;
mod quadrature;
mod vector;

pub use coef_file::{parse_coef_file, write_coef_file, CoefFile, COEF_FORMAT};
pub use fourier::{forward, inverse, plancherel_residual, sample_norm_sq};
pub use grid::{Grid, SampledFunction};
pub use quadrature::gauss_legendre;
pub use vector::{apply_derivative, apply_power, Block, SpectralVector};
pub(crate) use vector::log_sum_exp_half;

use thiserror::Error;

use crate::spectrum::SpectrumError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("grid cannot resolve the requested bandwidth: {0}")]
    Bandwidth(String),
    #[error("grid is for {grid}, operator is on {op}")]
    ManifoldMismatch { grid: &'static str, op: &'static str },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}
