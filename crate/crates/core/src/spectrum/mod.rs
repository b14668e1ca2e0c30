//! Model elliptic operators `E = -Δ + c` on the circle, the flat torus and
//! the round 2-sphere: eigenvalue levels, orthonormal eigenbases, and the
//! multiplicity and sup-norm estimates that go with them.

mod basis;
mod operator;
mod weyl;

pub use basis::{basis_eval, legendre_column, legendre_normalized, Point};
pub use operator::{
    enumerate_levels, level_stream, levels_through, Manifold, ModeLabel, ModelOperator, SpectrumLevel,
};
pub use weyl::{
    multiplicity_witness, series_diagnostic, sup_norm_check, weyl_checks, MultiplicityWitness, SeriesDiagnostic,
    SeriesVerdict, SupNormCheck, WeylReport,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("mode index {index} out of range for a level of multiplicity {d}")]
    ModeIndex { index: usize, d: usize },
    #[error("point does not lie on the {0} manifold")]
    PointMismatch(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
