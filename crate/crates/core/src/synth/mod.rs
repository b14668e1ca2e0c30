//! Coefficient vectors with prescribed level norms, and closed-form
//! references whose coefficients are known exactly.
//!
//! Randomness comes from SplitMix64 (`state += 0x9e3779b97f4a7c15`, then the
//! usual xor-shift-multiply finalizer), one stream per call, consumed level
//! by level in increasing `j` and mode order. The same seed gives the same
//! bits on every platform.

mod profile;
mod reference;

pub use profile::{from_profile, parse_profile_spec, DecayModel, DecayProfile, Phase, ProfileSpec, Split};
pub use reference::{delta_at, poisson_kernel, poisson_value};

use thiserror::Error;

use crate::spectrum::SpectrumError;
use crate::transform::TransformError;
use crate::weights::WeightsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("weight sequence has no (M.1)/(M.2) certificate; run check_conditions first")]
    Uncertified,
    #[error("profile parameter out of range: {0}")]
    Parameter(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}
