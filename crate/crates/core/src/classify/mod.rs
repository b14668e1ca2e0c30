//! Decision procedures for regularity classes, read off level norms
//! `h_j = ‖f̂(j)‖_HS`.
//!
//! The quantifiers in the class definitions ("there exist L, C", "for every
//! L") cannot be decided from finitely many levels. Every test here is a
//! fixed, documented convention:
//!
//! - levels below `floor` times the largest norm at or below them are
//!   dropped, as is `j = 0`;
//! - `L` runs over the dyadic grid `2^t`, `t ∈ [l_grid_min, l_grid_max]`;
//!   an `L` is *stable* when `q_j = log h_j ± M(L λ_j^{1/ν})` has Theil-Sen
//!   slope at most `trend_tol` against `M_L` over the top quartile, and
//!   *informative* when `M_L` spans at least one unit there;
//! - the shape exponent `ρ`, the slope of `ln D_j` against `ln M(λ_j^{1/ν})`
//!   (with `D_j` the decay or growth in log space), separates "some `L`"
//!   from "every `L`".

mod dual;
mod fit;
mod levels;
mod membership;
mod report;

pub use dual::{dual_growth, pairing_converges, DualClass, DualVerdict, PairingDiagnostics, PairingVerdict};
pub use fit::{fit_decay, gevrey_order, DecayFit, FitModel, GevreyEstimate, MIN_USABLE_LEVELS};
pub use levels::GridPoint;
pub use membership::{definition_membership, komatsu_membership, DefinitionVerdict, KomatsuVerdict, PowerPoint};
pub use report::{classify, smoothness_class, ClassificationReport, Evidence, Tier, TierFlags};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weights::WeightsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("vector is exactly zero")]
    ExactZero,
    #[error("{usable} usable levels above the floor, need {needed}")]
    TooFewLevels { usable: usize, needed: usize },
    #[error("weight sequence has no (M.1)/(M.2) certificate; run check_conditions first")]
    Uncertified,
    #[error("m_max must be at least 10 (got {0})")]
    MMaxTooSmall(u64),
    #[error("inconsistent model: {0}")]
    InconsistentModel(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Weights(#[from] WeightsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Some `L` (equivalently some `h`) works.
    Roumieu,
    /// Every `L` works.
    Beurling,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Roumieu => "roumieu",
            Regime::Beurling => "beurling",
        })
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "roumieu" => Ok(Regime::Roumieu),
            "beurling" => Ok(Regime::Beurling),
            other => Err(format!("unknown regime '{other}' (expected roumieu or beurling)")),
        }
    }
}

/// Thresholds shared by all tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyOptions {
    /// Relative floor on level norms.
    pub floor: f64,
    pub l_grid_min: i32,
    pub l_grid_max: i32,
    /// Search range for the stretched exponent `g = 1/s`.
    pub g_range: (f64, f64),
    /// Largest Theil-Sen slope that still counts as "no growth trend".
    pub trend_tol: f64,
    /// Shape exponent at or above which decay is "at least one multiple of M".
    pub roumieu_shape: f64,
    /// Shape exponent at or above which decay beats every multiple of M.
    pub beurling_shape: f64,
    /// Largest quadratic coefficient of the definition-side residuals for
    /// Roumieu membership; Beurling needs it below the negative.
    pub curvature_tol: f64,
    /// `|s - 1|` within this is reported analytic.
    pub analytic_tol: f64,
    /// Relative Cauchy tail accepted as converged.
    pub pairing_tail_tol: f64,
    /// Highest power of `E` in the definition-side test.
    pub m_max: u64,
    pub regime: Regime,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            floor: 1e-14,
            l_grid_min: -20,
            l_grid_max: 20,
            g_range: (0.05, 1.2),
            trend_tol: 0.05,
            roumieu_shape: 0.8,
            beurling_shape: 1.2,
            curvature_tol: 0.03,
            analytic_tol: 0.05,
            pairing_tail_tol: 1e-6,
            m_max: 15,
            regime: Regime::Roumieu,
        }
    }
}
