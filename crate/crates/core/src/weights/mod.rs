//! Komatsu weight sequences `{M_k}` and their associated function
//! `M(r) = sup_k log(r^{νk} / M_{νk})`.
//!
//! Every quantity is held in log-space: `(νk)!` overflows an `f64` long
//! before the indices the associated function needs.

mod associated;
mod conditions;
mod envelope;
mod record;
mod sequence;

pub use associated::{
    ev_suppression_check, gevrey_bounds_check, AssocEval, AssociatedFunction, EvSuppression,
    GevreyBoundPoint, GevreyBoundsReport, FORWARD_SCAN_K_MAX,
};
pub use conditions::{
    check_conditions, validates_m1, validates_m2, ConditionReport, GrowthWitness, StabilityWitness,
};
pub use envelope::log_convex_regularize;
pub use record::{parse_weight_spec, parse_weights_record, write_weights_record, WeightSpec, WeightsRecord};
pub use sequence::{log_factorial, make_weights, ConditionCertificate, WeightKind, WeightSequence};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightsError {
    #[error("M_0 must equal 1 (got {0})")]
    M0NotOne(f64),
    #[error("weight M_{index} must be positive and finite (got {value})")]
    NonPositive { index: usize, value: f64 },
    #[error("custom table needs at least two entries for continuation")]
    TableTooShort,
    #[error("Gevrey order s must be >= 1 (got {0})")]
    GevreyOrder(f64),
    #[error("operator order nu must be positive")]
    ZeroNu,
    #[error("k_max must be at least 4 (got {0})")]
    KMaxTooSmall(usize),
    #[error("sequence grows too slowly for r = {r}: terms still rising at k = {k}")]
    GrowsTooSlowly { r: f64, k: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
