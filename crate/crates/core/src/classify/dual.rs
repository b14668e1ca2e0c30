use serde::{Deserialize, Serialize};

use super::fit::MIN_USABLE_LEVELS;
use super::levels::{grid_scan, shape_exponent, top_quartile_start, usable_levels, GridPoint};
use super::membership::tail_below_floor;
use super::{ClassifyError, ClassifyOptions};
use crate::stats::{pairwise_sum, theil_sen};
use crate::transform::SpectralVector;
use crate::weights::{AssociatedFunction, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualClass {
    /// Bound holds for every `L`; implies [`DualClass::BeurlingDual`].
    RoumieuDual,
    /// Bound holds for some `L` only.
    BeurlingDual,
    Neither,
}

/// Growth test `‖û(j)‖_HS <= K exp(M(L λ_j^{1/ν}))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVerdict {
    pub class: DualClass,
    pub roumieu: bool,
    pub beurling: bool,
    /// Level norms show no growth at all.
    pub bounded: bool,
    /// Smallest stable grid `L`.
    pub witness_l: Option<f64>,
    /// `log K` at the witness.
    pub witness_log_k: Option<f64>,
    /// Slope of `ln(log h_j - min log h)` against `ln M(λ_j^{1/ν})` over the
    /// top quartile.
    pub shape_exponent: Option<f64>,
    /// Per-`L` stability on the truncation.
    pub grid: Vec<GridPoint>,
    pub note: Option<String>,
}

impl DualVerdict {
    fn from_flags(roumieu: bool, beurling: bool) -> DualVerdict {
        let class = if roumieu {
            DualClass::RoumieuDual
        } else if beurling {
            DualClass::BeurlingDual
        } else {
            DualClass::Neither
        };
        DualVerdict {
            class,
            roumieu,
            beurling: beurling || roumieu,
            bounded: false,
            witness_l: None,
            witness_log_k: None,
            shape_exponent: None,
            grid: Vec::new(),
            note: None,
        }
    }
}

/// Classifies the growth of a functional's coefficients against `w`.
///
/// As on the decay side, the `∀L` pattern is read from the shape exponent
/// `ρ` (growth slower than any multiple of `M` when `ρ <= roumieu_shape`),
/// and the `∃L` pattern from the dyadic grid, limited to `ρ <= beurling_shape`.
pub fn dual_growth(v: &SpectralVector, w: &WeightSequence, opts: &ClassifyOptions) -> Result<DualVerdict, ClassifyError> {
    if w.nu() != v.op().nu() {
        return Err(ClassifyError::Mismatch(format!("weights have nu = {}, operator has {}", w.nu(), v.op().nu())));
    }
    let af = AssociatedFunction::new(w);
    let u = usable_levels(v, opts.floor);
    if v.is_zero() || (u.len() < MIN_USABLE_LEVELS && tail_below_floor(v, opts.floor)) {
        let mut out = DualVerdict::from_flags(true, true);
        out.bounded = true;
        out.note = Some("finitely many non-zero levels".into());
        return Ok(out);
    }
    if u.len() < MIN_USABLE_LEVELS {
        return Err(ClassifyError::TooFewLevels { usable: u.len(), needed: MIN_USABLE_LEVELS });
    }
    let grid = grid_scan(&af, &u.lambda, &u.log_h, -1.0, opts)?;
    let first_stable = grid.iter().find(|p| p.stable).copied();
    let top = u.top_start();
    let x: Vec<f64> = u.lambda[top..].iter().map(|l| l.ln_1p()).collect();
    let trend = theil_sen(&x, &u.log_h[top..]);
    let mut out = if trend <= 0.0 {
        let mut out = DualVerdict::from_flags(true, true);
        out.bounded = true;
        out
    } else {
        let min = u.log_h.iter().copied().fold(f64::INFINITY, f64::min);
        let g: Vec<f64> = u.log_h.iter().map(|y| y - min).collect();
        let rho = shape_exponent(&af, &u.lambda, &g)?;
        let mut out = match rho {
            Some(r) => DualVerdict::from_flags(r <= opts.roumieu_shape, r <= opts.beurling_shape && first_stable.is_some()),
            None => DualVerdict::from_flags(false, first_stable.is_some()),
        };
        out.shape_exponent = rho;
        out
    };
    if out.beurling {
        let w = first_stable.or_else(|| grid.last().copied());
        out.witness_l = w.map(|p| p.l);
        out.witness_log_k = w.map(|p| p.log_sup);
    }
    out.grid = grid;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingVerdict {
    Converged,
    Diverged,
    Inconclusive,
}

/// Absolute pairing `Σ_j Σ_k |u_jk| |φ_jk|` on the truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingDiagnostics {
    pub verdict: PairingVerdict,
    /// Log of the partial sum; `None` when every term vanishes.
    pub log_partial_sum: Option<f64>,
    /// Log of the geometric Cauchy-tail estimate; `None` for an exact zero tail.
    pub log_tail: Option<f64>,
    /// Tail estimate over partial sum.
    pub relative_tail: f64,
    /// Theil-Sen slope of the log terms per level over the top quartile.
    pub tail_slope: Option<f64>,
    pub levels: usize,
}

impl PairingDiagnostics {
    pub fn partial_sum(&self) -> f64 {
        self.log_partial_sum.map_or(0.0, f64::exp)
    }
}

/// Partial sums of the absolute pairing and a geometric tail estimate from
/// the decay rate of the last quarter of the terms.
pub fn pairing_converges(
    u: &SpectralVector,
    phi: &SpectralVector,
    opts: &ClassifyOptions,
) -> Result<PairingDiagnostics, ClassifyError> {
    if u.op() != phi.op() || u.j_max() != phi.j_max() {
        return Err(ClassifyError::Mismatch(format!(
            "pairing needs one operator and truncation (j_max {} vs {})",
            u.j_max(),
            phi.j_max()
        )));
    }
    let n = u.j_max() + 1;
    let log_terms: Vec<f64> = (0..n).map(|j| log_level_pairing(u, phi, j)).collect();
    let zero = PairingDiagnostics {
        verdict: PairingVerdict::Converged,
        log_partial_sum: None,
        log_tail: None,
        relative_tail: 0.0,
        tail_slope: None,
        levels: n,
    };
    let max = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(zero);
    }
    let scaled: Vec<f64> = log_terms.iter().map(|t| (t - max).exp()).collect();
    let log_sum = max + pairwise_sum(&scaled).ln();
    let top = top_quartile_start(n);
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        (top..n).filter(|&j| log_terms[j].is_finite()).map(|j| (j as f64, log_terms[j])).unzip();
    if xs.is_empty() {
        return Ok(PairingDiagnostics { log_partial_sum: Some(log_sum), ..zero });
    }
    if xs.len() < 3 {
        return Ok(PairingDiagnostics {
            verdict: PairingVerdict::Inconclusive,
            log_partial_sum: Some(log_sum),
            log_tail: None,
            relative_tail: f64::NAN,
            tail_slope: None,
            levels: n,
        });
    }
    let slope = theil_sen(&xs, &ys);
    let last = *ys.last().expect("non-empty");
    let (verdict, log_tail, relative_tail) = if slope >= 0.0 {
        (PairingVerdict::Diverged, None, f64::INFINITY)
    } else {
        let beta = -slope;
        let log_tail = last - beta - (-(-beta).exp_m1()).ln();
        let rel = (log_tail - log_sum).exp();
        let v = if rel <= opts.pairing_tail_tol { PairingVerdict::Converged } else { PairingVerdict::Inconclusive };
        (v, Some(log_tail), rel)
    };
    Ok(PairingDiagnostics {
        verdict,
        log_partial_sum: Some(log_sum),
        log_tail,
        relative_tail,
        tail_slope: Some(slope),
        levels: n,
    })
}

fn log_level_pairing(u: &SpectralVector, phi: &SpectralVector, j: usize) -> f64 {
    let raw: Vec<f64> = u.blocks()[j].coeffs.iter().zip(&phi.blocks()[j].coeffs).map(|(a, b)| a.norm() * b.norm()).collect();
    let s = pairwise_sum(&raw);
    if s == 0.0 {
        return f64::NEG_INFINITY;
    }
    let scale = u.log_scale(j) + phi.log_scale(j);
    if scale == f64::NEG_INFINITY {
        return scale;
    }
    s.ln() + scale
}
