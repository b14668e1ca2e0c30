use serde::{Deserialize, Serialize};

use super::fit::MIN_USABLE_LEVELS;
use super::levels::{grid_scan, shape_exponent, top_quartile_start, usable_levels, GridPoint};
use super::{ClassifyError, ClassifyOptions, Regime};
use crate::spectrum::ModelOperator;
use crate::stats::{linear_fit, quadratic_fit};
use crate::transform::SpectralVector;
use crate::weights::{AssociatedFunction, WeightSequence};

/// Fewest non-truncated `m >= 1` the definition-side fit accepts.
const MIN_VALID_POWERS: usize = 6;

/// Coefficient-side verdict for `h_j <= C exp(-M(L λ_j^{1/ν}))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KomatsuVerdict {
    pub regime: Regime,
    pub member: bool,
    /// Roumieu witness: the largest stable grid `L`.
    pub witness_l: Option<f64>,
    /// `log C` at the witness.
    pub witness_log_c: Option<f64>,
    /// Beurling: the smallest grid `L` that is not stable on the truncation.
    pub first_failing_l: Option<f64>,
    /// Slope of `ln(max log h - log h_j)` against `ln M(λ_j^{1/ν})` over the
    /// top quartile.
    pub shape_exponent: Option<f64>,
    pub grid: Vec<GridPoint>,
    pub note: Option<String>,
}

/// Tests `v` against the class of `w` through its coefficient decay.
///
/// Finite data cannot settle the quantifiers alone: a slowly decaying vector
/// looks bounded against `exp(M_L)` for tiny `L` on any truncation. The
/// verdict therefore combines the dyadic grid test with the shape exponent
/// `ρ`: Roumieu needs `ρ >= roumieu_shape` and some stable informative `L`;
/// Beurling needs `ρ >= beurling_shape`, i.e. the decay outruns every
/// multiple of `M`.
pub fn komatsu_membership(
    v: &SpectralVector,
    w: &WeightSequence,
    regime: Regime,
    opts: &ClassifyOptions,
) -> Result<KomatsuVerdict, ClassifyError> {
    if w.certificate().is_none() {
        return Err(ClassifyError::Uncertified);
    }
    if w.nu() != v.op().nu() {
        return Err(ClassifyError::Mismatch(format!("weights have nu = {}, operator has {}", w.nu(), v.op().nu())));
    }
    let mut verdict = KomatsuVerdict {
        regime,
        member: true,
        witness_l: None,
        witness_log_c: None,
        first_failing_l: None,
        shape_exponent: None,
        grid: Vec::new(),
        note: None,
    };
    if v.is_zero() {
        verdict.note = Some("exact zero".into());
        return Ok(verdict);
    }
    let u = usable_levels(v, opts.floor);
    if u.len() < MIN_USABLE_LEVELS {
        if tail_below_floor(v, opts.floor) {
            verdict.note = Some("band-limited at working precision".into());
            return Ok(verdict);
        }
        return Err(ClassifyError::TooFewLevels { usable: u.len(), needed: MIN_USABLE_LEVELS });
    }
    let af = AssociatedFunction::new(w);
    let max_log = u.max_log();
    let d: Vec<f64> = u.log_h.iter().map(|y| max_log - y).collect();
    let rho = shape_exponent(&af, &u.lambda, &d)?;
    let grid = grid_scan(&af, &u.lambda, &u.log_h, 1.0, opts)?;
    let witness = grid.iter().rev().find(|p| p.stable).copied();
    verdict.first_failing_l = grid.iter().find(|p| !p.stable).map(|p| p.l);
    verdict.shape_exponent = rho;
    verdict.witness_l = witness.map(|p| p.l);
    verdict.witness_log_c = witness.map(|p| p.log_sup);
    let rho = rho.unwrap_or(f64::NAN);
    verdict.member = match regime {
        Regime::Roumieu => rho >= opts.roumieu_shape && witness.is_some(),
        Regime::Beurling => rho >= opts.beurling_shape,
    };
    if verdict.shape_exponent.is_none() {
        verdict.note = Some("decay too flat to measure its shape".into());
    }
    verdict.grid = grid;
    Ok(verdict)
}

/// True when the vector drops below the floor before the truncation ends and
/// stays there.
pub(crate) fn tail_below_floor(v: &SpectralVector, floor: f64) -> bool {
    let logs = v.log_hs_norms();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let last_above = logs.iter().rposition(|&x| x.is_finite() && x >= max + floor.ln());
    matches!(last_above, Some(j) if j < logs.len() - 1)
}

/// One power in the definition-side test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub m: u64,
    /// `log ‖E^m φ‖_{L²}` over the floored levels.
    pub log_norm: f64,
    /// `log ‖E^m φ‖ - log M_{νm}`.
    pub residual: f64,
    /// The largest term of the norm sits in the top quartile of usable
    /// levels, so the truncation decides its size.
    pub truncation_dominated: bool,
}

/// Definition-side verdict for `‖E^m φ‖ <= C h^{νm} M_{νm}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefinitionVerdict {
    /// Roumieu membership.
    pub member: bool,
    pub beurling_member: bool,
    /// `None` encodes `C = 0` (exact zero).
    pub log_c: Option<f64>,
    pub h: Option<f64>,
    /// Quadratic coefficient of the residuals against `m`.
    pub curvature: Option<f64>,
    pub points: Vec<PowerPoint>,
    /// Too few clean powers; the verdict is the coefficient-side one.
    pub deferred: bool,
    pub note: Option<String>,
}

impl DefinitionVerdict {
    pub fn c(&self) -> f64 {
        self.log_c.map_or(0.0, f64::exp)
    }
}

/// Tests `v` against the class of `w` through the norms `‖E^m φ‖`, `m = 0..=m_max`.
///
/// Roumieu membership means the residuals `r_m = log ‖E^m φ‖ - log M_{νm}`
/// grow at most linearly in `m`; Beurling means they bend down. Both are
/// read off the quadratic coefficient of a fit over the clean powers.
pub fn definition_membership(
    op: &ModelOperator,
    v: &SpectralVector,
    w: &WeightSequence,
    m_max: u64,
    opts: &ClassifyOptions,
) -> Result<DefinitionVerdict, ClassifyError> {
    if m_max < 10 {
        return Err(ClassifyError::MMaxTooSmall(m_max));
    }
    if op.manifold != v.op().manifold || op.nu() != w.nu() {
        return Err(ClassifyError::Mismatch("operator, vector and weights must agree".into()));
    }
    let mut out = DefinitionVerdict {
        member: true,
        beurling_member: true,
        log_c: None,
        h: None,
        curvature: None,
        points: Vec::new(),
        deferred: false,
        note: None,
    };
    if v.is_zero() {
        out.note = Some("exact zero: C = 0".into());
        return Ok(out);
    }
    // Levels above the floor, including j = 0 (it belongs to the norm).
    let logs = v.log_hs_norms();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let kept: Vec<usize> = (0..logs.len()).filter(|&j| logs[j].is_finite() && logs[j] >= max + opts.floor.ln()).collect();
    // Eigenvalues come from `op` so a shifted operator can be tested against
    // the same coefficients.
    let lambdas: Vec<f64> = kept.iter().map(|&j| op_lambda(op, v, j)).collect();
    let top = top_quartile_start(kept.len());
    let nu = w.nu() as u64;
    for m in 0..=m_max {
        let terms: Vec<f64> = kept
            .iter()
            .zip(&lambdas)
            .map(|(&j, &lam)| {
                if m == 0 {
                    logs[j]
                } else if lam > 0.0 {
                    m as f64 * lam.ln() + logs[j]
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let (arg, _) = terms
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &t)| if t > acc.1 { (i, t) } else { acc });
        let log_norm = crate::transform::log_sum_exp_half(&terms);
        out.points.push(PowerPoint {
            m,
            log_norm,
            residual: log_norm - w.log_m(nu * m),
            truncation_dominated: kept.len() >= 4 && arg >= top,
        });
    }
    let valid: Vec<&PowerPoint> = out.points.iter().filter(|p| p.m >= 1 && !p.truncation_dominated).collect();
    if valid.len() < MIN_VALID_POWERS {
        out.deferred = true;
        out.note = Some(format!("{} clean powers; verdict taken from the coefficient side", valid.len()));
        let k = komatsu_membership(v, w, Regime::Roumieu, opts)?;
        let kb = komatsu_membership(v, w, Regime::Beurling, opts)?;
        out.member = k.member;
        out.beurling_member = kb.member;
        return Ok(out);
    }
    let ms: Vec<f64> = valid.iter().map(|p| p.m as f64).collect();
    let rs: Vec<f64> = valid.iter().map(|p| p.residual).collect();
    let curvature = quadratic_fit(&ms, &rs)[2];
    let (_, slope, _) = linear_fit(&ms, &rs);
    let log_c = out
        .points
        .iter()
        .filter(|p| !p.truncation_dominated)
        .map(|p| p.residual - slope * p.m as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    out.curvature = Some(curvature);
    out.h = Some((slope / nu as f64).exp());
    out.log_c = Some(log_c);
    out.member = curvature <= opts.curvature_tol;
    out.beurling_member = curvature < -opts.curvature_tol;
    Ok(out)
}

fn op_lambda(op: &ModelOperator, v: &SpectralVector, j: usize) -> f64 {
    v.levels()[j].base(v.op()) + op.shift
}
