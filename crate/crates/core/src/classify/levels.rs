use serde::{Deserialize, Serialize};

use super::ClassifyOptions;
use crate::stats::theil_sen;
use crate::transform::SpectralVector;
use crate::weights::{AssociatedFunction, WeightsError};

/// Levels kept for fitting, in increasing `j`.
#[derive(Debug, Clone)]
pub(crate) struct Usable {
    pub j: Vec<usize>,
    pub lambda: Vec<f64>,
    pub log_h: Vec<f64>,
    /// Levels with `λ > 0` dropped by the floor (zero blocks included).
    pub floored: usize,
}

impl Usable {
    pub fn len(&self) -> usize {
        self.j.len()
    }

    /// First index of the top quartile.
    pub fn top_start(&self) -> usize {
        top_quartile_start(self.len())
    }

    pub fn max_log(&self) -> f64 {
        self.log_h.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn top_quartile_start(n: usize) -> usize {
    n - n.div_ceil(4)
}

/// Levels `j >= 1` with `λ_j > 0` whose norm is at least `floor` times the
/// largest norm at or below that level.
///
/// For decaying vectors the running maximum is the global one; for growing
/// functionals it keeps the low levels, which a global floor would discard.
pub(crate) fn usable_levels(v: &SpectralVector, floor: f64) -> Usable {
    let log_floor = floor.ln();
    let logs = v.log_hs_norms();
    let mut running = f64::NEG_INFINITY;
    let mut out = Usable { j: Vec::new(), lambda: Vec::new(), log_h: Vec::new(), floored: 0 };
    for (j, &lh) in logs.iter().enumerate() {
        running = running.max(lh);
        let lam = v.lambda(j);
        if j == 0 || lam <= 0.0 {
            continue;
        }
        if lh.is_finite() && lh >= running + log_floor {
            out.j.push(j);
            out.lambda.push(lam);
            out.log_h.push(lh);
        } else {
            out.floored += 1;
        }
    }
    out
}

/// `M(L λ^{1/ν})` for every entry of `lambda`.
pub(crate) fn assoc_values(af: &AssociatedFunction, l: f64, lambda: &[f64]) -> Result<Vec<f64>, WeightsError> {
    let inv_nu = 1.0 / af.nu() as f64;
    lambda.iter().map(|&lam| af.value(l * lam.powf(inv_nu))).collect()
}

/// Stability of `q_j = y_j + sign · M(L λ_j^{1/ν})` at one grid `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub l: f64,
    /// `sup_j q_j` over the levels used.
    pub log_sup: f64,
    /// Theil-Sen slope of `q` against `M_L` over the top quartile.
    pub trend: f64,
    /// `M_L` spans at least one unit over the top quartile.
    pub informative: bool,
    pub stable: bool,
}

pub(crate) fn grid_scan(
    af: &AssociatedFunction,
    lambda: &[f64],
    y: &[f64],
    sign: f64,
    opts: &ClassifyOptions,
) -> Result<Vec<GridPoint>, WeightsError> {
    let top = top_quartile_start(lambda.len());
    let mut out = Vec::new();
    for t in opts.l_grid_min..=opts.l_grid_max {
        let l = 2f64.powi(t);
        let m = assoc_values(af, l, lambda)?;
        let q: Vec<f64> = y.iter().zip(&m).map(|(a, b)| a + sign * b).collect();
        let log_sup = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mt, qt) = (&m[top..], &q[top..]);
        let span = mt.iter().copied().fold(f64::NEG_INFINITY, f64::max) - mt.iter().copied().fold(f64::INFINITY, f64::min);
        let informative = span >= 1.0;
        let trend = if informative { theil_sen(mt, qt) } else { 0.0 };
        out.push(GridPoint { l, log_sup, trend, informative, stable: informative && trend <= opts.trend_tol });
    }
    Ok(out)
}

/// Theil-Sen slope of `ln d` against `ln M(λ^{1/ν})` over the top quartile,
/// skipping points where either side is not positive.
pub(crate) fn shape_exponent(af: &AssociatedFunction, lambda: &[f64], d: &[f64]) -> Result<Option<f64>, WeightsError> {
    let top = top_quartile_start(lambda.len());
    let m = assoc_values(af, 1.0, &lambda[top..])?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (mi, di) in m.iter().zip(&d[top..]) {
        if *mi > 0.0 && *di > 0.0 {
            x.push(mi.ln());
            y.push(di.ln());
        }
    }
    if x.len() < 3 || x.iter().all(|&a| a == x[0]) {
        return Ok(None);
    }
    Ok(Some(theil_sen(&x, &y)))
}
