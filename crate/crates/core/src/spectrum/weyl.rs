use serde::{Deserialize, Serialize};

use super::basis::{basis_eval, legendre_column, Point};
use super::operator::{enumerate_levels, level_stream, Manifold, ModelOperator};
use crate::stats::{linear_fit, KahanSum};

/// Levels fed to the sup-norm check.
const SUP_LEVELS: usize = 64;
/// Colatitude samples for sphere sup norms (poles included).
const THETA_SAMPLES: usize = 2049;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityWitness {
    /// `max_j d_j / (1 + λ_j)^{n/ν}`.
    pub c: f64,
    pub argmax_lambda: f64,
    pub levels: u64,
}

/// `d_j <= C (1 + λ_j)^{n/ν}` over every level up to `lambda_max`.
pub fn multiplicity_witness(op: &ModelOperator, lambda_max: f64) -> MultiplicityWitness {
    let e = op.n() as f64 / op.nu() as f64;
    let mut out = MultiplicityWitness { c: 0.0, argmax_lambda: 0.0, levels: 0 };
    for (lam, d) in level_stream(op, lambda_max) {
        let ratio = d as f64 / (1.0 + lam).powf(e);
        if ratio > out.c {
            out.c = ratio;
            out.argmax_lambda = lam;
        }
        out.levels += 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// Partial sums of `Σ d_j (1 + λ_j)^{-q}` grouped in dyadic blocks of `1 + λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostic {
    pub q: f64,
    pub lambda_max: f64,
    pub levels: u64,
    pub partial_sum: f64,
    /// Sums over complete blocks `1 + λ ∈ [2^i, 2^{i+1})`.
    pub blocks: Vec<f64>,
    /// Geometric mean of the last three block ratios.
    pub block_ratio: Option<f64>,
    /// `B ρ / (1 - ρ)` from the last complete block when `ρ < 1`.
    pub tail_estimate: Option<f64>,
    /// Blocks never shrink over the last three steps.
    pub monotone_divergence: bool,
    pub verdict: SeriesVerdict,
}

pub fn series_diagnostic(op: &ModelOperator, q: f64, lambda_max: f64) -> SeriesDiagnostic {
    let complete = if lambda_max >= 0.0 { (1.0 + lambda_max).log2().floor() as usize } else { 0 };
    let mut blocks = vec![KahanSum::default(); complete];
    let mut total = KahanSum::default();
    let mut levels = 0;
    for (lam, d) in level_stream(op, lambda_max) {
        let term = d as f64 * (1.0 + lam).powf(-q);
        total.add(term);
        let i = (1.0 + lam).log2().floor() as usize;
        if i < complete {
            blocks[i].add(term);
        }
        levels += 1;
    }
    let blocks: Vec<f64> = blocks.iter().map(KahanSum::value).collect();
    let ratios: Vec<f64> = blocks.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
    let last: Vec<f64> = ratios.iter().rev().take(3).copied().collect();
    let enough = last.len() == 3 && blocks.len() >= 6;
    let block_ratio = enough.then(|| (last.iter().map(|r| r.ln()).sum::<f64>() / 3.0).exp());
    let monotone_divergence = enough && last.iter().all(|&r| r >= 1.0);
    let converging = enough && last.iter().all(|&r| r < 1.0);
    let tail_estimate = match (converging, block_ratio) {
        (true, Some(rho)) => Some(blocks[blocks.len() - 1] * rho / (1.0 - rho)),
        _ => None,
    };
    let verdict = if converging {
        SeriesVerdict::Converges
    } else if monotone_divergence {
        SeriesVerdict::Diverges
    } else {
        SeriesVerdict::Inconclusive
    };
    SeriesDiagnostic {
        q,
        lambda_max,
        levels,
        partial_sum: total.value(),
        blocks,
        block_ratio,
        tail_estimate,
        monotone_divergence,
        verdict,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormCheck {
    /// `(n - 1) / (2ν)`.
    pub expected_exponent: f64,
    /// Least-squares slope of `log max |e|` against `log λ`.
    pub fitted_exponent: f64,
    /// `max_j sup |e_j| / λ_j^{(n-1)/(2ν)}`.
    pub c: f64,
    pub levels_checked: usize,
    pub ok: bool,
}

/// Samples every basis function of the first levels with `λ > 0` and checks
/// `‖e‖_∞ <= C λ^{(n-1)/(2ν)}` through the fitted log-log exponent.
pub fn sup_norm_check(op: &ModelOperator, lambda_max: f64) -> SupNormCheck {
    let expected = (op.n() as f64 - 1.0) / (2.0 * op.nu() as f64);
    let levels: Vec<_> =
        enumerate_levels(op, lambda_max).into_iter().filter(|l| l.lambda > 0.0).take(SUP_LEVELS).collect();
    let sups: Vec<f64> = match op.manifold {
        Manifold::Sphere2 => {
            let l_max = levels.iter().map(|l| l.j as u32).max().unwrap_or(0);
            let mut best = vec![0.0f64; l_max as usize + 1];
            let mut col = Vec::new();
            for i in 0..THETA_SAMPLES {
                let theta = std::f64::consts::PI * i as f64 / (THETA_SAMPLES - 1) as f64;
                for m in 0..=l_max {
                    // |Y_l^m| does not depend on longitude.
                    legendre_column(m, l_max, theta.cos(), &mut col);
                    for (k, v) in col.iter().enumerate() {
                        let l = m as usize + k;
                        best[l] = best[l].max(v.abs());
                    }
                }
            }
            levels.iter().map(|l| best[l.j]).collect()
        }
        Manifold::Circle => levels
            .iter()
            .map(|lv| {
                (0..lv.d)
                    .flat_map(|k| (0..64).map(move |i| (k, i)))
                    .map(|(k, i)| {
                        let x = Point::Circle(std::f64::consts::TAU * i as f64 / 64.0);
                        basis_eval(op, lv, k, x).map(|z| z.norm()).unwrap_or(0.0)
                    })
                    .fold(0.0, f64::max)
            })
            .collect(),
        Manifold::Torus2 => levels
            .iter()
            .map(|lv| {
                (0..lv.d)
                    .flat_map(|k| (0..16).flat_map(move |i| (0..16).map(move |j| (k, i, j))))
                    .map(|(k, i, j)| {
                        let t = std::f64::consts::TAU / 16.0;
                        basis_eval(op, lv, k, Point::Torus(t * i as f64, t * j as f64)).map(|z| z.norm()).unwrap_or(0.0)
                    })
                    .fold(0.0, f64::max)
            })
            .collect(),
    };
    let c = levels.iter().zip(&sups).map(|(l, s)| s / l.lambda.powf(expected)).fold(0.0, f64::max);
    let (x, y): (Vec<f64>, Vec<f64>) =
        levels.iter().zip(&sups).filter(|(l, _)| l.lambda >= 2.0).map(|(l, s)| (l.lambda.ln(), s.ln())).unzip();
    let fitted = if x.len() >= 2 { linear_fit(&x, &y).1 } else { f64::NAN };
    SupNormCheck {
        expected_exponent: expected,
        fitted_exponent: fitted,
        c,
        levels_checked: levels.len(),
        ok: c.is_finite() && fitted <= expected + 0.05,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub manifold: Manifold,
    pub lambda_max: f64,
    pub multiplicity: MultiplicityWitness,
    /// At `q = n/ν - 0.25`, `n/ν + 0.25`, `n/ν + 1`.
    pub series: Vec<SeriesDiagnostic>,
    pub sup_norm: SupNormCheck,
    pub warnings: Vec<String>,
}

pub fn weyl_checks(op: &ModelOperator, lambda_max: f64) -> WeylReport {
    let crit = op.n() as f64 / op.nu() as f64;
    let multiplicity = multiplicity_witness(op, lambda_max);
    let mut warnings = Vec::new();
    if multiplicity.levels < 20 {
        warnings.push(format!(
            "only {} levels up to lambda = {lambda_max}; convergence diagnostics need at least 20",
            multiplicity.levels
        ));
    }
    let series = [crit - 0.25, crit + 0.25, crit + 1.0].iter().map(|&q| series_diagnostic(op, q, lambda_max)).collect();
    WeylReport {
        manifold: op.manifold,
        lambda_max,
        multiplicity,
        series,
        sup_norm: sup_norm_check(op, lambda_max),
        warnings,
    }
}
