use serde::{Deserialize, Serialize};

use super::levels::{assoc_values, grid_scan, usable_levels, Usable};
use super::{ClassifyError, ClassifyOptions};
use crate::stats::{linear_fit, pairwise_sum};
use crate::transform::SpectralVector;
use crate::weights::{AssociatedFunction, WeightSequence};

/// Fewest usable levels any fit accepts.
pub const MIN_USABLE_LEVELS: usize = 12;
/// Floor on the residual sum of squares inside the information criterion.
const RSS_FLOOR: f64 = 1e-24;
/// Extra information-criterion charge on the stretched-exponential model.
const STRETCHED_PENALTY: f64 = 4.0;
const COARSE_G_POINTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitModel {
    /// `log h ≈ log C - p log(1 + λ)`.
    Polynomial { p: f64 },
    /// `log h ≈ log C - L λ^{g/ν}`; `L < 0` is stretched growth.
    Exponential {
        l: f64,
        g: f64,
        g_sigma: Option<f64>,
        /// The optimum sits on the lower end of the `g` range.
        at_lower_bound: bool,
    },
    /// `log h <= log C - M(L λ^{1/ν})` on the dyadic grid.
    Associated { l: f64, bounded: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: FitModel,
    pub log_c: f64,
    /// RMS residual in log space.
    pub residual: f64,
    /// Akaike-style score, lower is better (penalty included).
    pub aic: f64,
    /// First and last level index used.
    pub levels_used: [usize; 2],
    pub n_levels: usize,
}

impl DecayFit {
    pub fn c(&self) -> f64 {
        self.log_c.exp()
    }
}

fn aic(n: usize, rss: f64, k: usize) -> f64 {
    n as f64 * (rss.max(RSS_FLOOR) / n as f64).ln() + 2.0 * k as f64
}

pub(crate) fn checked_usable(v: &SpectralVector, opts: &ClassifyOptions) -> Result<Usable, ClassifyError> {
    if v.is_zero() {
        return Err(ClassifyError::ExactZero);
    }
    let u = usable_levels(v, opts.floor);
    if u.len() < MIN_USABLE_LEVELS {
        return Err(ClassifyError::TooFewLevels { usable: u.len(), needed: MIN_USABLE_LEVELS });
    }
    Ok(u)
}

/// Polynomial, stretched-exponential and (with `weights`) associated-function
/// fits of the level norms, in that order.
pub fn fit_decay(
    v: &SpectralVector,
    weights: Option<&WeightSequence>,
    opts: &ClassifyOptions,
) -> Result<Vec<DecayFit>, ClassifyError> {
    let u = checked_usable(v, opts)?;
    let nu = v.op().nu() as f64;
    let mut fits = vec![polynomial_fit(&u), stretched_fit(&u, nu, opts)];
    if let Some(w) = weights {
        fits.push(associated_fit(&u, w, opts)?);
    }
    Ok(fits)
}

fn span(u: &Usable) -> [usize; 2] {
    [u.j[0], *u.j.last().expect("non-empty")]
}

fn polynomial_fit(u: &Usable) -> DecayFit {
    let x: Vec<f64> = u.lambda.iter().map(|l| l.ln_1p()).collect();
    let (a, b, rms) = linear_fit(&x, &u.log_h);
    let n = u.len();
    DecayFit {
        model: FitModel::Polynomial { p: -b },
        log_c: a,
        residual: rms,
        aic: aic(n, rms * rms * n as f64, 2),
        levels_used: span(u),
        n_levels: n,
    }
}

/// Inner least squares at fixed `g`: `(log C, L, RSS)`.
fn stretched_at(u: &Usable, nu: f64, g: f64) -> (f64, f64, f64) {
    let x: Vec<f64> = u.lambda.iter().map(|l| l.powf(g / nu)).collect();
    let (a, b, rms) = linear_fit(&x, &u.log_h);
    (a, -b, rms * rms * u.len() as f64)
}

fn stretched_fit(u: &Usable, nu: f64, opts: &ClassifyOptions) -> DecayFit {
    let (lo, hi) = opts.g_range;
    let rss = |g: f64| stretched_at(u, nu, g).2;
    let step = (hi - lo) / (COARSE_G_POINTS - 1) as f64;
    let coarse: Vec<f64> = (0..COARSE_G_POINTS).map(|i| rss(lo + step * i as f64)).collect();
    let best = (0..COARSE_G_POINTS).min_by(|&a, &b| coarse[a].total_cmp(&coarse[b])).expect("non-empty");
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = (lo + step * (best + 1) as f64).min(hi);
    // Golden-section refinement inside the bracket around the coarse optimum.
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (rss(c), rss(d));
    for _ in 0..80 {
        if b - a < 1e-12 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = rss(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = rss(d);
        }
    }
    let mut g = 0.5 * (a + b);
    for edge in [lo, hi] {
        if rss(edge) <= rss(g) {
            g = edge;
        }
    }
    let (log_c, l, rss_min) = stretched_at(u, nu, g);
    let n = u.len();
    DecayFit {
        model: FitModel::Exponential {
            l,
            g,
            g_sigma: g_sigma(&rss, g, rss_min, n, (lo, hi)),
            at_lower_bound: g - lo < 1e-6,
        },
        log_c,
        residual: (rss_min / n as f64).sqrt(),
        aic: aic(n, rss_min, 3) + STRETCHED_PENALTY,
        levels_used: span(u),
        n_levels: n,
    }
}

/// `σ_g = sqrt(2 σ² / RSS''(g))` with `σ² = RSS / (n - 3)`.
fn g_sigma(rss: &dyn Fn(f64) -> f64, g: f64, rss_min: f64, n: usize, range: (f64, f64)) -> Option<f64> {
    if n <= 3 {
        return None;
    }
    let h = 1e-4;
    let centre = g.clamp(range.0 + h, range.1 - h);
    let curv = (rss(centre + h) - 2.0 * rss(centre) + rss(centre - h)) / (h * h);
    if !(curv > 0.0) {
        return None;
    }
    Some((2.0 * rss_min / (n - 3) as f64 / curv).sqrt())
}

fn associated_fit(u: &Usable, w: &WeightSequence, opts: &ClassifyOptions) -> Result<DecayFit, ClassifyError> {
    let af = AssociatedFunction::new(w);
    let grid = grid_scan(&af, &u.lambda, &u.log_h, 1.0, opts)?;
    let n = u.len();
    let residual_for = |l: f64, centred: bool| -> Result<(f64, f64), ClassifyError> {
        let m = assoc_values(&af, l, &u.lambda)?;
        let q: Vec<f64> = u.log_h.iter().zip(&m).map(|(y, mi)| y + mi).collect();
        let log_c = if centred {
            pairwise_sum(&q) / n as f64
        } else {
            q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        };
        let sq: Vec<f64> = q.iter().map(|qi| (qi - log_c).powi(2)).collect();
        Ok((log_c, (pairwise_sum(&sq) / n as f64).sqrt()))
    };
    let (l, bounded, log_c, residual) = match grid.iter().rev().find(|p| p.stable) {
        Some(p) => {
            let (log_c, r) = residual_for(p.l, false)?;
            (p.l, true, log_c, r)
        }
        None => {
            let mut best = (grid[0].l, f64::NAN, f64::INFINITY);
            for p in &grid {
                let (log_c, r) = residual_for(p.l, true)?;
                if r < best.2 {
                    best = (p.l, log_c, r);
                }
            }
            (best.0, false, best.1, best.2)
        }
    };
    Ok(DecayFit {
        model: FitModel::Associated { l, bounded },
        log_c,
        residual,
        aic: aic(n, residual * residual * n as f64, 2),
        levels_used: span(u),
        n_levels: n,
    })
}

/// Whether the stretched model beats the polynomial one on the penalized
/// score.
pub(crate) fn stretched_wins(fits: &[DecayFit]) -> bool {
    fits[1].aic < fits[0].aic
}

/// Gevrey order `s = 1/g` from the stretched-exponential fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyEstimate {
    pub s: f64,
    pub s_sigma: Option<f64>,
    pub g: f64,
    pub l: f64,
    /// `|s - 1| <= tol` or `s < 1`.
    pub analytic: bool,
    /// `s < 1 - tol`: faster than any analytic profile.
    pub super_analytic: bool,
    /// `g` hit the lower end of its range; only smoothness is supported.
    pub at_lower_bound: bool,
}

/// Gevrey order of a decaying vector; errors when the polynomial model wins
/// or the fitted profile grows.
pub fn gevrey_order(v: &SpectralVector, opts: &ClassifyOptions) -> Result<GevreyEstimate, ClassifyError> {
    let fits = fit_decay(v, None, opts)?;
    gevrey_from_fits(&fits, opts)
}

pub(crate) fn gevrey_from_fits(fits: &[DecayFit], opts: &ClassifyOptions) -> Result<GevreyEstimate, ClassifyError> {
    if !stretched_wins(fits) {
        return Err(ClassifyError::InconsistentModel("polynomial decay fits better than any stretched exponential".into()));
    }
    let FitModel::Exponential { l, g, g_sigma, at_lower_bound } = fits[1].model else {
        unreachable!("second fit is the stretched model")
    };
    if l <= 0.0 {
        return Err(ClassifyError::InconsistentModel(format!("profile grows (L = {l:.4})")));
    }
    let s = 1.0 / g;
    Ok(GevreyEstimate {
        s,
        s_sigma: g_sigma.map(|sg| sg / (g * g)),
        g,
        l,
        analytic: (s - 1.0).abs() <= opts.analytic_tol || s < 1.0,
        super_analytic: s < 1.0 - opts.analytic_tol,
        at_lower_bound,
    })
}
