use serde::{Deserialize, Serialize};

use super::sequence::{make_weights, WeightKind, WeightSequence};
use super::WeightsError;

/// Scan limit for sequences that are not log-convex.
pub const FORWARD_SCAN_K_MAX: u64 = 10_000;
/// Consecutive strict decreases that end a forward scan.
const STOP_RUN: u32 = 8;
/// Doubling limit for the concave search.
const GALLOP_LIMIT: u64 = 1 << 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssocEval {
    pub r: f64,
    pub value: f64,
    /// Smallest maximizing `k` in `sup_k (νk log r - log M_{νk})`.
    pub k_star: u64,
}

/// `M(r) = sup_k log(r^{νk} / M_{νk})` for one weight sequence.
///
/// Log-convex sequences make the terms concave in `k`, so the maximizer is
/// found by doubling and bisection on the sign of consecutive differences.
/// Other sequences use a forward scan that stops after a run of strict
/// decreases and gives up at [`FORWARD_SCAN_K_MAX`].
///
/// Evaluation is read-only; [`AssociatedFunction::tabulate`] fills a cache
/// ahead of shared use.
#[derive(Debug, Clone)]
pub struct AssociatedFunction {
    source: WeightSequence,
    nu: u32,
    cache: Vec<AssocEval>,
}

impl AssociatedFunction {
    pub fn new(source: &WeightSequence) -> Self {
        Self {
            nu: source.nu(),
            source: source.clone(),
            cache: Vec::new(),
        }
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn source(&self) -> &WeightSequence {
        &self.source
    }

    /// Term `νk log r - log M_{νk}`.
    pub fn term(&self, k: u64, log_r: f64) -> f64 {
        let nk = self.nu as u64 * k;
        nk as f64 * log_r - self.source.log_m(nk)
    }

    pub fn value(&self, r: f64) -> Result<f64, WeightsError> {
        self.eval(r).map(|e| e.value)
    }

    pub fn eval(&self, r: f64) -> Result<AssocEval, WeightsError> {
        if !(r >= 0.0) || r.is_infinite() {
            return Err(WeightsError::InvalidArgument(format!("associated function needs finite r >= 0, got {r}")));
        }
        if r == 0.0 {
            return Ok(AssocEval { r, value: 0.0, k_star: 0 });
        }
        if let Ok(i) = self.cache.binary_search_by(|e| e.r.total_cmp(&r)) {
            return Ok(self.cache[i]);
        }
        let log_r = r.ln();
        let k_star = if self.source.is_log_convex() {
            self.concave_argmax(r, log_r)?
        } else {
            self.scan_argmax(r, log_r)?
        };
        Ok(AssocEval { r, value: self.term(k_star, log_r), k_star })
    }

    /// Evaluates and caches every `r` in `grid`.
    pub fn tabulate(&mut self, grid: &[f64]) -> Result<(), WeightsError> {
        let fresh = grid.iter().map(|&r| self.eval(r)).collect::<Result<Vec<_>, _>>()?;
        self.cache.extend(fresh);
        self.cache.sort_by(|a, b| a.r.total_cmp(&b.r));
        self.cache.dedup_by(|a, b| a.r == b.r);
        Ok(())
    }

    pub fn cached(&self) -> &[AssocEval] {
        &self.cache
    }

    fn concave_argmax(&self, r: f64, log_r: f64) -> Result<u64, WeightsError> {
        let rises = |k: u64| self.term(k + 1, log_r) > self.term(k, log_r);
        if !rises(0) {
            return Ok(0);
        }
        let (mut lo, mut hi) = (0u64, 1u64);
        while rises(hi) {
            lo = hi;
            hi *= 2;
            if hi > GALLOP_LIMIT {
                return Err(WeightsError::GrowsTooSlowly { r, k: hi });
            }
        }
        // rises(lo) holds, rises(hi) fails.
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if rises(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    fn scan_argmax(&self, r: f64, log_r: f64) -> Result<u64, WeightsError> {
        let mut best = (0u64, self.term(0, log_r));
        let mut prev = best.1;
        let mut run = 0;
        for k in 1..=FORWARD_SCAN_K_MAX {
            let t = self.term(k, log_r);
            if t > best.1 {
                best = (k, t);
            }
            run = if t < prev { run + 1 } else { 0 };
            if run >= STOP_RUN {
                return Ok(best.0);
            }
            prev = t;
        }
        Err(WeightsError::GrowsTooSlowly { r, k: FORWARD_SCAN_K_MAX })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyBoundPoint {
    pub r: f64,
    pub m: f64,
    pub lower: f64,
    pub upper: f64,
    /// `log inf_{p >= 1} (νp)^{νps} r^{-νp}`; absent at `r = 0`.
    pub aux_log_inf: Option<f64>,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub aux_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyBoundsReport {
    pub s: f64,
    pub nu: u32,
    pub points: Vec<GevreyBoundPoint>,
}

impl GevreyBoundsReport {
    /// Grid points where `lower <= M(r) <= upper` fails.
    pub fn violations(&self) -> Vec<f64> {
        self.points.iter().filter(|p| !(p.lower_ok && p.upper_ok)).map(|p| p.r).collect()
    }

    /// Grid points where the auxiliary infimum bound fails.
    pub fn aux_violations(&self) -> Vec<f64> {
        self.points.iter().filter(|p| !p.aux_ok).map(|p| p.r).collect()
    }
}

/// Evaluates `(s/(4νe)) r^{1/s} <= M(r) <= s r^{1/s}` for Gevrey(s) weights
/// on every grid point, together with the auxiliary infimum bound.
pub fn gevrey_bounds_check(s: f64, nu: u32, r_grid: &[f64]) -> Result<GevreyBoundsReport, WeightsError> {
    let w = make_weights(WeightKind::Gevrey(s), nu)?;
    let af = AssociatedFunction::new(&w);
    let c = s / (4.0 * nu as f64 * std::f64::consts::E);
    let mut points = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let m = af.value(r)?;
        let root = r.powf(1.0 / s);
        let (lower, upper) = (c * root, s * root);
        let tol = |x: f64| 1e-12 * (1.0 + x.abs());
        let aux_log_inf = (r > 0.0).then(|| aux_log_inf(s, nu, r));
        let aux_ok = aux_log_inf.is_none_or(|v| v <= -lower + tol(lower));
        points.push(GevreyBoundPoint {
            r,
            m,
            lower,
            upper,
            aux_log_inf,
            lower_ok: m >= lower - tol(lower),
            upper_ok: m <= upper + tol(upper),
            aux_ok,
        });
    }
    Ok(GevreyBoundsReport { s, nu, points })
}

/// Brute-force `log inf_{1 <= p <= P} (νp)^{νps} r^{-νp}`, with `P` past the
/// stationary point `νp ≈ r^{1/s} / e`.
fn aux_log_inf(s: f64, nu: u32, r: f64) -> f64 {
    let nu_f = nu as f64;
    let p_max = (2.0 * r.powf(1.0 / s) / nu_f).ceil() as u64 + 16;
    let log_r = r.ln();
    (1..=p_max)
        .map(|p| {
            let np = nu_f * p as f64;
            np * s * np.ln() - np * log_r
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvSuppression {
    /// `max_i λ_i^q exp(-δ M(L λ_i^{1/ν}))`.
    pub sup: f64,
    pub argmax: usize,
    pub values: Vec<f64>,
    /// Maximum sits before the last level and the values after it do not rise.
    pub eventually_decreasing: bool,
}

/// `max` over `levels` of `λ^q exp(-δ M(L λ^{1/ν}))`.
pub fn ev_suppression_check(
    af: &AssociatedFunction,
    q: f64,
    l: f64,
    delta: f64,
    levels: &[f64],
) -> Result<EvSuppression, WeightsError> {
    if !(q >= 0.0 && l > 0.0 && delta > 0.0) {
        return Err(WeightsError::InvalidArgument(format!(
            "need q >= 0, L > 0, delta > 0 (got q = {q}, L = {l}, delta = {delta})"
        )));
    }
    if levels.is_empty() || levels.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(WeightsError::InvalidArgument("levels must be positive and finite".into()));
    }
    let inv_nu = 1.0 / af.nu() as f64;
    let ms = levels
        .iter()
        .map(|&lam| af.value(l * lam.powf(inv_nu)))
        .collect::<Result<Vec<_>, _>>()?;
    if q > 0.0 && ms.iter().all(|&m| m == 0.0) {
        return Err(WeightsError::InvalidArgument(
            "associated function vanishes on every level; the growth assumption fails here".into(),
        ));
    }
    let values: Vec<f64> = levels.iter().zip(&ms).map(|(&lam, &m)| (q * lam.ln() - delta * m).exp()).collect();
    let (argmax, sup) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let eventually_decreasing =
        argmax + 1 < values.len() && values[argmax..].windows(2).all(|w| w[1] <= w[0]) && values[values.len() - 1] < sup;
    Ok(EvSuppression { sup, argmax, values, eventually_decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent `log M_{νk}` for Gevrey(s): plain sum of logs.
    fn brute_log_m(s: f64, n: u64) -> f64 {
        s * (1..=n).map(|i| (i as f64).ln()).sum::<f64>()
    }

    fn brute_assoc(s: f64, nu: u32, r: f64, k_max: u64) -> f64 {
        (0..=k_max)
            .map(|k| (nu as u64 * k) as f64 * r.ln() - brute_log_m(s, nu as u64 * k))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn gevrey_af(s: f64, nu: u32) -> AssociatedFunction {
        AssociatedFunction::new(&make_weights(WeightKind::Gevrey(s), nu).unwrap())
    }

    #[test]
    fn factorial_small_values() {
        let af = gevrey_af(1.0, 1);
        assert_eq!(af.value(1.0).unwrap(), 0.0);
        assert_eq!(brute_assoc(1.0, 1, 1.0, 20), 0.0);
        let m2 = af.value(2.0).unwrap();
        assert!((m2 - 2f64.ln()).abs() < 1e-15);
        assert!((brute_assoc(1.0, 1, 2.0, 30) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(af.value(0.0).unwrap(), 0.0);
    }

    #[test]
    fn gevrey_two_at_ten_thousand_sits_inside_bounds() {
        let af = gevrey_af(2.0, 2);
        let m = af.value(1e4).unwrap();
        let lower = 2.0 / (8.0 * std::f64::consts::E) * 100.0;
        assert!((lower - 9.197).abs() < 1e-3);
        assert!(m >= lower && m <= 200.0, "M = {m}");
        assert!((m - brute_assoc(2.0, 2, 1e4, 200)).abs() < 1e-10);
    }

    #[test]
    fn concave_search_matches_scan_on_large_radii() {
        // Beyond the forward-scan limit only the concave search applies.
        let af = gevrey_af(1.0, 2);
        let e = af.eval(1e6).unwrap();
        assert!(e.k_star > FORWARD_SCAN_K_MAX);
        assert!(af.term(e.k_star, 1e6f64.ln()) >= af.term(e.k_star + 1, 1e6f64.ln()));
        assert!(af.term(e.k_star, 1e6f64.ln()) > af.term(e.k_star - 1, 1e6f64.ln()));
    }

    #[test]
    fn non_convex_table_uses_forward_scan() {
        let w = make_weights(WeightKind::CustomLog(vec![0.0, 2.0, 1.0, 4.0, 9.0]), 1).unwrap();
        assert!(!w.is_log_convex());
        let af = AssociatedFunction::new(&w);
        for r in [0.5, 1.5, 3.0, 20.0, 300.0] {
            let brute = (0..200u64).map(|k| k as f64 * f64::ln(r) - w.log_m(k)).fold(f64::NEG_INFINITY, f64::max);
            assert!((af.value(r).unwrap() - brute).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn flat_non_convex_table_grows_too_slowly() {
        let mut logs = vec![0.0; 20_001];
        logs[1] = -1.0;
        let af = AssociatedFunction::new(&make_weights(WeightKind::CustomLog(logs), 1).unwrap());
        assert!(matches!(af.eval(2.0), Err(WeightsError::GrowsTooSlowly { .. })));
    }

    #[test]
    fn cache_returns_identical_evaluations() {
        let mut af = gevrey_af(1.5, 2);
        let grid = [0.5, 3.0, 40.0, 500.0];
        let fresh: Vec<_> = grid.iter().map(|&r| af.eval(r).unwrap()).collect();
        af.tabulate(&grid).unwrap();
        assert_eq!(af.cached().len(), 4);
        for (r, e) in grid.iter().zip(fresh) {
            assert_eq!(af.eval(*r).unwrap(), e);
        }
    }

    #[test]
    fn suppression_peaks_inside_sphere_levels() {
        let af = gevrey_af(1.0, 2);
        let levels: Vec<f64> = (1..=200).map(|l| (l * (l + 1)) as f64).collect();
        let out = ev_suppression_check(&af, 1.0, 1.0, 1.0, &levels).unwrap();
        assert!(out.eventually_decreasing);
        assert!(out.argmax < 199);

        let flat = ev_suppression_check(&af, 0.0, 1.0, 1.0, &[0.25, 0.5]).unwrap();
        assert_eq!(flat.sup, 1.0);
        assert!(ev_suppression_check(&af, 1.0, 1.0, 0.0, &levels).is_err());
        assert!(ev_suppression_check(&af, 1.0, 1e-9, 1.0, &[0.25, 0.5]).is_err());
    }

    #[test]
    fn bounds_degenerate_at_zero() {
        let rep = gevrey_bounds_check(2.0, 2, &[0.0]).unwrap();
        let p = &rep.points[0];
        assert_eq!((p.m, p.lower, p.upper), (0.0, 0.0, 0.0));
        assert!(rep.violations().is_empty() && rep.aux_violations().is_empty());
    }

    #[test]
    fn bounds_hold_once_r_clears_the_flat_region() {
        // M vanishes for r <= 1 or so, where the lower bound is already positive.
        for s in [1.0, 1.5, 2.0, 3.0] {
            let grid: Vec<f64> = (0..60).map(|i| 10f64.powf(1.0 + 5.0 * i as f64 / 59.0)).collect();
            let rep = gevrey_bounds_check(s, 2, &grid).unwrap();
            assert!(rep.violations().is_empty(), "s = {s}: {:?}", rep.violations());
            assert!(rep.aux_violations().is_empty(), "s = {s}: {:?}", rep.aux_violations());
        }
        let rep = gevrey_bounds_check(1.0, 2, &[0.5]).unwrap();
        assert_eq!(rep.violations(), vec![0.5]);
    }

    proptest! {
        #[test]
        fn identity_against_brute_inf(s in 1.0f64..3.0, log_r in -2.0f64..4.0) {
            // The brute force shares the log-space table and scans every k,
            // so it checks the search and the sup/inf identity.
            let r = 10f64.powf(log_r);
            let w = make_weights(WeightKind::Gevrey(s), 2).unwrap();
            let af = AssociatedFunction::new(&w);
            let k_max = (r.powf(1.0 / s) as u64) + 20;
            let log_inf = (0..=k_max)
                .map(|k| w.log_m(2 * k) - (2 * k) as f64 * r.ln())
                .fold(f64::INFINITY, f64::min);
            let rel = (-af.value(r).unwrap() - log_inf).exp_m1().abs();
            prop_assert!(rel <= 1e-12, "rel = {}", rel);
        }

        #[test]
        fn monotone_value_and_argmax(s in 1.0f64..3.0, a in 0.0f64..1e5, b in 0.0f64..1e5) {
            let af = gevrey_af(s, 2);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (x, y) = (af.eval(lo).unwrap(), af.eval(hi).unwrap());
            prop_assert!(x.value >= 0.0);
            prop_assert!(x.value <= y.value);
            prop_assert!(x.k_star <= y.k_star);
        }
    }
}
