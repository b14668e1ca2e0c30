use serde::{Deserialize, Serialize};

use super::sequence::{first_convexity_violation, log_factorial, ConditionCertificate, WeightSequence};
use super::WeightsError;

/// Largest slack constant accepted for a dyadic `H`.
const A_CAP: f64 = 1e6;
const H_EXP_MIN: i32 = -16;
const H_EXP_MAX: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityWitness {
    pub a: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthWitness {
    pub l: f64,
    pub c_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub k_max_checked: usize,
    pub m0: bool,
    pub m1: Option<StabilityWitness>,
    pub m2: Option<StabilityWitness>,
    pub log_convex: bool,
    /// First `k` where `M_k^2 > M_{k-1} M_{k+1}`.
    pub log_convex_violation: Option<usize>,
    /// Smallest `l` in {1, 2, 4, 8} for which `k! / (l^k M_k)` stays bounded.
    pub growth: Option<GrowthWitness>,
}

impl ConditionReport {
    pub fn growth_ok(&self) -> bool {
        self.growth.is_some()
    }
}

/// Checks (M.0), (M.1), (M.2), log-convexity and the factorial growth
/// assumption for `k <= k_max`, and stores a certificate on `w` when both
/// stability conditions hold.
pub fn check_conditions(w: &mut WeightSequence, k_max: usize) -> Result<ConditionReport, WeightsError> {
    if k_max < 4 {
        return Err(WeightsError::KMaxTooSmall(k_max));
    }
    w.ensure(2 * k_max + 1);
    let logs = w.table();
    let m0 = logs[0] == 0.0;

    // log of the slack M_{k+1} / M_k without the H^k factor.
    let m1_gap: Vec<f64> = (0..=k_max).map(|k| logs[k + 1] - logs[k]).collect();
    let m2_gap: Vec<f64> = (0..=k_max).map(|k| logs[2 * k] - 2.0 * logs[k]).collect();
    let m1 = dyadic_witness(&m1_gap, 1.0);
    let m2 = dyadic_witness(&m2_gap, 2.0);

    let log_convex_violation = first_convexity_violation(&logs[..=k_max + 1]);
    let growth = growth_witness(logs, k_max);

    let report = ConditionReport {
        k_max_checked: k_max,
        m0,
        m1,
        m2,
        log_convex: log_convex_violation.is_none(),
        log_convex_violation,
        growth,
    };
    let cert = match (m0, m1, m2) {
        (true, Some(a), Some(b)) => Some(ConditionCertificate {
            a: a.a.max(b.a),
            h: a.h.max(b.h),
            k_max_checked: k_max,
        }),
        _ => None,
    };
    w.set_certificate(cert);
    Ok(report)
}

/// Smallest `H = 2^m` with `max_k (gap_k - power k m ln 2) <= ln A_CAP`.
fn dyadic_witness(gap: &[f64], power: f64) -> Option<StabilityWitness> {
    let cap = A_CAP.ln() + 1e-12;
    (H_EXP_MIN..=H_EXP_MAX).find_map(|m| {
        let log_h = m as f64 * std::f64::consts::LN_2;
        let log_a = gap
            .iter()
            .enumerate()
            .map(|(k, g)| g - power * k as f64 * log_h)
            .fold(f64::NEG_INFINITY, f64::max);
        (log_a <= cap).then(|| StabilityWitness {
            a: clean_exp(log_a),
            h: 2f64.powi(m),
        })
    })
}

/// `exp` that snaps values within rounding of 0 to exactly 1.
fn clean_exp(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        x.exp()
    }
}

/// `k! <= C_l l^k M_k`: accepted when the log ratio over the upper half of
/// the range never exceeds its maximum over the lower half.
fn growth_witness(logs: &[f64], k_max: usize) -> Option<GrowthWitness> {
    [1.0f64, 2.0, 4.0, 8.0].into_iter().find_map(|l| {
        let ratio: Vec<f64> = (0..=k_max)
            .map(|k| log_factorial(k as u64) - k as f64 * l.ln() - logs[k])
            .collect();
        let half = k_max / 2;
        let lower = ratio[..=half].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let upper = ratio[half..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (upper <= lower + 1e-9 * (1.0 + lower.abs())).then(|| GrowthWitness { l, c_l: lower.exp() })
    })
}

/// Direct check of `M_{2k} <= A H^{2k} M_k^2` for all `k <= k_max`.
pub fn validates_m2(w: &WeightSequence, a: f64, h: f64, k_max: usize) -> bool {
    (0..=k_max as u64).all(|k| {
        let lhs = w.log_m(2 * k);
        let rhs = a.ln() + 2.0 * k as f64 * h.ln() + 2.0 * w.log_m(k);
        lhs <= rhs + 1e-12 * (1.0 + rhs.abs())
    })
}

/// Direct check of `M_{k+1} <= A H^k M_k` for all `k <= k_max`.
pub fn validates_m1(w: &WeightSequence, a: f64, h: f64, k_max: usize) -> bool {
    (0..=k_max as u64).all(|k| {
        let lhs = w.log_m(k + 1);
        let rhs = a.ln() + k as f64 * h.ln() + w.log_m(k);
        lhs <= rhs + 1e-12 * (1.0 + rhs.abs())
    })
}
