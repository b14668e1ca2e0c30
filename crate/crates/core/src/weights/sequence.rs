use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::WeightsError;

/// Entries of the exactly summed `log k!` table. Beyond it the Stirling
/// series is accurate to the last bit.
const LOG_FACT_TABLE: usize = 1 << 16;

fn log_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LOG_FACT_TABLE);
        // Neumaier-compensated running sum of log i.
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        table.push(0.0);
        for i in 1..LOG_FACT_TABLE {
            let term = (i as f64).ln();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        table
    })
}

/// `log(k!)`, summed from logs for small `k` and by the Stirling series above.
pub fn log_factorial(k: u64) -> f64 {
    let table = log_fact_table();
    if (k as usize) < table.len() {
        return table[k as usize];
    }
    let x = k as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// How a weight sequence is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightKind {
    /// `M_k = (k!)^s`, `s >= 1`.
    Gevrey(f64),
    /// `M_k = k!`, the analytic class.
    Factorial,
    /// Finite table of `M_k` in linear scale, starting with `M_0 = 1`.
    Custom(Vec<f64>),
    /// Finite table of `log M_k`, starting with `log M_0 = 0`.
    CustomLog(Vec<f64>),
}

/// Witness constants for (M.1)/(M.2) on a finite range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionCertificate {
    pub a: f64,
    pub h: f64,
    pub k_max_checked: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Generator {
    Gevrey(f64),
    /// Log-convex continuation past the last table entry:
    /// `M_{k+1} = M_k (M_k / M_{k-1}) (k+1)/k`.
    Table { last: usize, log_last: f64, step_last: f64 },
}

/// A Komatsu weight sequence `{M_k}` stored as `log M_k`.
///
/// The materialized prefix can be grown with [`WeightSequence::ensure`];
/// [`WeightSequence::log_m`] evaluates any index without mutation, so a
/// sequence can be shared across threads once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    kind: WeightKind,
    nu: u32,
    table: Vec<f64>,
    generator: Generator,
    log_convex: bool,
    certificate: Option<ConditionCertificate>,
}

/// Builds a weight sequence satisfying (M.0).
pub fn make_weights(kind: WeightKind, nu: u32) -> Result<WeightSequence, WeightsError> {
    if nu == 0 {
        return Err(WeightsError::ZeroNu);
    }
    match kind {
        WeightKind::Gevrey(s) => gevrey(s, nu, WeightKind::Gevrey(s)),
        WeightKind::Factorial => gevrey(1.0, nu, WeightKind::Factorial),
        WeightKind::Custom(values) => {
            if values.is_empty() {
                return Err(WeightsError::TableTooShort);
            }
            if values[0] != 1.0 {
                return Err(WeightsError::M0NotOne(values[0]));
            }
            let mut logs = Vec::with_capacity(values.len());
            for (index, &value) in values.iter().enumerate() {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(WeightsError::NonPositive { index, value });
                }
                logs.push(value.ln());
            }
            from_log_table(logs, nu, WeightKind::Custom(values))
        }
        WeightKind::CustomLog(logs) => {
            if logs.is_empty() {
                return Err(WeightsError::TableTooShort);
            }
            if logs[0] != 0.0 {
                return Err(WeightsError::M0NotOne(logs[0].exp()));
            }
            for (index, &value) in logs.iter().enumerate() {
                if !value.is_finite() {
                    return Err(WeightsError::NonPositive { index, value: value.exp() });
                }
            }
            from_log_table(logs.clone(), nu, WeightKind::CustomLog(logs))
        }
    }
}

fn gevrey(s: f64, nu: u32, kind: WeightKind) -> Result<WeightSequence, WeightsError> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(WeightsError::GevreyOrder(s));
    }
    let mut w = WeightSequence {
        kind,
        nu,
        table: vec![0.0],
        generator: Generator::Gevrey(s),
        log_convex: true,
        certificate: None,
    };
    w.ensure(64);
    Ok(w)
}

fn from_log_table(logs: Vec<f64>, nu: u32, kind: WeightKind) -> Result<WeightSequence, WeightsError> {
    if logs.len() < 2 {
        return Err(WeightsError::TableTooShort);
    }
    let last = logs.len() - 1;
    let generator = Generator::Table {
        last,
        log_last: logs[last],
        step_last: logs[last] - logs[last - 1],
    };
    let log_convex = first_convexity_violation(&logs).is_none();
    Ok(WeightSequence {
        kind,
        nu,
        table: logs,
        generator,
        log_convex,
        certificate: None,
    })
}

/// First `k` with `M_k^2 > M_{k-1} M_{k+1}` (beyond rounding).
pub(crate) fn first_convexity_violation(logs: &[f64]) -> Option<usize> {
    (1..logs.len().saturating_sub(1)).find(|&k| {
        let lhs = 2.0 * logs[k];
        let rhs = logs[k - 1] + logs[k + 1];
        lhs - rhs > 1e-12 * (1.0 + lhs.abs())
    })
}

impl WeightSequence {
    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// Gevrey order when the sequence is `(k!)^s`.
    pub fn gevrey_order(&self) -> Option<f64> {
        match self.generator {
            Generator::Gevrey(s) => Some(s),
            Generator::Table { .. } => None,
        }
    }

    pub fn is_log_convex(&self) -> bool {
        self.log_convex
    }

    pub fn certificate(&self) -> Option<&ConditionCertificate> {
        self.certificate.as_ref()
    }

    pub(crate) fn set_certificate(&mut self, cert: Option<ConditionCertificate>) {
        self.certificate = cert;
    }

    /// Number of materialized entries.
    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    /// Materialized `log M_k` entries.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Number of entries that came from the user (custom tables only).
    pub fn defined_len(&self) -> Option<usize> {
        match self.generator {
            Generator::Gevrey(_) => None,
            Generator::Table { last, .. } => Some(last + 1),
        }
    }

    /// Materializes the table through index `k_max`.
    pub fn ensure(&mut self, k_max: usize) {
        while self.table.len() <= k_max {
            let k = self.table.len() as u64;
            let v = self.generate(k);
            self.table.push(v);
        }
    }

    /// `log M_k` for any `k`.
    pub fn log_m(&self, k: u64) -> f64 {
        match self.table.get(k as usize) {
            Some(&v) if (k as usize) < self.table.len() => v,
            _ => self.generate(k),
        }
    }

    fn generate(&self, k: u64) -> f64 {
        match self.generator {
            Generator::Gevrey(s) => s * log_factorial(k),
            Generator::Table { last, log_last, step_last } => {
                if (k as usize) <= last {
                    return self.table[k as usize];
                }
                let last = last as u64;
                let dk = (k - last) as f64;
                log_last + dk * (step_last - (last as f64).ln()) + (log_factorial(k) - log_factorial(last))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_log_values() {
        let w = make_weights(WeightKind::Factorial, 2).unwrap();
        assert_eq!(w.log_m(0), 0.0);
        assert!((w.log_m(3) - 6.0_f64.ln()).abs() < 1e-15);
        assert!((w.log_m(3) - 1.7918).abs() < 1e-4);
    }

    #[test]
    fn gevrey_two_squares_factorial() {
        let w = make_weights(WeightKind::Gevrey(2.0), 2).unwrap();
        assert!((w.log_m(2).exp() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn custom_tables_validate_m0() {
        assert!(make_weights(WeightKind::Custom(vec![1.0, 1.0, 3.0]), 1).is_ok());
        assert_eq!(
            make_weights(WeightKind::Custom(vec![2.0, 1.0, 3.0]), 1).unwrap_err(),
            WeightsError::M0NotOne(2.0)
        );
        assert!(matches!(
            make_weights(WeightKind::Custom(vec![1.0, 0.0]), 1),
            Err(WeightsError::NonPositive { index: 1, .. })
        ));
        assert!(make_weights(WeightKind::Gevrey(0.5), 2).is_err());
        assert!(make_weights(WeightKind::Factorial, 0).is_err());
    }

    #[test]
    fn stirling_branch_matches_summed_table() {
        // Sum the logs straight past the table edge and compare.
        let edge = (LOG_FACT_TABLE - 1) as u64;
        let mut direct = log_factorial(edge);
        for k in edge + 1..edge + 2000 {
            direct += (k as f64).ln();
            let rel = (log_factorial(k) - direct).abs() / direct;
            assert!(rel < 1e-14, "k = {k}: rel {rel}");
        }
    }

    #[test]
    fn summed_table_matches_pairwise_oracle() {
        // Pairwise summation keeps the oracle error near one ulp.
        fn pairwise(lo: u64, hi: u64) -> f64 {
            if hi - lo < 16 {
                return (lo..hi).map(|i| (i as f64).ln()).sum();
            }
            let mid = lo + (hi - lo) / 2;
            pairwise(lo, mid) + pairwise(mid, hi)
        }
        for k in [2u64, 10, 100, 1000, 5000, 40_000, 65_535] {
            let rel = (log_factorial(k) - pairwise(1, k + 1)).abs() / pairwise(1, k + 1);
            assert!(rel < 1e-15, "k = {k}: rel {rel}");
        }
    }

    #[test]
    fn continuation_keeps_last_ratio_rule() {
        let w = make_weights(WeightKind::Custom(vec![1.0, 1.0, 3.0]), 1).unwrap();
        // M_3 = M_2 * (M_2 / M_1) * 3/2 = 3 * 3 * 1.5
        assert!((w.log_m(3).exp() - 13.5).abs() < 1e-10);
        // M_4 = M_3 * (M_3 / M_2) * 4/3
        assert!((w.log_m(4).exp() - 13.5 * 4.5 * 4.0 / 3.0).abs() < 1e-9);
        assert_eq!(w.defined_len(), Some(3));
    }

    #[test]
    fn ensure_materializes_identical_values() {
        let mut w = make_weights(WeightKind::Gevrey(1.5), 2).unwrap();
        let lazy: Vec<f64> = (0..300).map(|k| w.log_m(k)).collect();
        w.ensure(299);
        assert!(w.table_len() >= 300);
        for (k, v) in lazy.iter().enumerate() {
            assert_eq!(w.log_m(k as u64), *v);
        }
    }
}
