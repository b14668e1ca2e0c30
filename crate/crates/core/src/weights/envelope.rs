use super::sequence::{make_weights, WeightKind, WeightSequence};

/// Lower convex envelope of `(k, values[k])`, evaluated at every integer `k`.
///
/// Andrew's monotone chain on points that are already sorted by `k`.
/// Interpolated values are clamped to the input so the result stays a
/// minorant even when rounding puts a collinear point a hair below its chord.
pub(crate) fn lower_envelope(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n <= 2 {
        return values.to_vec();
    }
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b unless a -> b -> i turns strictly left.
            let cross = (b - a) as f64 * (values[i] - values[a]) - (i - a) as f64 * (values[b] - values[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (values[b] - values[a]) / (b - a) as f64;
        for k in a..b {
            let v = if k == a { values[a] } else { values[a] + slope * (k - a) as f64 };
            out.push(v.min(values[k]));
        }
    }
    out.push(values[n - 1]);
    out
}

/// Largest log-convex minorant of `{M_k}` on `0..=k_max`.
///
/// The result is a custom table continued past `k_max` by the usual
/// last-ratio rule. Gevrey sequences are already log-convex and come back
/// unchanged.
pub fn log_convex_regularize(w: &WeightSequence, k_max: usize) -> WeightSequence {
    if w.gevrey_order().is_some() {
        return w.clone();
    }
    let k_max = k_max.max(1);
    let values: Vec<f64> = (0..=k_max as u64).map(|k| w.log_m(k)).collect();
    let env = lower_envelope(&values);
    make_weights(WeightKind::CustomLog(env), w.nu()).expect("envelope keeps log M_0 = 0 and finite values")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force envelope: the minimum over all chords through k.
    fn chord_oracle(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|k| {
                let mut best = v[k];
                for i in 0..=k {
                    for j in k..n {
                        if i < j {
                            let t = (k - i) as f64 / (j - i) as f64;
                            best = best.min(v[i] + t * (v[j] - v[i]));
                        }
                    }
                }
                best
            })
            .collect()
    }

    fn custom(logs: Vec<f64>) -> WeightSequence {
        make_weights(WeightKind::CustomLog(logs), 1).unwrap()
    }

    #[test]
    fn small_tables_match_oracle() {
        let out = log_convex_regularize(&custom(vec![0.0, 2.0, 2.0, 6.0]), 3);
        assert_eq!(chord_oracle(&[0.0, 2.0, 2.0, 6.0]), vec![0.0, 1.0, 2.0, 6.0]);
        assert_eq!(&out.table()[..4], &[0.0, 1.0, 2.0, 6.0]);

        let out = log_convex_regularize(&custom(vec![0.0, 5.0, 6.0]), 2);
        assert_eq!(&out.table()[..3], &[0.0, 3.0, 6.0]);
    }

    #[test]
    fn gevrey_is_untouched() {
        let w = make_weights(WeightKind::Gevrey(2.0), 2).unwrap();
        let out = log_convex_regularize(&w, 40);
        for k in 0..=40 {
            assert_eq!(out.log_m(k), w.log_m(k));
        }
    }

    #[test]
    fn convex_custom_table_is_fixed_point() {
        let logs: Vec<f64> = (0..30).map(|k| 0.5 * (k as f64).powi(2)).collect();
        let out = log_convex_regularize(&custom(logs.clone()), 29);
        assert_eq!(out.table(), &logs[..]);
    }

    proptest! {
        #[test]
        fn envelope_matches_chord_oracle(tail in prop::collection::vec(-20.0f64..20.0, 1..24)) {
            let mut v = vec![0.0];
            v.extend(tail);
            let env = lower_envelope(&v);
            let oracle = chord_oracle(&v);
            for (a, b) in env.iter().zip(&oracle) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn regularize_is_idempotent_minorant(tail in prop::collection::vec(-10.0f64..30.0, 2..40)) {
            let mut v = vec![0.0];
            v.extend(tail);
            let k_max = v.len() - 1;
            let w = custom(v.clone());
            let once = log_convex_regularize(&w, k_max);
            let twice = log_convex_regularize(&once, k_max);
            prop_assert!(once.is_log_convex());
            prop_assert_eq!(once.log_m(0), 0.0);
            for k in 0..=k_max {
                prop_assert!(once.table()[k] <= v[k]);
                let (a, b) = (once.table()[k], twice.table()[k]);
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
