//! Small deterministic statistics helpers shared by the checks and fits.

/// Pairwise sum; order depends only on the slice length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Running sum with Neumaier compensation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let sxx: Vec<f64> = x.iter().map(|a| (a - mx) * (a - mx)).collect();
    let sxx = pairwise_sum(&sxx);
    let b = if sxx > 0.0 { pairwise_sum(&sxy) / sxx } else { 0.0 };
    let a = my - b * mx;
    let res: Vec<f64> = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).collect();
    (a, b, (pairwise_sum(&res) / n).sqrt())
}

/// Median of a copy of `xs` (mean of the middle pair for even length).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    let (_, &mut hi, _) = v.select_nth_unstable_by(n / 2, |a, b| a.total_cmp(b));
    if n % 2 == 1 {
        hi
    } else {
        let lo = v[..n / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

/// Point cap for [`theil_sen`]; longer inputs are thinned to evenly spaced
/// indices (first and last kept).
const THEIL_SEN_CAP: usize = 256;

/// Theil-Sen slope: median of pairwise slopes.
pub fn theil_sen(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let idx: Vec<usize> = if n > THEIL_SEN_CAP {
        (0..THEIL_SEN_CAP).map(|i| i * (n - 1) / (THEIL_SEN_CAP - 1)).collect()
    } else {
        (0..n).collect()
    };
    let (x, y): (Vec<f64>, Vec<f64>) = idx.iter().map(|&i| (x[i], y[i])).unzip();
    let mut slopes = Vec::with_capacity(x.len() * x.len().saturating_sub(1) / 2);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[j] - x[i];
            if dx != 0.0 {
                slopes.push((y[j] - y[i]) / dx);
            }
        }
    }
    if slopes.is_empty() {
        0.0
    } else {
        median(&slopes)
    }
}

/// Least squares `y ≈ c0 + c1 x + c2 x²`; returns `[c0, c1, c2]`.
///
/// Solved in the centred variable `x - mean(x)` by Cramer's rule, then
/// mapped back.
pub fn quadratic_fit(x: &[f64], y: &[f64]) -> [f64; 3] {
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let mut s = [0.0; 5];
    let mut t = [0.0; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let u = xi - mx;
        let mut p = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += p;
            if k < 3 {
                t[k] += p * yi;
            }
            p *= u;
        }
    }
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let d = det3(a);
    if d == 0.0 {
        return [f64::NAN; 3];
    }
    let mut b = [0.0; 3];
    for (col, bc) in b.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = t[row];
        }
        *bc = det3(m) / d;
    }
    // b0 + b1 (x - mx) + b2 (x - mx)^2
    [b[0] - b[1] * mx + b[2] * mx * mx, b[1] - 2.0 * b[2] * mx, b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (a, b, r) = linear_fit(&x, &y);
        assert!((a - 2.0).abs() < 1e-14 && (b + 0.5).abs() < 1e-14 && r < 1e-14);
        assert!((theil_sen(&x, &y) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn theil_sen_ignores_one_outlier() {
        let x: Vec<f64> = (0..11).map(f64::from).collect();
        let mut y: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        y[10] = 1e6;
        assert!((theil_sen(&x, &y) - 3.0).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0, 10.0]), 2.5);
    }

    #[test]
    fn quadratic_recovers_exact_parabola() {
        let x: Vec<f64> = (1..=12).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 - 2.0 * v + 0.03 * v * v).collect();
        let c = quadratic_fit(&x, &y);
        assert!((c[0] - 0.5).abs() < 1e-10 && (c[1] + 2.0).abs() < 1e-11 && (c[2] - 0.03).abs() < 1e-12);
    }

    #[test]
    fn thinned_theil_sen_keeps_exact_slope() {
        let x: Vec<f64> = (0..5000).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 7.0 - 0.25 * v).collect();
        assert!((theil_sen(&x, &y) + 0.25).abs() < 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = KahanSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }
}
