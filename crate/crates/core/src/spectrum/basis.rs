use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{Manifold, ModeLabel, ModelOperator, SpectrumLevel};
use super::SpectrumError;

/// A point on one of the model manifolds. Sphere points use colatitude
/// `theta ∈ [0, π]` and longitude `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Circle(f64),
    Torus(f64, f64),
    Sphere { theta: f64, phi: f64 },
}

/// Rescale threshold for the sectoral seed and the degree recurrence.
const BIG: f64 = 1e200;
const LOG_BIG: f64 = 460.517_018_598_809_1;

/// `P̄_l^m(x)` for `l = m..=l_max` and `x = cos θ`, normalized so that
/// `P̄_l^m(cos θ) e^{imφ}` has unit `L²` norm on the sphere, with the
/// Condon-Shortley phase. `m >= 0`.
///
/// The sectoral seed `P̄_m^m ∝ sin^m θ` is carried as a log-magnitude and
/// the degree recurrence runs on a scaled value, so high orders near the
/// poles neither underflow nor lose the tail where the function recovers.
pub fn legendre_column(m: u32, l_max: u32, x: f64, out: &mut Vec<f64>) {
    out.clear();
    if m > l_max {
        return;
    }
    let sin_t = (1.0 - x * x).max(0.0).sqrt();
    // log |P̄_m^m| = log(1/sqrt(4π)) + Σ_{i<=m} ½ log((2i+1)/(2i)) + m log sin θ
    let mut log_seed = -0.5 * (4.0 * PI).ln();
    for i in 1..=m {
        let i = i as f64;
        log_seed += 0.5 * ((2.0 * i + 1.0) / (2.0 * i)).ln();
    }
    if m > 0 {
        if sin_t == 0.0 {
            out.resize((l_max - m + 1) as usize, 0.0);
            return;
        }
        log_seed += m as f64 * sin_t.ln();
    }
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    // Values are p * exp(scale).
    let mut scale = log_seed;
    let mut p_prev = 0.0;
    let mut p = sign;
    out.push(emit(p, scale));
    let mf = m as f64;
    for l in m + 1..=l_max {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let next = if l == m + 1 {
            (2.0 * mf + 3.0).sqrt() * x * p
        } else {
            let lp = lf - 1.0;
            let a_prev = ((4.0 * lp * lp - 1.0) / (lp * lp - mf * mf)).sqrt();
            a * (x * p - p_prev / a_prev)
        };
        p_prev = p;
        p = next;
        if p.abs() > BIG {
            p /= BIG;
            p_prev /= BIG;
            scale += LOG_BIG;
        }
        out.push(emit(p, scale));
    }
}

fn emit(p: f64, scale: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let log = p.abs().ln() + scale;
    if log < -745.0 {
        0.0
    } else {
        p.signum() * log.exp()
    }
}

/// Single normalized associated Legendre value `P̄_l^m(x)`, `|m| <= l`.
pub fn legendre_normalized(l: u32, m: i32, x: f64) -> f64 {
    let ma = m.unsigned_abs();
    if ma > l {
        return 0.0;
    }
    let mut col = Vec::with_capacity((l - ma + 1) as usize);
    legendre_column(ma, l, x, &mut col);
    let v = col[(l - ma) as usize];
    // Y_l^{-m} = (-1)^m conj(Y_l^m)
    if m < 0 && ma % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `e_j^k(x)` for the fixed orthonormal convention of each model.
pub fn basis_eval(
    op: &ModelOperator,
    level: &SpectrumLevel,
    mode_index: usize,
    x: Point,
) -> Result<Complex64, SpectrumError> {
    let label = *level
        .labels
        .get(mode_index)
        .ok_or(SpectrumError::ModeIndex { index: mode_index, d: level.d })?;
    match (op.manifold, label, x) {
        (Manifold::Circle, ModeLabel::Circle(k), Point::Circle(t)) => {
            Ok(Complex64::from_polar((2.0 * PI).powf(-0.5), k as f64 * t))
        }
        (Manifold::Torus2, ModeLabel::Torus(a, b), Point::Torus(s, t)) => {
            Ok(Complex64::from_polar(1.0 / (2.0 * PI), a as f64 * s + b as f64 * t))
        }
        (Manifold::Sphere2, ModeLabel::Sphere { l, m }, Point::Sphere { theta, phi }) => {
            let p = legendre_normalized(l, m, theta.cos());
            Ok(Complex64::from_polar(1.0, m as f64 * phi) * p)
        }
        (m, _, _) => Err(SpectrumError::PointMismatch(m.name())),
    }
}
