use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::SynthError;
use crate::spectrum::{legendre_column, Manifold, ModelOperator, Point};
use crate::transform::{Grid, SampledFunction, SpectralVector};

/// `(1 - r²) / (1 - 2r cos x + r²)`.
pub fn poisson_value(r: f64, x: f64) -> f64 {
    (1.0 - r * r) / (1.0 - 2.0 * r * x.cos() + r * r)
}

/// Poisson kernel on the circle sampled at `N = 4 j_max` points, with its
/// exact coefficients `√(2π) r^{|k|}` for levels `0..=j_max`.
pub fn poisson_kernel(r: f64, j_max: usize) -> Result<(SampledFunction, SpectralVector), SynthError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(SynthError::Parameter(format!("Poisson radius must lie in (0, 1), got {r}")));
    }
    let n = (4 * j_max).max(4);
    let samples = SampledFunction::from_fn(Grid::Circle { n }, |p| match p {
        Point::Circle(x) => Complex64::new(poisson_value(r, x), 0.0),
        _ => unreachable!(),
    });
    let op = ModelOperator::circle();
    let mut v = SpectralVector::zeros(&op, j_max);
    let root = TAU.sqrt();
    for (j, b) in v.blocks_mut().iter_mut().enumerate() {
        for c in &mut b.coeffs {
            *c = Complex64::new(root, 0.0);
        }
        b.log_offset = j as f64 * r.ln();
    }
    Ok((samples, v))
}

/// Coefficients of the point evaluation at `x0`: `û(j, k) = conj(e_j^k(x0))`.
pub fn delta_at(op: &ModelOperator, x0: Point, j_max: usize) -> Result<SpectralVector, SynthError> {
    let mut v = SpectralVector::zeros(op, j_max);
    match (op.manifold, x0) {
        (Manifold::Circle, Point::Circle(x)) => {
            let levels = v.levels().to_vec();
            for (lv, b) in levels.iter().zip(v.blocks_mut()) {
                for (c, label) in b.coeffs.iter_mut().zip(&lv.labels) {
                    let crate::spectrum::ModeLabel::Circle(k) = *label else { unreachable!() };
                    *c = Complex64::from_polar(TAU.powf(-0.5), -(k as f64) * x);
                }
            }
        }
        (Manifold::Torus2, Point::Torus(x, y)) => {
            let levels = v.levels().to_vec();
            for (lv, b) in levels.iter().zip(v.blocks_mut()) {
                for (c, label) in b.coeffs.iter_mut().zip(&lv.labels) {
                    let crate::spectrum::ModeLabel::Torus(a, bb) = *label else { unreachable!() };
                    *c = Complex64::from_polar(1.0 / TAU, -(a as f64 * x + bb as f64 * y));
                }
            }
        }
        (Manifold::Sphere2, Point::Sphere { theta, phi }) => {
            if !(0.0..=PI).contains(&theta) {
                return Err(SynthError::Parameter(format!("colatitude must lie in [0, π], got {theta}")));
            }
            let t = theta.cos();
            let l_max = j_max as u32;
            let mut col = Vec::new();
            for m in 0..=l_max {
                legendre_column(m, l_max, t, &mut col);
                for (off, p) in col.iter().enumerate() {
                    let l = (m + off as u32) as usize;
                    let b = &mut v.blocks_mut()[l];
                    // conj(P̄ e^{imφ}) for +m, and Y_l^{-m} = (-1)^m conj(Y_l^m) for -m.
                    b.coeffs[l + m as usize] = Complex64::from_polar(*p, -(m as f64) * phi);
                    if m > 0 {
                        let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
                        b.coeffs[l - m as usize] = Complex64::from_polar(sign * *p, m as f64 * phi);
                    }
                }
            }
        }
        _ => return Err(SynthError::Parameter(format!("point is not on the {} manifold", op.manifold))),
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::basis_eval;

    #[test]
    fn poisson_reference_values() {
        assert_eq!(poisson_value(0.5, 0.0), 3.0);
        let (s, v) = poisson_kernel(0.5, 16).unwrap();
        assert_eq!(s.values.len(), 64);
        assert!((v.coeff(0, 0).re - 2.506_628_274_631_000_5).abs() < 1e-15);
        assert!((v.coeff(10, 1).re - TAU.sqrt() / 1024.0).abs() < 1e-15);
        // r -> 0 flattens to the constant 1.
        let (flat, _) = poisson_kernel(1e-9, 4).unwrap();
        assert!(flat.values.iter().all(|z| (z.re - 1.0).abs() < 1e-8));
        assert!(poisson_kernel(1.0, 4).is_err());
    }

    #[test]
    fn delta_matches_basis_conjugates() {
        let x = Point::Sphere { theta: 0.7, phi: 1.9 };
        let op = ModelOperator::sphere();
        let v = delta_at(&op, x, 12).unwrap();
        for (j, lv) in v.levels().iter().enumerate() {
            for k in 0..lv.d {
                let want = basis_eval(&op, lv, k, x).unwrap().conj();
                assert!((v.coeff(j, k) - want).norm() < 1e-14, "l = {j} k = {k}");
            }
        }
        assert!((v.hs_norm(5) - (11.0 / (4.0 * PI)).sqrt()).abs() < 1e-13);
        assert!(((11.0 / (4.0 * PI)).sqrt() - 0.935_60).abs() < 1e-5);
    }

    #[test]
    fn circle_delta_norms() {
        let v = delta_at(&ModelOperator::circle(), Point::Circle(0.3), 8).unwrap();
        assert!((v.hs_norm(0) - TAU.powf(-0.5)).abs() < 1e-15);
        for j in 1..=8 {
            assert!((v.hs_norm(j) - 1.0 / PI.sqrt()).abs() < 1e-15);
        }
        assert!(delta_at(&ModelOperator::circle(), Point::Torus(0.0, 0.0), 3).is_err());
    }
}
