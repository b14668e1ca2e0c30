use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::grid::{Grid, SampledFunction};
use super::quadrature::gauss_legendre;
use super::vector::{Block, SpectralVector};
use super::TransformError;
use crate::spectrum::{legendre_column, levels_through, Manifold, ModeLabel, ModelOperator};
use crate::stats::pairwise_sum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_manifold(op: &ModelOperator, grid: &Grid) -> Result<(), TransformError> {
    if op.manifold != grid.manifold() {
        return Err(TransformError::ManifoldMismatch { grid: grid.manifold().name(), op: op.manifold.name() });
    }
    Ok(())
}

fn wrap(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Largest single frequency among the labels of levels `0..=j_max`.
fn max_frequency(levels: &[crate::spectrum::SpectrumLevel]) -> usize {
    levels
        .iter()
        .flat_map(|l| l.labels.iter())
        .map(|lab| match *lab {
            ModeLabel::Circle(k) => k.unsigned_abs() as usize,
            ModeLabel::Torus(a, b) => a.unsigned_abs().max(b.unsigned_abs()) as usize,
            ModeLabel::Sphere { l, .. } => l as usize,
        })
        .max()
        .unwrap_or(0)
}

fn fft_rows(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
}

fn fft_2d(data: &mut [Complex64], n: usize, inverse: bool) {
    fft_rows(data, n, inverse);
    let mut t = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = data[i * n + j];
        }
    }
    fft_rows(&mut t, n, inverse);
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = t[j * n + i];
        }
    }
}

/// Coefficients `f̂(j, k) = (f, e_j^k)` for levels `0..=j_max`.
///
/// Exact (up to rounding) for band-limited `f` when the grid resolves the
/// bandwidth: `N >= 2K + 1` on the circle and torus, `n_lat >= l_max + 1`
/// and `n_lon >= 2 l_max + 1` on the sphere.
pub fn forward(op: &ModelOperator, f: &SampledFunction, j_max: usize) -> Result<SpectralVector, TransformError> {
    check_manifold(op, &f.grid)?;
    if f.values.len() != f.grid.len() {
        return Err(TransformError::Mismatch(format!("{} samples for a grid of {}", f.values.len(), f.grid.len())));
    }
    let levels = levels_through(op, j_max);
    let kmax = max_frequency(&levels);
    let blocks: Vec<Block> = match f.grid {
        Grid::Circle { n } => {
            if n < 2 * kmax + 1 {
                return Err(TransformError::Bandwidth(format!("circle needs N >= {}, got {n}", 2 * kmax + 1)));
            }
            let mut data = f.values.clone();
            fft_rows(&mut data, n, false);
            let scale = TAU.sqrt() / n as f64;
            levels
                .iter()
                .map(|lv| block_from(lv.labels.iter().map(|lab| match *lab {
                    ModeLabel::Circle(k) => data[wrap(k, n)] * scale,
                    _ => unreachable!(),
                })))
                .collect()
        }
        Grid::Torus { n } => {
            if n < 2 * kmax + 1 {
                return Err(TransformError::Bandwidth(format!("torus needs N >= {}, got {n}", 2 * kmax + 1)));
            }
            let mut data = f.values.clone();
            fft_2d(&mut data, n, false);
            let scale = TAU / (n * n) as f64;
            levels
                .iter()
                .map(|lv| block_from(lv.labels.iter().map(|lab| match *lab {
                    ModeLabel::Torus(a, b) => data[wrap(a, n) * n + wrap(b, n)] * scale,
                    _ => unreachable!(),
                })))
                .collect()
        }
        Grid::Sphere { n_lat, n_lon } => {
            if n_lat < kmax + 1 || n_lon < 2 * kmax + 1 {
                return Err(TransformError::Bandwidth(format!(
                    "sphere with l_max = {kmax} needs n_lat >= {} and n_lon >= {}, got {n_lat} x {n_lon}",
                    kmax + 1,
                    2 * kmax + 1
                )));
            }
            sphere_forward(&f.values, n_lat, n_lon, j_max)
        }
    };
    SpectralVector::new(*op, levels, blocks)
}

fn block_from(it: impl Iterator<Item = Complex64>) -> Block {
    Block { coeffs: it.collect(), log_offset: 0.0 }
}

fn sphere_forward(values: &[Complex64], n_lat: usize, n_lon: usize, l_max: usize) -> Vec<Block> {
    let (t, w) = gauss_legendre(n_lat);
    let mut rings = values.to_vec();
    fft_rows(&mut rings, n_lon, false);
    let dphi = TAU / n_lon as f64;
    let l_max_i = l_max as i64;
    // Per m: coefficients for l = |m|..=l_max.
    let per_m: Vec<Vec<Complex64>> = (-l_max_i..=l_max_i)
        .into_par_iter()
        .map(|m| {
            let ma = m.unsigned_abs() as u32;
            let sign = if m < 0 && ma % 2 == 1 { -1.0 } else { 1.0 };
            let mut acc = vec![ZERO; l_max + 1 - ma as usize];
            let mut col = Vec::new();
            for i in 0..n_lat {
                legendre_column(ma, l_max as u32, t[i], &mut col);
                let g = rings[i * n_lon + wrap(m, n_lon)] * (dphi * w[i] * sign);
                for (a, p) in acc.iter_mut().zip(&col) {
                    *a += g * *p;
                }
            }
            acc
        })
        .collect();
    (0..=l_max)
        .map(|l| {
            block_from((-(l as i64)..=l as i64).map(|m| {
                let ma = m.unsigned_abs() as usize;
                per_m[(m + l_max_i) as usize][l - ma]
            }))
        })
        .collect()
}

/// Samples `Σ_j Σ_k f̂(j, k) e_j^k` on `grid`. Any grid size works; frequencies
/// above the grid's Nyquist limit are folded onto their grid aliases, which
/// is exact at the sample points.
pub fn inverse(v: &SpectralVector, grid: Grid) -> Result<SampledFunction, TransformError> {
    check_manifold(v.op(), &grid)?;
    let levels = v.levels();
    let values = match grid {
        Grid::Circle { n } => {
            let mut data = vec![ZERO; n];
            let norm = 1.0 / TAU.sqrt();
            for (j, lv) in levels.iter().enumerate() {
                for (k, lab) in lv.labels.iter().enumerate() {
                    if let ModeLabel::Circle(f) = *lab {
                        data[wrap(f, n)] += v.coeff(j, k) * norm;
                    }
                }
            }
            fft_rows(&mut data, n, true);
            data
        }
        Grid::Torus { n } => {
            let mut data = vec![ZERO; n * n];
            let norm = 1.0 / TAU;
            for (j, lv) in levels.iter().enumerate() {
                for (k, lab) in lv.labels.iter().enumerate() {
                    if let ModeLabel::Torus(a, b) = *lab {
                        data[wrap(a, n) * n + wrap(b, n)] += v.coeff(j, k) * norm;
                    }
                }
            }
            fft_2d(&mut data, n, true);
            data
        }
        Grid::Sphere { n_lat, n_lon } => sphere_inverse(v, n_lat, n_lon),
    };
    Ok(SampledFunction { grid, values })
}

fn sphere_inverse(v: &SpectralVector, n_lat: usize, n_lon: usize) -> Vec<Complex64> {
    let (t, _) = gauss_legendre(n_lat);
    let l_max = v.j_max();
    let l_max_i = l_max as i64;
    // Per ring, per m: Σ_l f̂(l, m) P̄_l^m(t_i).
    let rings: Vec<Vec<Complex64>> = (0..n_lat)
        .into_par_iter()
        .map(|i| {
            let mut ring = vec![ZERO; n_lon];
            let mut col = Vec::new();
            for m in -l_max_i..=l_max_i {
                let ma = m.unsigned_abs() as u32;
                let sign = if m < 0 && ma % 2 == 1 { -1.0 } else { 1.0 };
                legendre_column(ma, l_max as u32, t[i], &mut col);
                let mut g = ZERO;
                for (off, p) in col.iter().enumerate() {
                    let l = ma as usize + off;
                    g += v.coeff(l, (m + l as i64) as usize) * *p;
                }
                ring[wrap(m, n_lon)] += g * sign;
            }
            fft_rows(&mut ring, n_lon, true);
            ring
        })
        .collect();
    rings.concat()
}

/// `‖f‖²_{L²}` by the grid's own quadrature.
pub fn sample_norm_sq(f: &SampledFunction) -> f64 {
    match f.grid {
        Grid::Circle { n } => {
            let sq: Vec<f64> = f.values.iter().map(|z| z.norm_sqr()).collect();
            TAU / n as f64 * pairwise_sum(&sq)
        }
        Grid::Torus { n } => {
            let sq: Vec<f64> = f.values.iter().map(|z| z.norm_sqr()).collect();
            (TAU / n as f64).powi(2) * pairwise_sum(&sq)
        }
        Grid::Sphere { n_lat, n_lon } => {
            let (_, w) = gauss_legendre(n_lat);
            let rings: Vec<f64> = (0..n_lat)
                .map(|i| {
                    let sq: Vec<f64> = f.values[i * n_lon..(i + 1) * n_lon].iter().map(|z| z.norm_sqr()).collect();
                    w[i] * pairwise_sum(&sq)
                })
                .collect();
            2.0 * PI / n_lon as f64 * pairwise_sum(&rings)
        }
    }
}

/// `|‖f‖² - Σ_j ‖f̂(j)‖²_HS| / ‖f‖²`; zero for the zero function.
pub fn plancherel_residual(op: &ModelOperator, f: &SampledFunction, j_max: usize) -> Result<f64, TransformError> {
    let v = forward(op, f, j_max)?;
    let norm = sample_norm_sq(f);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let hs: Vec<f64> = v.log_hs_norms().iter().map(|&x| (2.0 * x).exp()).collect();
    Ok((norm - pairwise_sum(&hs)).abs() / norm)
}

/// Manifold of a grid, for callers that only hold samples.
impl SampledFunction {
    pub fn manifold(&self) -> Manifold {
        self.grid.manifold()
    }
}
