use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::gauss_legendre;
use crate::spectrum::{Manifold, Point};

/// Sample grid for one model manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grid {
    Circle { n: usize },
    Torus { n: usize },
    Sphere { n_lat: usize, n_lon: usize },
}

impl Grid {
    pub fn manifold(&self) -> Manifold {
        match self {
            Grid::Circle { .. } => Manifold::Circle,
            Grid::Torus { .. } => Manifold::Torus2,
            Grid::Sphere { .. } => Manifold::Sphere2,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Grid::Circle { n } => n,
            Grid::Torus { n } => n * n,
            Grid::Sphere { n_lat, n_lon } => n_lat * n_lon,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest grid that resolves levels up to `j_max` exactly; for the
    /// torus `j_max` is the largest `|k_i|` instead of a level index.
    pub fn minimal(manifold: Manifold, bandwidth: usize) -> Grid {
        match manifold {
            Manifold::Circle => Grid::Circle { n: 2 * bandwidth + 1 },
            Manifold::Torus2 => Grid::Torus { n: 2 * bandwidth + 1 },
            Manifold::Sphere2 => Grid::Sphere { n_lat: bandwidth + 1, n_lon: 2 * bandwidth + 1 },
        }
    }

    pub fn points(&self) -> Vec<Point> {
        match *self {
            Grid::Circle { n } => (0..n).map(|i| Point::Circle(TAU * i as f64 / n as f64)).collect(),
            Grid::Torus { n } => (0..n)
                .flat_map(|i| (0..n).map(move |j| Point::Torus(TAU * i as f64 / n as f64, TAU * j as f64 / n as f64)))
                .collect(),
            Grid::Sphere { n_lat, n_lon } => {
                let (t, _) = gauss_legendre(n_lat);
                t.iter()
                    .flat_map(|&x| {
                        (0..n_lon).map(move |k| Point::Sphere { theta: x.acos(), phi: TAU * k as f64 / n_lon as f64 })
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn from_fn(grid: Grid, f: impl Fn(Point) -> Complex64) -> Self {
        Self { grid, values: grid.points().into_iter().map(f).collect() }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }
}
