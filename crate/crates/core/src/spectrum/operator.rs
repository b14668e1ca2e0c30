use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SpectrumError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Manifold {
    Circle,
    Torus2,
    Sphere2,
}

impl Manifold {
    pub fn dim(self) -> u32 {
        match self {
            Manifold::Circle => 1,
            Manifold::Torus2 | Manifold::Sphere2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Manifold::Circle => "circle",
            Manifold::Torus2 => "torus2",
            Manifold::Sphere2 => "sphere2",
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Manifold {
    type Err = SpectrumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "circle" => Ok(Manifold::Circle),
            "torus2" | "torus" => Ok(Manifold::Torus2),
            "sphere2" | "sphere" => Ok(Manifold::Sphere2),
            other => Err(SpectrumError::InvalidArgument(format!("unknown manifold `{other}`"))),
        }
    }
}

/// `E = -Δ + shift` on one of the model manifolds. Order is always 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelOperator {
    pub manifold: Manifold,
    pub shift: f64,
}

impl ModelOperator {
    pub fn new(manifold: Manifold, shift: f64) -> Result<Self, SpectrumError> {
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(SpectrumError::InvalidArgument(format!("shift must be finite and >= 0, got {shift}")));
        }
        Ok(Self { manifold, shift })
    }

    pub fn circle() -> Self {
        Self { manifold: Manifold::Circle, shift: 0.0 }
    }

    pub fn torus() -> Self {
        Self { manifold: Manifold::Torus2, shift: 0.0 }
    }

    pub fn sphere() -> Self {
        Self { manifold: Manifold::Sphere2, shift: 0.0 }
    }

    pub fn n(&self) -> u32 {
        self.manifold.dim()
    }

    pub fn nu(&self) -> u32 {
        2
    }
}

/// Identifier of one eigenfunction inside a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeLabel {
    /// `e^{ikx}`
    Circle(i64),
    /// `e^{i(k1 x + k2 y)}`
    Torus(i64, i64),
    /// `Y_l^m`
    Sphere { l: u32, m: i32 },
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Circle(k) => write!(f, "{k}"),
            ModeLabel::Torus(a, b) => write!(f, "{a},{b}"),
            ModeLabel::Sphere { l, m } => write!(f, "{l},{m}"),
        }
    }
}

/// A distinct eigenvalue with its whole eigenspace.
///
/// Mode order inside a level is fixed: circle `[-k, k]`, torus lexicographic
/// in `(k1, k2)`, sphere `m = -l..=l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLevel {
    pub j: usize,
    pub lambda: f64,
    pub d: usize,
    pub labels: Vec<ModeLabel>,
}

impl SpectrumLevel {
    /// Eigenvalue of `-Δ` alone.
    pub fn base(&self, op: &ModelOperator) -> f64 {
        self.lambda - op.shift
    }
}

fn circle_level(j: usize, shift: f64) -> SpectrumLevel {
    let k = j as i64;
    let labels = if j == 0 { vec![ModeLabel::Circle(0)] } else { vec![ModeLabel::Circle(-k), ModeLabel::Circle(k)] };
    SpectrumLevel { j, lambda: (k * k) as f64 + shift, d: labels.len(), labels }
}

fn sphere_level(j: usize, shift: f64) -> SpectrumLevel {
    let l = j as u32;
    let labels: Vec<ModeLabel> = (-(l as i32)..=l as i32).map(|m| ModeLabel::Sphere { l, m }).collect();
    SpectrumLevel { j, lambda: (l as f64) * (l as f64 + 1.0) + shift, d: labels.len(), labels }
}

/// Lattice points grouped by `|k|^2 <= mu_max`, in increasing norm.
fn torus_groups(mu_max: u64) -> Vec<(u64, Vec<ModeLabel>)> {
    let r = (mu_max as f64).sqrt().floor() as i64 + 1;
    let mut pts: Vec<(u64, i64, i64)> = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let mu = (a * a + b * b) as u64;
            if mu <= mu_max {
                pts.push((mu, a, b));
            }
        }
    }
    pts.sort_unstable();
    let mut groups: Vec<(u64, Vec<ModeLabel>)> = Vec::new();
    for (mu, a, b) in pts {
        match groups.last_mut() {
            Some((m, v)) if *m == mu => v.push(ModeLabel::Torus(a, b)),
            _ => groups.push((mu, vec![ModeLabel::Torus(a, b)])),
        }
    }
    groups
}

/// All levels with `λ <= lambda_max`.
pub fn enumerate_levels(op: &ModelOperator, lambda_max: f64) -> Vec<SpectrumLevel> {
    if !(lambda_max >= op.shift) {
        return Vec::new();
    }
    let base_max = lambda_max - op.shift;
    match op.manifold {
        Manifold::Circle => {
            let j_max = base_max.sqrt().floor() as usize;
            (0..=j_max).filter(|&j| ((j * j) as f64) <= base_max).map(|j| circle_level(j, op.shift)).collect()
        }
        Manifold::Sphere2 => {
            let mut out = Vec::new();
            let mut l = 0usize;
            while (l as f64) * (l as f64 + 1.0) <= base_max {
                out.push(sphere_level(l, op.shift));
                l += 1;
            }
            out
        }
        Manifold::Torus2 => torus_groups(base_max.floor() as u64)
            .into_iter()
            .enumerate()
            .map(|(j, (mu, labels))| SpectrumLevel { j, lambda: mu as f64 + op.shift, d: labels.len(), labels })
            .collect(),
    }
}

/// Levels `0..=j_max`.
pub fn levels_through(op: &ModelOperator, j_max: usize) -> Vec<SpectrumLevel> {
    match op.manifold {
        Manifold::Circle => (0..=j_max).map(|j| circle_level(j, op.shift)).collect(),
        Manifold::Sphere2 => (0..=j_max).map(|j| sphere_level(j, op.shift)).collect(),
        Manifold::Torus2 => {
            // Sums of two squares thin out slowly; grow the radius until enough.
            let mut mu_max = (2 * j_max as u64 + 4).max(8);
            loop {
                let groups = torus_groups(mu_max);
                if groups.len() > j_max {
                    return groups
                        .into_iter()
                        .take(j_max + 1)
                        .enumerate()
                        .map(|(j, (mu, labels))| SpectrumLevel {
                            j,
                            lambda: mu as f64 + op.shift,
                            d: labels.len(),
                            labels,
                        })
                        .collect();
                }
                mu_max *= 2;
            }
        }
    }
}

/// `(λ, d)` for every level with `λ <= lambda_max`, without storing labels.
///
/// The torus is swept in segments of the norm axis so memory stays flat for
/// very large `lambda_max`.
pub fn level_stream(op: &ModelOperator, lambda_max: f64) -> Box<dyn Iterator<Item = (f64, u64)>> {
    let shift = op.shift;
    let base_max = (lambda_max - shift).max(-1.0);
    match op.manifold {
        Manifold::Circle => Box::new(
            (0u64..)
                .map(move |j| ((j * j) as f64, if j == 0 { 1 } else { 2 }))
                .take_while(move |(mu, _)| *mu <= base_max)
                .map(move |(mu, d)| (mu + shift, d)),
        ),
        Manifold::Sphere2 => Box::new(
            (0u64..)
                .map(|l| ((l * (l + 1)) as f64, 2 * l + 1))
                .take_while(move |(mu, _)| *mu <= base_max)
                .map(move |(mu, d)| (mu + shift, d)),
        ),
        Manifold::Torus2 => {
            if base_max < 0.0 {
                return Box::new(std::iter::empty());
            }
            Box::new(TorusStream::new(base_max.floor() as u64, shift))
        }
    }
}

const SEGMENT: u64 = 1 << 20;

struct TorusStream {
    mu_max: u64,
    shift: f64,
    start: u64,
    counts: Vec<u32>,
    pos: usize,
}

impl TorusStream {
    fn new(mu_max: u64, shift: f64) -> Self {
        let mut s = Self { mu_max, shift, start: 0, counts: Vec::new(), pos: 0 };
        s.fill();
        s
    }

    /// Lattice-point counts for norms in `[start, start + SEGMENT)`.
    fn fill(&mut self) {
        let lo = self.start;
        let hi = (lo + SEGMENT).min(self.mu_max + 1);
        self.counts.clear();
        self.counts.resize((hi - lo) as usize, 0);
        self.pos = 0;
        if hi <= lo {
            return;
        }
        let isqrt = |x: u64| {
            let mut r = (x as f64).sqrt() as u64;
            while r * r > x {
                r -= 1;
            }
            while (r + 1) * (r + 1) <= x {
                r += 1;
            }
            r
        };
        let a_max = isqrt(hi - 1);
        for a in 0..=a_max {
            let a2 = a * a;
            let wa = if a == 0 { 1 } else { 2 };
            // b >= 0 with a2 + b^2 in [lo, hi)
            let b_lo = if lo <= a2 { 0 } else { isqrt(lo - a2 - 1) + 1 };
            let b_hi = isqrt(hi - 1 - a2);
            for b in b_lo..=b_hi {
                let wb = if b == 0 { 1 } else { 2 };
                self.counts[(a2 + b * b - lo) as usize] += wa * wb;
            }
        }
    }
}

impl Iterator for TorusStream {
    type Item = (f64, u64);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            while self.pos < self.counts.len() {
                let i = self.pos;
                self.pos += 1;
                if self.counts[i] > 0 {
                    return Some(((self.start + i as u64) as f64 + self.shift, self.counts[i] as u64));
                }
            }
            if self.start + SEGMENT > self.mu_max {
                return None;
            }
            self.start += SEGMENT;
            self.fill();
        }
    }
}
