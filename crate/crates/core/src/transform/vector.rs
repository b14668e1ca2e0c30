use num_complex::Complex64;

use super::TransformError;
use crate::spectrum::{levels_through, Manifold, ModeLabel, ModelOperator, SpectrumLevel};
use crate::stats::pairwise_sum;

/// One level's coefficients: `coeffs * exp(log_offset)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub coeffs: Vec<Complex64>,
    pub log_offset: f64,
}

impl Block {
    pub fn zeros(d: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); d], log_offset: 0.0 }
    }

    /// Log of the Euclidean norm of the stored coefficients, `-inf` if zero.
    fn log_raw_norm(&self) -> f64 {
        let m = self.coeffs.iter().map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max);
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        let s: Vec<f64> = self.coeffs.iter().map(|c| (c / m).norm_sqr()).collect();
        m.ln() + 0.5 * pairwise_sum(&s).ln()
    }
}

/// Level-blocked coefficients `f̂(j) ∈ C^{d_j}` for `j = 0..=j_max`.
///
/// Powers of `E` are held as a pending exponent, so
/// `apply_power(apply_power(v, a), b) == apply_power(v, a + b)` exactly;
/// [`SpectralVector::materialize`] folds the exponent into the offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector {
    op: ModelOperator,
    levels: Vec<SpectrumLevel>,
    blocks: Vec<Block>,
    power: u64,
}

impl SpectralVector {
    pub fn new(op: ModelOperator, levels: Vec<SpectrumLevel>, blocks: Vec<Block>) -> Result<Self, TransformError> {
        if levels.len() != blocks.len() || levels.is_empty() {
            return Err(TransformError::Mismatch(format!("{} levels for {} blocks", levels.len(), blocks.len())));
        }
        for (lv, b) in levels.iter().zip(&blocks) {
            if lv.d != b.coeffs.len() {
                return Err(TransformError::Mismatch(format!(
                    "level {} has multiplicity {} but block length {}",
                    lv.j,
                    lv.d,
                    b.coeffs.len()
                )));
            }
            if !b.log_offset.is_finite() {
                return Err(TransformError::Mismatch(format!("level {} has a non-finite log offset", lv.j)));
            }
        }
        Ok(Self { op, levels, blocks, power: 0 })
    }

    pub fn zeros(op: &ModelOperator, j_max: usize) -> Self {
        let levels = levels_through(op, j_max);
        let blocks = levels.iter().map(|l| Block::zeros(l.d)).collect();
        Self { op: *op, levels, blocks, power: 0 }
    }

    pub fn op(&self) -> &ModelOperator {
        &self.op
    }

    pub fn j_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[SpectrumLevel] {
        &self.levels
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [Block] {
        &mut self.blocks
    }

    pub fn power(&self) -> u64 {
        self.power
    }

    pub fn lambda(&self, j: usize) -> f64 {
        self.levels[j].lambda
    }

    /// Total log scale of block `j`, including the pending power.
    pub fn log_scale(&self, j: usize) -> f64 {
        let off = self.blocks[j].log_offset;
        if self.power == 0 {
            return off;
        }
        let lam = self.levels[j].lambda;
        if lam == 0.0 {
            f64::NEG_INFINITY
        } else {
            off + self.power as f64 * lam.ln()
        }
    }

    /// Effective coefficient; overflows to infinity rather than wrapping.
    pub fn coeff(&self, j: usize, k: usize) -> Complex64 {
        let s = self.log_scale(j);
        let c = self.blocks[j].coeffs[k];
        if c == Complex64::new(0.0, 0.0) || s == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        c * s.exp()
    }

    /// `log ‖f̂(j)‖_HS`, `-inf` for a zero block.
    pub fn log_hs_norm(&self, j: usize) -> f64 {
        let raw = self.blocks[j].log_raw_norm();
        if raw == f64::NEG_INFINITY {
            return raw;
        }
        raw + self.log_scale(j)
    }

    pub fn hs_norm(&self, j: usize) -> f64 {
        self.log_hs_norm(j).exp()
    }

    pub fn log_hs_norms(&self) -> Vec<f64> {
        (0..self.levels.len()).map(|j| self.log_hs_norm(j)).collect()
    }

    /// `log ‖φ‖_{L²} = ½ log Σ_j ‖φ̂(j)‖²_HS`, evaluated by log-sum-exp.
    pub fn log_l2_norm(&self) -> f64 {
        log_sum_exp_half(&self.log_hs_norms())
    }

    /// `log ‖E^m φ‖_{L²}` from `Σ_j λ_j^{2m} ‖φ̂(j)‖²_HS`.
    pub fn power_norm_log(&self, m: u64) -> f64 {
        apply_power(self, m).log_l2_norm()
    }

    pub fn is_zero(&self) -> bool {
        self.log_hs_norms().iter().all(|&x| x == f64::NEG_INFINITY)
    }

    /// Folds the pending power into the block offsets.
    pub fn materialize(&self) -> SpectralVector {
        let mut out = self.clone();
        out.power = 0;
        for j in 0..out.blocks.len() {
            let s = self.log_scale(j);
            if s == f64::NEG_INFINITY {
                out.blocks[j] = Block::zeros(self.levels[j].d);
            } else {
                out.blocks[j].log_offset = s;
            }
        }
        out
    }

    /// Multiplies every coefficient by `exp(log_factor)`.
    pub fn scaled(&self, log_factor: f64) -> SpectralVector {
        let mut out = self.clone();
        for b in &mut out.blocks {
            b.log_offset += log_factor;
        }
        out
    }

    /// The same coefficients attached to another operator on the same
    /// manifold (eigenvalues re-indexed by the new shift).
    pub fn reindexed(&self, op: &ModelOperator) -> Result<SpectralVector, TransformError> {
        if op.manifold != self.op.manifold {
            return Err(TransformError::Mismatch("re-indexing needs the same manifold".into()));
        }
        let mut out = self.clone();
        out.op = *op;
        out.levels = levels_through(op, self.j_max());
        Ok(out)
    }

    /// Keeps levels `0..=j_max`.
    pub fn truncated(&self, j_max: usize) -> SpectralVector {
        let mut out = self.clone();
        out.levels.truncate(j_max + 1);
        out.blocks.truncate(j_max + 1);
        out
    }
}

/// `½ log Σ exp(2 x_i)` without overflow.
pub(crate) fn log_sum_exp_half(logs: &[f64]) -> f64 {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let terms: Vec<f64> = logs.iter().map(|&x| (2.0 * (x - m)).exp()).collect();
    m + 0.5 * pairwise_sum(&terms).ln()
}

/// `E^m v`: each block scaled by `λ_j^m`.
pub fn apply_power(v: &SpectralVector, m: u64) -> SpectralVector {
    let mut out = v.clone();
    out.power += m;
    out
}

/// `∂^α v` on the circle (`α = [a]`) or torus (`α = [a1, a2]`): mode `k`
/// is multiplied by `(ik)^α`. Magnitudes go into the log offsets.
pub fn apply_derivative(v: &SpectralVector, alpha: &[u32]) -> Result<SpectralVector, TransformError> {
    let want = match v.op.manifold {
        Manifold::Circle => 1,
        Manifold::Torus2 => 2,
        Manifold::Sphere2 => {
            return Err(TransformError::Unsupported("coordinate derivatives on the sphere".into()));
        }
    };
    if alpha.len() != want {
        return Err(TransformError::Mismatch(format!("multi-index needs {want} entries, got {}", alpha.len())));
    }
    let mut out = v.materialize();
    for (lv, block) in out.levels.iter().zip(out.blocks.iter_mut()) {
        let factors: Vec<(f64, Complex64)> = lv
            .labels
            .iter()
            .map(|label| {
                let ks: Vec<i64> = match *label {
                    ModeLabel::Circle(k) => vec![k],
                    ModeLabel::Torus(a, b) => vec![a, b],
                    ModeLabel::Sphere { .. } => unreachable!(),
                };
                let mut log_mag = 0.0;
                let mut phase = Complex64::new(1.0, 0.0);
                for (&k, &a) in ks.iter().zip(alpha) {
                    if a == 0 {
                        continue;
                    }
                    if k == 0 {
                        log_mag = f64::NEG_INFINITY;
                    } else {
                        log_mag += a as f64 * (k.unsigned_abs() as f64).ln();
                    }
                    // (ik)^a = |k|^a (i sign k)^a
                    let unit = if k >= 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
                    phase *= unit.powu(a);
                }
                (log_mag, phase)
            })
            .collect();
        let top = factors.iter().map(|f| f.0).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            *block = Block::zeros(lv.d);
            continue;
        }
        for (c, (lm, ph)) in block.coeffs.iter_mut().zip(&factors) {
            *c = if *lm == f64::NEG_INFINITY { Complex64::new(0.0, 0.0) } else { *c * *ph * (lm - top).exp() };
        }
        block.log_offset += top;
    }
    Ok(out)
}
