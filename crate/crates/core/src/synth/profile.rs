use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::SynthError;
use crate::spectrum::ModelOperator;
use crate::transform::{Block, SpectralVector};
use crate::weights::{AssociatedFunction, WeightSequence};

/// Level norm as a function of the eigenvalue, in log scale.
#[derive(Clone)]
pub enum DecayModel {
    /// `exp(-L λ^{g/ν})`; negative `L` gives growth.
    Exponential { l: f64, g: f64 },
    /// `exp(-M(L λ^{1/ν}))` for the given weights.
    Associated { weights: WeightSequence, l: f64 },
    /// `(1 + λ)^{-p}`
    Polynomial { p: f64 },
    /// Any `λ ↦ log ‖f̂‖_HS`.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayModel::Exponential { l, g } => write!(f, "Exponential {{ l: {l}, g: {g} }}"),
            DecayModel::Associated { weights, l } => {
                write!(f, "Associated {{ weights: {:?}, l: {l} }}", weights.kind())
            }
            DecayModel::Polynomial { p } => write!(f, "Polynomial {{ p: {p} }}"),
            DecayModel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Zero,
    Random(u64),
}

/// How a level norm is shared among the modes of the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    FirstMode,
    Equal,
    Random(u64),
}

#[derive(Debug, Clone)]
pub struct DecayProfile {
    pub model: DecayModel,
    pub phase: Phase,
    pub split: Split,
}

impl DecayProfile {
    /// Equal split with random phases from `seed`.
    pub fn new(model: DecayModel, seed: u64) -> Self {
        Self { model, phase: Phase::Random(seed), split: Split::Equal }
    }

    pub fn exponential(l: f64, g: f64, seed: u64) -> Self {
        Self::new(DecayModel::Exponential { l, g }, seed)
    }

    pub fn polynomial(p: f64, seed: u64) -> Self {
        Self::new(DecayModel::Polynomial { p }, seed)
    }

    pub fn associated(weights: &WeightSequence, l: f64, seed: u64) -> Self {
        Self::new(DecayModel::Associated { weights: weights.clone(), l }, seed)
    }
}

fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Coefficients whose level norms equal the profile at every `λ_j`.
pub fn from_profile(op: &ModelOperator, profile: &DecayProfile, j_max: usize) -> Result<SpectralVector, SynthError> {
    let nu = op.nu() as f64;
    let log_norm: Box<dyn Fn(f64) -> Result<f64, SynthError>> = match &profile.model {
        DecayModel::Exponential { l, g } => {
            if !(l.is_finite() && *g > 0.0 && g.is_finite()) {
                return Err(SynthError::Parameter(format!("exponential needs finite L and g > 0 (L = {l}, g = {g})")));
            }
            let (l, g) = (*l, *g);
            Box::new(move |lam: f64| Ok(-l * lam.powf(g / nu)))
        }
        DecayModel::Polynomial { p } => {
            if !p.is_finite() {
                return Err(SynthError::Parameter(format!("polynomial order must be finite, got {p}")));
            }
            let p = *p;
            Box::new(move |lam: f64| Ok(-p * (1.0 + lam).ln()))
        }
        DecayModel::Associated { weights, l } => {
            if weights.certificate().is_none() {
                return Err(SynthError::Uncertified);
            }
            if !(*l > 0.0 && l.is_finite()) {
                return Err(SynthError::Parameter(format!("associated profile needs L > 0, got {l}")));
            }
            let af = AssociatedFunction::new(weights);
            let l = *l;
            Box::new(move |lam: f64| Ok(-af.value(l * lam.powf(1.0 / nu))?))
        }
        DecayModel::Custom(f) => {
            let f = f.clone();
            Box::new(move |lam: f64| Ok(f(lam)))
        }
    };
    let mut v = SpectralVector::zeros(op, j_max);
    let mut phase_rng = match profile.phase {
        Phase::Random(s) => Some(SplitMix64::seed_from_u64(s)),
        Phase::Zero => None,
    };
    let mut split_rng = match profile.split {
        Split::Random(s) => Some(SplitMix64::seed_from_u64(s)),
        _ => None,
    };
    let lambdas: Vec<f64> = v.levels().iter().map(|l| l.lambda).collect();
    for (block, lam) in v.blocks_mut().iter_mut().zip(lambdas) {
        let h = log_norm(lam)?;
        let d = block.coeffs.len();
        let amps: Vec<f64> = match (&profile.split, split_rng.as_mut()) {
            (Split::FirstMode, _) => (0..d).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect(),
            (Split::Random(_), Some(rng)) => {
                let u: Vec<f64> = (0..d).map(|_| unit(rng) + 1e-3).collect();
                let s: f64 = u.iter().sum();
                u.iter().map(|x| (x / s).sqrt()).collect()
            }
            _ => vec![(1.0 / d as f64).sqrt(); d],
        };
        let phases: Vec<f64> = match phase_rng.as_mut() {
            Some(rng) => (0..d).map(|_| TAU * unit(rng)).collect(),
            None => vec![0.0; d],
        };
        if h == f64::NEG_INFINITY {
            *block = Block::zeros(d);
            continue;
        }
        if !h.is_finite() {
            return Err(SynthError::Parameter(format!("profile is not finite at λ = {lam}")));
        }
        block.coeffs = amps.iter().zip(&phases).map(|(a, p)| Complex64::from_polar(*a, *p)).collect();
        block.log_offset = h;
    }
    Ok(v)
}

/// Command-line profile choice. The associated model takes its weights from
/// the surrounding configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Exponential { l: f64, g: f64 },
    Polynomial { p: f64 },
    Associated { l: f64 },
    Poisson { r: f64 },
    Delta,
}

/// Parses `exponential:L,G`, `polynomial:P`, `associated:L`, `poisson:R` or `delta`.
pub fn parse_profile_spec(s: &str) -> Result<ProfileSpec, SynthError> {
    let bad = |msg: String| SynthError::Parse { line: 1, msg };
    let num = |t: &str| -> Result<f64, SynthError> {
        let v: f64 = t.trim().parse().map_err(|_| bad(format!("bad number `{t}`")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad(format!("number must be finite, got `{t}`")))
        }
    };
    let s = s.trim();
    if s == "delta" {
        return Ok(ProfileSpec::Delta);
    }
    let (name, args) = s.split_once(':').ok_or_else(|| bad(format!("expected NAME:ARGS, got `{s}`")))?;
    let parts: Vec<&str> = args.split(',').collect();
    let want = |n: usize| -> Result<(), SynthError> {
        if parts.len() == n {
            Ok(())
        } else {
            Err(bad(format!("`{name}` takes {n} argument(s), got {}", parts.len())))
        }
    };
    match name {
        "exponential" => {
            want(2)?;
            let g = num(parts[1])?;
            if g <= 0.0 {
                return Err(SynthError::Parameter(format!("g must be positive, got {g}")));
            }
            Ok(ProfileSpec::Exponential { l: num(parts[0])?, g })
        }
        "polynomial" => {
            want(1)?;
            Ok(ProfileSpec::Polynomial { p: num(parts[0])? })
        }
        "associated" => {
            want(1)?;
            let l = num(parts[0])?;
            if l <= 0.0 {
                return Err(SynthError::Parameter(format!("L must be positive, got {l}")));
            }
            Ok(ProfileSpec::Associated { l })
        }
        "poisson" => {
            want(1)?;
            let r = num(parts[0])?;
            if !(r > 0.0 && r < 1.0) {
                return Err(SynthError::Parameter(format!("Poisson radius must lie in (0, 1), got {r}")));
            }
            Ok(ProfileSpec::Poisson { r })
        }
        other => Err(bad(format!("unknown profile `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Manifold;
    use crate::weights::{check_conditions, make_weights, WeightKind};

    fn certified(kind: WeightKind) -> WeightSequence {
        let mut w = make_weights(kind, 2).unwrap();
        check_conditions(&mut w, 50).unwrap();
        w
    }

    #[test]
    fn exponential_circle_norms() {
        let v = from_profile(&ModelOperator::circle(), &DecayProfile::exponential(1.0, 1.0, 3), 40).unwrap();
        for j in 0..=40 {
            assert!((v.log_hs_norm(j) + j as f64).abs() < 1e-13, "j = {j}");
        }
    }

    #[test]
    fn norms_survive_every_split_and_phase() {
        let op = ModelOperator::new(Manifold::Torus2, 0.5).unwrap();
        for split in [Split::FirstMode, Split::Equal, Split::Random(9)] {
            for phase in [Phase::Zero, Phase::Random(4)] {
                let prof = DecayProfile { model: DecayModel::Polynomial { p: 3.0 }, phase, split };
                let v = from_profile(&op, &prof, 30).unwrap();
                for (j, lv) in v.levels().iter().enumerate() {
                    let want = -3.0 * (1.0 + lv.lambda).ln();
                    assert!((v.log_hs_norm(j) - want).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn associated_matches_weights_module() {
        let w = certified(WeightKind::Factorial);
        let af = AssociatedFunction::new(&w);
        let v = from_profile(&ModelOperator::sphere(), &DecayProfile::associated(&w, 1.0, 0), 50).unwrap();
        for (j, lv) in v.levels().iter().enumerate() {
            let want = -af.value(lv.lambda.sqrt()).unwrap();
            assert!((v.log_hs_norm(j) - want).abs() < 1e-12);
        }
        let raw = make_weights(WeightKind::Factorial, 2).unwrap();
        assert_eq!(
            from_profile(&ModelOperator::sphere(), &DecayProfile::associated(&raw, 1.0, 0), 5).unwrap_err(),
            SynthError::Uncertified
        );
    }

    #[test]
    fn seeds_reproduce_bits() {
        let op = ModelOperator::sphere();
        let a = from_profile(&op, &DecayProfile::exponential(0.5, 0.7, 11), 20).unwrap();
        let b = from_profile(&op, &DecayProfile::exponential(0.5, 0.7, 11), 20).unwrap();
        let c = from_profile(&op, &DecayProfile::exponential(0.5, 0.7, 12), 20).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn profile_specs() {
        assert_eq!(parse_profile_spec("exponential:1,0.5").unwrap(), ProfileSpec::Exponential { l: 1.0, g: 0.5 });
        assert_eq!(parse_profile_spec("polynomial:3").unwrap(), ProfileSpec::Polynomial { p: 3.0 });
        assert_eq!(parse_profile_spec("associated:2").unwrap(), ProfileSpec::Associated { l: 2.0 });
        assert_eq!(parse_profile_spec("poisson:0.5").unwrap(), ProfileSpec::Poisson { r: 0.5 });
        assert_eq!(parse_profile_spec("delta").unwrap(), ProfileSpec::Delta);
        for bad in ["exponential:1", "poisson:1.5", "associated:-1", "nope:1", "polynomial:nan", "exponential:1,0"] {
            assert!(parse_profile_spec(bad).is_err(), "{bad}");
        }
    }
}
