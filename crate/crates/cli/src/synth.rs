//! `synth`: coefficient files with a prescribed profile.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use eigenreg::spectrum::{Manifold, Point};
use eigenreg::synth::{delta_at, from_profile, parse_profile_spec, poisson_kernel, DecayProfile, ProfileSpec};
use eigenreg::transform::write_coef_file;
use serde::Serialize;

use crate::config::DEFAULT_J_MAX;
use crate::{certified_weights, envelope, operator, CliError, Outcome, RunConfig, EXIT_OK};

#[derive(Serialize)]
struct SynthResult<'a> {
    manifold: Manifold,
    shift: f64,
    j_max: usize,
    provenance: &'a BTreeMap<String, String>,
    log_l2_norm: f64,
}

fn point(manifold: Manifold, coords: &[f64]) -> Result<Point, CliError> {
    let c = |i: usize| coords.get(i).copied().unwrap_or(0.0);
    let want = manifold.dim() as usize;
    if coords.len() > want {
        return Err(CliError::Config(format!("{manifold} points take {want} coordinate(s), got {}", coords.len())));
    }
    Ok(match manifold {
        Manifold::Circle => Point::Circle(c(0)),
        Manifold::Torus2 => Point::Torus(c(0), c(1)),
        Manifold::Sphere2 => Point::Sphere { theta: c(0), phi: c(1) },
    })
}

pub fn cmd_synth(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let spec_text = cfg.profile.as_deref().ok_or_else(|| CliError::Config("synth needs a profile".into()))?;
    let spec = parse_profile_spec(spec_text)?;
    let j_max = cfg.j_max.unwrap_or(DEFAULT_J_MAX);
    let mut provenance = BTreeMap::new();
    provenance.insert("profile".to_string(), spec_text.trim().to_string());
    provenance.insert("seed".to_string(), cfg.seed.to_string());
    let v = match spec {
        ProfileSpec::Exponential { l, g } => from_profile(&op, &DecayProfile::exponential(l, g, cfg.seed), j_max)?,
        ProfileSpec::Polynomial { p } => from_profile(&op, &DecayProfile::polynomial(p, cfg.seed), j_max)?,
        ProfileSpec::Associated { l } => {
            let w = certified_weights(cfg)?;
            provenance.insert("weights".to_string(), cfg.weights.clone());
            from_profile(&op, &DecayProfile::associated(&w, l, cfg.seed), j_max)?
        }
        ProfileSpec::Poisson { r } => {
            if op.manifold != Manifold::Circle || op.shift != 0.0 {
                return Err(CliError::Config("the Poisson profile lives on the unshifted circle".into()));
            }
            poisson_kernel(r, j_max)?.1
        }
        ProfileSpec::Delta => {
            let x0 = point(op.manifold, &cfg.point)?;
            let coords: Vec<String> = cfg.point.iter().map(|c| c.to_string()).collect();
            provenance.insert("point".to_string(), coords.join(","));
            delta_at(&op, x0, j_max)?
        }
    };
    let coef = write_coef_file(&v, &provenance);
    let result = SynthResult { manifold: op.manifold, shift: op.shift, j_max, provenance: &provenance, log_l2_norm: v.log_l2_norm() };
    let mut text = String::new();
    let _ = writeln!(text, "synthesized {} on {}, shift {}, j_max {}, seed {}", spec_text.trim(), op.manifold, op.shift, j_max, cfg.seed);
    if let Some(out) = &cfg.out {
        let _ = writeln!(text, "wrote {}", out.display());
    }
    Ok(Outcome { code: EXIT_OK, text, json: envelope(cfg, &result), artifact: Some(coef), plot: None })
}
