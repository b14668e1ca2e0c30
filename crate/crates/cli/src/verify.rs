//! `verify`: the library's bounds and identities as a user-facing self-test.
//!
//! Every check is deterministic in the seed; nothing time-dependent reaches
//! the report.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use eigenreg::spectrum::{Manifold, ModelOperator, Point, SeriesVerdict};
use eigenreg::synth::poisson_value;
use eigenreg::transform::{
    apply_power, forward, inverse, plancherel_residual, sample_norm_sq, Grid, SampledFunction, SpectralVector,
};
use eigenreg::weights::{
    gevrey_bounds_check, make_weights, parse_weight_spec, validates_m2, AssociatedFunction, WeightKind,
    WeightsError,
};
use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::{check_nu, envelope, CliError, Outcome, RunConfig, EXIT_ERROR, EXIT_OK};

/// Default range of the Weyl diagnostics.
const WEYL_LAMBDA_MAX: f64 = 1e6;
const GEVREY_ORDERS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
/// Random band-limited functions per manifold.
const PLANCHEREL_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

fn check(name: impl Into<String>, ok: bool, detail: String) -> Check {
    Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn gevrey_bounds() -> Result<Vec<Check>, CliError> {
    let grid = log_grid(10.0, 1e6, 100);
    GEVREY_ORDERS
        .iter()
        .map(|&s| {
            let rep = gevrey_bounds_check(s, 2, &grid)?;
            let (v, aux) = (rep.violations().len(), rep.aux_violations().len());
            Ok(check(
                format!("gevrey bounds s={s}"),
                v == 0 && aux == 0,
                format!("{v} bound and {aux} auxiliary violations on 100 points of [1e1, 1e6]"),
            ))
        })
        .collect()
}

/// `exp(-M(r))` against the brute-force infimum of `r^{-νk} M_{νk}`, compared
/// in log space.
fn associated_identity() -> Result<Vec<Check>, CliError> {
    let grid = log_grid(1e-2, 1e4, 40);
    GEVREY_ORDERS
        .iter()
        .map(|&s| {
            let w = make_weights(WeightKind::Gevrey(s), 2)?;
            let af = AssociatedFunction::new(&w);
            let mut worst: f64 = 0.0;
            for &r in &grid {
                let m = af.value(r)?;
                let k_end = r.powf(1.0 / s).ceil() as u64 + 20;
                let brute = (0..=k_end).map(|k| af.term(k, r.ln())).fold(f64::NEG_INFINITY, f64::max);
                // exp(-M) / inf - 1 = expm1(brute - M).
                worst = worst.max((brute - m).exp_m1().abs());
            }
            Ok(check(
                format!("associated identity s={s}"),
                worst <= 1e-12,
                format!("max relative error {worst:.3e} on 40 points of [1e-2, 1e4]"),
            ))
        })
        .collect()
}

/// `log((2k)! / (k!)^2) = Σ_{i=1}^{k} log((k + i) / i)`.
fn log_central_binomial(k: u64) -> f64 {
    (1..=k).map(|i| ((k + i) as f64 / i as f64).ln()).sum()
}

fn m2_certificate() -> Result<Vec<Check>, CliError> {
    let oracle = (0..=50u64).all(|k| log_central_binomial(k) <= k as f64 * 4f64.ln() + 1e-12);
    [1.0, 2.0, 3.0]
        .iter()
        .map(|&s: &f64| {
            let w = make_weights(WeightKind::Gevrey(s), 2)?;
            let ok = validates_m2(&w, 1.0, 2f64.powf(s), 50);
            Ok(check(
                format!("M.2 certificate s={s}"),
                ok && oracle,
                format!("A = 1, H = {} for k <= 50; central binomial oracle {}", 2f64.powf(s), if oracle { "holds" } else { "fails" }),
            ))
        })
        .collect()
}

fn weights_conditions(cfg: &RunConfig) -> Check {
    let name = format!("weights conditions {}", cfg.weights);
    let resolved = parse_weight_spec(&cfg.weights).and_then(|spec| spec.resolve(cfg.nu));
    let mut w = match resolved {
        Ok(w) => w,
        Err(e @ WeightsError::M0NotOne(_)) => return check(name, false, format!("(M.0) fails: {e}")),
        Err(e) => return check(name, false, e.to_string()),
    };
    match eigenreg::weights::check_conditions(&mut w, cfg.k_max) {
        Ok(rep) => {
            let mut fails = Vec::new();
            if !rep.m0 {
                fails.push("(M.0)");
            }
            if rep.m1.is_none() {
                fails.push("(M.1)");
            }
            if rep.m2.is_none() {
                fails.push("(M.2)");
            }
            let detail = if fails.is_empty() {
                let c = w.certificate().expect("certified when M.0-M.2 hold");
                format!("certified for k <= {} with A = {}, H = {}", cfg.k_max, c.a, c.h)
            } else {
                format!("{} fail for k <= {}", fails.join(", "), cfg.k_max)
            };
            check(name, fails.is_empty(), detail)
        }
        Err(e) => check(name, false, e.to_string()),
    }
}

fn weyl(op: &ModelOperator, lambda_max: f64, warnings: &mut Vec<String>) -> Vec<Check> {
    let rep = eigenreg::spectrum::weyl_checks(op, lambda_max);
    let m = op.manifold;
    let mut out = vec![check(
        format!("multiplicity {m}"),
        rep.multiplicity.c <= 3.0,
        format!(
            "max d/(1+lambda)^(n/nu) = {:.6} over {} levels up to {lambda_max:e}",
            rep.multiplicity.c, rep.multiplicity.levels
        ),
    )];
    let crit = op.n() as f64 / op.nu() as f64;
    if !rep.warnings.is_empty() {
        for w in &rep.warnings {
            warnings.push(format!("{m}: {w}"));
        }
        out.push(Check {
            name: format!("series {m}"),
            status: Status::Skip,
            detail: format!("insufficient levels up to {lambda_max:e}"),
        });
    } else {
        for d in &rep.series {
            let (want, side) = if d.q < crit { (SeriesVerdict::Diverges, "below") } else { (SeriesVerdict::Converges, "above") };
            let ok = d.verdict == want;
            let tail = d.tail_estimate.map_or_else(|| "-".to_string(), |t| format!("{t:.3e}"));
            out.push(check(
                format!("series {m} q={}", d.q),
                ok,
                format!("{:?} ({side} n/nu), partial sum {:.6e}, tail {tail}", d.verdict, d.partial_sum),
            ));
        }
    }
    let sup = &rep.sup_norm;
    out.push(check(
        format!("sup norm {m}"),
        sup.ok,
        format!("fitted exponent {:.4}, bound {:.4}, {} levels", sup.fitted_exponent, sup.expected_exponent, sup.levels_checked),
    ));
    out
}

fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// Random coefficients through `j_max` and a grid that resolves them exactly.
fn band_limited(op: &ModelOperator, j_max: usize, rng: &mut SplitMix64) -> (SpectralVector, Grid) {
    let mut v = SpectralVector::zeros(op, j_max);
    for b in v.blocks_mut() {
        for c in &mut b.coeffs {
            *c = Complex64::new(unit(rng), unit(rng));
        }
    }
    let top = v.levels()[j_max].base(op);
    let grid = match op.manifold {
        Manifold::Circle => Grid::minimal(Manifold::Circle, top.sqrt().round() as usize),
        Manifold::Torus2 => Grid::minimal(Manifold::Torus2, top.sqrt().floor() as usize),
        Manifold::Sphere2 => Grid::minimal(Manifold::Sphere2, j_max),
    };
    (v, grid)
}

fn spectral_j_max(m: Manifold) -> usize {
    match m {
        Manifold::Circle => 64,
        Manifold::Torus2 | Manifold::Sphere2 => 32,
    }
}

fn plancherel_and_powers(op: &ModelOperator, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let j_max = spectral_j_max(op.manifold);
    let mut worst_p: f64 = 0.0;
    let mut worst_e: f64 = 0.0;
    for _ in 0..PLANCHEREL_SAMPLES {
        let (v, grid) = band_limited(op, j_max, &mut rng);
        let f = inverse(&v, grid)?;
        worst_p = worst_p.max(plancherel_residual(op, &f, j_max)?);
        for m in 0..=4u64 {
            let quad = sample_norm_sq(&inverse(&apply_power(&v, m), grid)?);
            let spectral = (2.0 * v.power_norm_log(m)).exp();
            worst_e = worst_e.max(((quad - spectral) / spectral).abs());
        }
    }
    let m = op.manifold;
    Ok(vec![
        check(
            format!("plancherel {m}"),
            worst_p < 1e-10,
            format!("max residual {worst_p:.3e} over {PLANCHEREL_SAMPLES} functions, j_max {j_max}"),
        ),
        check(
            format!("power identity {m}"),
            worst_e < 1e-8,
            format!("max relative error {worst_e:.3e} for m <= 4"),
        ),
    ])
}

fn poisson_oracle() -> Result<Check, CliError> {
    let mut worst: f64 = 0.0;
    for r in [0.3, 0.5, 0.9] {
        let f = SampledFunction::from_fn(Grid::Circle { n: 512 }, |p| match p {
            Point::Circle(x) => Complex64::new(poisson_value(r, x), 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
        let v = forward(&ModelOperator::circle(), &f, 64)?;
        for (j, lv) in v.levels().iter().enumerate() {
            for k in 0..lv.d {
                let exact = TAU.sqrt() * r.powi(j as i32);
                worst = worst.max((v.coeff(j, k) - exact).norm());
            }
        }
    }
    Ok(check("poisson oracle", worst < 1e-12, format!("max absolute error {worst:.3e} for |k| <= 64, N = 512")))
}

#[derive(Serialize)]
struct VerifyResult {
    passed: usize,
    failed: usize,
    skipped: usize,
    checks: Vec<Check>,
    warnings: Vec<String>,
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    check_nu(cfg)?;
    let manifolds = match cfg.manifold {
        Some(m) => vec![m],
        None => vec![Manifold::Circle, Manifold::Torus2, Manifold::Sphere2],
    };
    let lambda_max = cfg.lambda_max.unwrap_or(WEYL_LAMBDA_MAX);
    let mut warnings = Vec::new();
    let mut checks = gevrey_bounds()?;
    checks.extend(associated_identity()?);
    checks.extend(m2_certificate()?);
    checks.push(weights_conditions(cfg));
    for &m in &manifolds {
        let op = ModelOperator::new(m, cfg.shift.unwrap_or(0.0))?;
        checks.extend(weyl(&op, lambda_max, &mut warnings));
        checks.extend(plancherel_and_powers(&op, cfg.seed)?);
    }
    checks.push(poisson_oracle()?);
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let result = VerifyResult {
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skip),
        warnings,
        checks,
    };
    let mut text = String::new();
    for c in &result.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        let _ = writeln!(text, "{tag}  {:<36} {}", c.name, c.detail);
    }
    for w in &result.warnings {
        let _ = writeln!(text, "warning: {w}");
    }
    let _ = writeln!(text, "{} passed, {} failed, {} skipped", result.passed, result.failed, result.skipped);
    Ok(Outcome {
        code: if result.failed == 0 { EXIT_OK } else { EXIT_ERROR },
        text,
        json: envelope(cfg, &result),
        artifact: None,
        plot: None,
    })
}
