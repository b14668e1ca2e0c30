//! `weights` and `spectrum`: look at one ingredient on its own.

use std::fmt::Write as _;

use eigenreg::spectrum::{levels_through, weyl_checks, SpectrumLevel, WeylReport};
use eigenreg::weights::{
    check_conditions, parse_weight_spec, write_weights_record, AssociatedFunction, ConditionCertificate,
    ConditionReport,
};
use serde::Serialize;

use crate::{check_nu, envelope, fmt_opt, operator, CliError, Outcome, RunConfig, EXIT_ERROR, EXIT_OK};

/// Listing length when neither `j_max` nor `lambda_max` is given.
const SPECTRUM_J_MAX: usize = 32;
/// Range of the Weyl diagnostics when `lambda_max` is not given.
const WEYL_LAMBDA_MAX: f64 = 1e6;

#[derive(Serialize)]
struct WeightsResult {
    label: String,
    conditions: ConditionReport,
    certificate: Option<ConditionCertificate>,
    /// `(k, log M_k)` for `k <= min(k_max, 10)`.
    head: Vec<(usize, f64)>,
    /// `(r, M(r))` at decades from 1 to 10^6.
    associated: Vec<(f64, f64)>,
}

pub fn cmd_weights(cfg: &RunConfig) -> Result<Outcome, CliError> {
    check_nu(cfg)?;
    let spec = parse_weight_spec(&cfg.weights)?;
    let mut w = spec.resolve(cfg.nu)?;
    let conditions = check_conditions(&mut w, cfg.k_max)?;
    let af = AssociatedFunction::new(&w);
    let associated = (0..=6)
        .map(|e| {
            let r = 10f64.powi(e);
            af.value(r).map(|m| (r, m))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let result = WeightsResult {
        label: spec.label(),
        certificate: w.certificate().copied(),
        head: (0..=cfg.k_max.min(10)).map(|k| (k, w.log_m(k as u64))).collect(),
        associated,
        conditions,
    };
    let c = &result.conditions;
    let mut s = String::new();
    let _ = writeln!(s, "weights   {} (nu {}), checked for k <= {}", result.label, cfg.nu, c.k_max_checked);
    let _ = writeln!(s, "M.0       {}", if c.m0 { "ok" } else { "FAIL (M_0 != 1)" });
    for (name, wit) in [("M.1", c.m1), ("M.2", c.m2)] {
        match wit {
            Some(x) => {
                let _ = writeln!(s, "{name}       ok (A = {}, H = {})", x.a, x.h);
            }
            None => {
                let _ = writeln!(s, "{name}       FAIL (no dyadic H with bounded A)");
            }
        }
    }
    match c.log_convex_violation {
        None => s.push_str("log-convex yes\n"),
        Some(k) => {
            let _ = writeln!(s, "log-convex no (first violation at k = {k})");
        }
    }
    match &c.growth {
        Some(g) => {
            let _ = writeln!(s, "growth    k! <= C l^k M_k with l = {}, C = {:.6}", g.l, g.c_l);
        }
        None => s.push_str("growth    no l in {1, 2, 4, 8} found\n"),
    }
    match &result.certificate {
        Some(cert) => {
            let _ = writeln!(s, "certified A = {}, H = {}", cert.a, cert.h);
        }
        None => s.push_str("certified no\n"),
    }
    s.push_str("log M_k  ");
    for (k, v) in &result.head {
        let _ = write!(s, " {k}:{v:.4}");
    }
    s.push_str("\nM(r)     ");
    for (r, m) in &result.associated {
        let _ = write!(s, " {r:e}:{m:.4}");
    }
    s.push('\n');
    let artifact = cfg.out.as_ref().map(|_| write_weights_record(&w, cfg.k_max));
    Ok(Outcome {
        code: if result.certificate.is_some() { EXIT_OK } else { EXIT_ERROR },
        text: s,
        json: envelope(cfg, &result),
        artifact,
        plot: None,
    })
}

#[derive(Serialize)]
struct SpectrumResult<'a> {
    levels: &'a [SpectrumLevel],
    weyl: WeylReport,
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let weyl_max = cfg.lambda_max.unwrap_or(WEYL_LAMBDA_MAX);
    let mut levels = levels_through(&op, cfg.j_max.unwrap_or(SPECTRUM_J_MAX));
    if let Some(lm) = cfg.lambda_max {
        levels.retain(|l| l.lambda <= lm);
    }
    let weyl = weyl_checks(&op, weyl_max);
    let mut s = String::from("j\tlambda\td\tlabels\n");
    for lv in &levels {
        let labels: Vec<String> = lv.labels.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(s, "{}\t{}\t{}\t{}", lv.j, lv.lambda, lv.d, labels.join(" "));
    }
    let m = &weyl.multiplicity;
    let _ = writeln!(
        s,
        "# weyl {} up to lambda {:e}: {} levels, max d/(1+lambda)^(n/nu) = {:.6} at lambda {}",
        op.manifold, weyl.lambda_max, m.levels, m.c, m.argmax_lambda
    );
    for d in &weyl.series {
        let _ = writeln!(
            s,
            "# series q = {}: {:?}, partial sum {:.6e}, block ratio {}, tail {}",
            d.q,
            d.verdict,
            d.partial_sum,
            fmt_opt(d.block_ratio),
            d.tail_estimate.map_or_else(|| "-".into(), |t| format!("{t:.3e}"))
        );
    }
    let sup = &weyl.sup_norm;
    let _ = writeln!(
        s,
        "# sup norm exponent {:.4} (bound {:.4}) over {} levels: {}",
        sup.fitted_exponent,
        sup.expected_exponent,
        sup.levels_checked,
        if sup.ok { "ok" } else { "FAIL" }
    );
    for w in &weyl.warnings {
        let _ = writeln!(s, "# warning: {w}");
    }
    let result = SpectrumResult { levels: &levels, weyl };
    Ok(Outcome { code: EXIT_OK, text: s, json: envelope(cfg, &result), artifact: None, plot: None })
}
