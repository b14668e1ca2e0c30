//! `analyze`: classify the coefficients in a file.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use eigenreg::classify::{classify, ClassificationReport, FitModel};
use eigenreg::spectrum::{Manifold, ModelOperator};
use eigenreg::transform::parse_coef_file;
use eigenreg::weights::ConditionCertificate;
use serde::Serialize;

use crate::{certified_weights, check_nu, envelope, fmt_opt, plot, CliError, Outcome, RunConfig};
use crate::{EXIT_INCONCLUSIVE, EXIT_OK};

#[derive(Serialize)]
struct AnalyzeResult<'a> {
    manifold: Manifold,
    nu: u32,
    shift: f64,
    j_max: usize,
    provenance: &'a BTreeMap<String, String>,
    weights: String,
    certificate: Option<ConditionCertificate>,
    report: &'a ClassificationReport,
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Outcome, CliError> {
    check_nu(cfg)?;
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Config("analyze needs an input file".into()))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let file = parse_coef_file(&text).map_err(|source| CliError::Input { path: path.clone(), source })?;
    let mut v = file.vector;
    let manifold = v.op().manifold;
    if let Some(m) = cfg.manifold {
        if m != manifold {
            return Err(CliError::Config(format!("file holds {manifold} coefficients, --manifold says {m}")));
        }
    }
    if let Some(c) = cfg.shift {
        if c != v.op().shift {
            v = v.reindexed(&ModelOperator::new(manifold, c)?)?;
        }
    }
    if let Some(j) = cfg.j_max {
        if j < v.j_max() {
            v = v.truncated(j);
        }
    }
    let w = certified_weights(cfg)?;
    let report = classify(&v, Some(&w), &cfg.classify);
    let result = AnalyzeResult {
        manifold,
        nu: v.op().nu(),
        shift: v.op().shift,
        j_max: v.j_max(),
        provenance: &file.provenance,
        weights: cfg.weights.clone(),
        certificate: w.certificate().copied(),
        report: &report,
    };
    Ok(Outcome {
        code: if report.inconclusive() { EXIT_INCONCLUSIVE } else { EXIT_OK },
        text: render(cfg, &result),
        json: envelope(cfg, &result),
        artifact: None,
        plot: cfg.plot.as_ref().map(|_| plot::decay_svg(&v)),
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render(cfg: &RunConfig, a: &AnalyzeResult) -> String {
    let r = a.report;
    let mut s = String::new();
    if let Some(p) = &cfg.input {
        let _ = writeln!(s, "input     {}", p.display());
    }
    let _ = writeln!(s, "operator  {}, nu {}, shift {}, j_max {}", a.manifold, a.nu, a.shift, a.j_max);
    for (k, v) in a.provenance {
        let _ = writeln!(s, "  {k}: {v}");
    }
    match &a.certificate {
        Some(c) => {
            let _ = writeln!(s, "weights   {} (certified A = {}, H = {}, k <= {})", a.weights, c.a, c.h, c.k_max_checked);
        }
        None => {
            let _ = writeln!(s, "weights   {} (not certified)", a.weights);
        }
    }
    let _ = writeln!(s, "tier      {}", r.tier);
    let f = &r.flags;
    let _ = writeln!(
        s,
        "flags     L2 {}, smooth {}, gevrey from {}, analytic {}{}",
        yes(f.square_integrable),
        yes(f.smooth),
        fmt_opt(f.gevrey_from),
        yes(f.analytic),
        if f.super_analytic { ", super-analytic" } else { "" }
    );
    if let Some(g) = &r.gevrey {
        let _ = writeln!(s, "gevrey    s = {:.6} +/- {}  (g = {:.6}, L = {:.6})", g.s, fmt_opt(g.s_sigma), g.g, g.l);
    }
    if !r.fits.is_empty() {
        s.push_str("fits\n");
        for fit in &r.fits {
            let model = match fit.model {
                FitModel::Polynomial { p } => format!("polynomial   p = {p:.6}"),
                FitModel::Exponential { l, g, .. } => format!("stretched    L = {l:.6}, g = {g:.6}"),
                FitModel::Associated { l, bounded } => {
                    format!("associated   L = {l:.6}{}", if bounded { "" } else { " (unbounded)" })
                }
            };
            let _ = writeln!(
                s,
                "  {model:<40} log C = {:.6}, rms = {:.3e}, aic = {:.3}, levels {}..={}",
                fit.log_c, fit.residual, fit.aic, fit.levels_used[0], fit.levels_used[1]
            );
        }
    }
    let e = &r.evidence;
    s.push_str("evidence\n");
    let _ = writeln!(s, "  usable levels {} of {} ({} below the floor)", e.usable_levels, e.j_max + 1, e.floored_levels);
    if let Some(k) = &e.komatsu {
        let _ = writeln!(
            s,
            "  coefficient side ({}): member {}, L = {}, log C = {}, shape exponent {}",
            k.regime,
            yes(k.member),
            fmt_opt(k.witness_l),
            fmt_opt(k.witness_log_c),
            fmt_opt(k.shape_exponent)
        );
    }
    if let Some(d) = &e.definition {
        let _ = writeln!(
            s,
            "  definition side: roumieu {}, beurling {}, h = {}, log C = {}, curvature {}{}",
            yes(d.member),
            yes(d.beurling_member),
            fmt_opt(d.h),
            fmt_opt(d.log_c),
            fmt_opt(d.curvature),
            if d.deferred { " (deferred)" } else { "" }
        );
    }
    if let Some(d) = &e.dual {
        let _ = writeln!(
            s,
            "  dual growth: {:?}, bounded {}, L = {}, log K = {}",
            d.class,
            yes(d.bounded),
            fmt_opt(d.witness_l),
            fmt_opt(d.witness_log_k)
        );
    }
    if !r.warnings.is_empty() {
        s.push_str("warnings\n");
        for w in &r.warnings {
            let _ = writeln!(s, "  - {w}");
        }
    }
    s
}
