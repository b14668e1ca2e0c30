use std::fmt;

use serde::{Deserialize, Serialize};

use super::dual::{dual_growth, DualClass, DualVerdict};
use super::fit::{fit_decay, gevrey_from_fits, stretched_wins, DecayFit, FitModel, GevreyEstimate, MIN_USABLE_LEVELS};
use super::levels::usable_levels;
use super::membership::{definition_membership, komatsu_membership, tail_below_floor, DefinitionVerdict, KomatsuVerdict};
use super::ClassifyOptions;
use crate::spectrum::Manifold;
use crate::transform::SpectralVector;
use crate::weights::WeightSequence;

/// Primary verdict, strongest regularity first within each family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tier", rename_all = "snake_case")]
pub enum Tier {
    UltradistributionRoumieu,
    UltradistributionBeurling,
    /// Polynomial growth, or decay too slow for `L²`; `order` is the
    /// heuristic label `n/2 - pν`.
    Distribution { order: f64 },
    SquareIntegrable,
    /// Heuristic label `pν - n/2`.
    Sobolev { order: f64 },
    Smooth,
    Gevrey { s: f64 },
    Analytic,
    Unclassified,
}

impl Tier {
    /// Tier name without parameters.
    pub fn name(&self) -> &'static str {
        match self {
            Tier::UltradistributionRoumieu => "ultradistribution_roumieu",
            Tier::UltradistributionBeurling => "ultradistribution_beurling",
            Tier::Distribution { .. } => "distribution",
            Tier::SquareIntegrable => "square_integrable",
            Tier::Sobolev { .. } => "sobolev",
            Tier::Smooth => "smooth",
            Tier::Gevrey { .. } => "gevrey",
            Tier::Analytic => "analytic",
            Tier::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tier::Distribution { order } => write!(f, "distribution (order ~ {order:.3})"),
            Tier::Sobolev { order } => write!(f, "sobolev (order ~ {order:.3}, heuristic)"),
            Tier::Gevrey { s } => write!(f, "gevrey (s = {s:.4})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Implied memberships. Analytic sets every Gevrey flag (`gevrey_from = 1`);
/// Gevrey sets `smooth`; smooth sets `square_integrable`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TierFlags {
    pub square_integrable: bool,
    pub smooth: bool,
    /// Member of `γ^{s'}` for every `s' >= gevrey_from`.
    pub gevrey_from: Option<f64>,
    pub analytic: bool,
    /// Fitted `s < 1`: outside the `s >= 1` regime.
    pub super_analytic: bool,
    pub sobolev_order: Option<f64>,
}

impl TierFlags {
    pub fn gevrey(&self, s: f64) -> bool {
        self.gevrey_from.is_some_and(|s0| s >= s0)
    }

    fn analytic() -> Self {
        TierFlags {
            square_integrable: true,
            smooth: true,
            gevrey_from: Some(1.0),
            analytic: true,
            super_analytic: false,
            sobolev_order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Evidence {
    pub j_max: usize,
    pub usable_levels: usize,
    pub floored_levels: usize,
    /// Label of the weight sequence the class tests used.
    pub weights: Option<String>,
    pub komatsu: Option<KomatsuVerdict>,
    pub definition: Option<DefinitionVerdict>,
    pub dual: Option<DualVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub tier: Tier,
    pub flags: TierFlags,
    pub fits: Vec<DecayFit>,
    pub gevrey: Option<GevreyEstimate>,
    pub evidence: Evidence,
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    /// No tier could be assigned.
    pub fn inconclusive(&self) -> bool {
        self.tier == Tier::Unclassified
    }
}

/// Exponent `a` in `#{levels with λ <= Λ} ~ Λ^a`.
fn level_count_exponent(m: Manifold) -> f64 {
    match m {
        Manifold::Circle | Manifold::Sphere2 => 0.5,
        Manifold::Torus2 => 1.0,
    }
}

/// Tier from the decay fits alone.
pub fn smoothness_class(v: &SpectralVector, opts: &ClassifyOptions) -> super::Tier {
    classify(v, None, opts).tier
}

/// Full classification. With `weights`, the class tests (coefficient side,
/// definition side, dual growth) run as evidence and decide the
/// ultradistribution tiers.
pub fn classify(v: &SpectralVector, weights: Option<&WeightSequence>, opts: &ClassifyOptions) -> ClassificationReport {
    let u = usable_levels(v, opts.floor);
    let mut report = ClassificationReport {
        tier: Tier::Unclassified,
        flags: TierFlags::default(),
        fits: Vec::new(),
        gevrey: None,
        evidence: Evidence {
            j_max: v.j_max(),
            usable_levels: u.len(),
            floored_levels: u.floored,
            weights: weights.map(weights_label),
            ..Evidence::default()
        },
        warnings: Vec::new(),
    };
    if let Some(w) = weights {
        gather_evidence(v, w, opts, &mut report);
    }
    if v.is_zero() {
        report.tier = Tier::Analytic;
        report.flags = TierFlags::analytic();
        report.warnings.push("exact zero vector".into());
        return report;
    }
    if u.floored > 0 {
        report.warnings.push(format!("{} levels below the floor {:e} excluded", u.floored, opts.floor));
    }
    if u.len() < MIN_USABLE_LEVELS {
        if tail_below_floor(v, opts.floor) {
            report.tier = Tier::Analytic;
            report.flags = TierFlags::analytic();
            report.warnings.push(format!("band-limited at working precision ({} usable levels)", u.len()));
        } else {
            report.warnings.push(format!("{} usable levels, need {MIN_USABLE_LEVELS}", u.len()));
        }
        return report;
    }
    let fits = match fit_decay(v, weights, opts) {
        Ok(f) => f,
        Err(e) => {
            report.warnings.push(format!("decay fit failed: {e}"));
            return report;
        }
    };
    let nu = v.op().nu() as f64;
    let n = v.op().n() as f64;
    if stretched_wins(&fits) {
        match gevrey_from_fits(&fits, opts) {
            Ok(est) => {
                report.gevrey = Some(est);
                report.flags.square_integrable = true;
                report.flags.smooth = true;
                if est.at_lower_bound {
                    report.tier = Tier::Smooth;
                } else if est.analytic {
                    report.tier = Tier::Analytic;
                    report.flags = TierFlags { super_analytic: est.super_analytic, ..TierFlags::analytic() };
                    if est.super_analytic {
                        report.warnings.push(format!("super-analytic (s = {:.4}): outside the s >= 1 regime", est.s));
                    }
                } else {
                    report.tier = Tier::Gevrey { s: est.s };
                    report.flags.gevrey_from = Some(est.s);
                }
                if tail_above_floor(v, opts) {
                    report.warnings.push("decay has not reached the floor by j_max; fits see the truncation only".into());
                }
            }
            Err(_) => growth_tier(&mut report, weights.is_some()),
        }
    } else {
        let FitModel::Polynomial { p } = fits[0].model else { unreachable!("first fit is polynomial") };
        let order = p * nu - n / 2.0;
        if 2.0 * p > level_count_exponent(v.op().manifold) {
            report.flags.square_integrable = true;
            if order > 0.0 {
                report.tier = Tier::Sobolev { order };
                report.flags.sobolev_order = Some(order);
            } else {
                report.tier = Tier::SquareIntegrable;
            }
        } else {
            report.tier = Tier::Distribution { order: (-order).max(0.0) };
        }
    }
    report.fits = fits;
    report
}

fn growth_tier(report: &mut ClassificationReport, have_weights: bool) {
    match report.evidence.dual.as_ref().map(|d| d.class) {
        Some(DualClass::RoumieuDual) => report.tier = Tier::UltradistributionRoumieu,
        Some(DualClass::BeurlingDual) => report.tier = Tier::UltradistributionBeurling,
        Some(DualClass::Neither) => report.warnings.push("growth exceeds exp(M(L λ^{1/ν})) for every grid L".into()),
        None if have_weights => report.warnings.push("super-polynomial growth; dual test unavailable".into()),
        None => report.warnings.push("super-polynomial growth; supply weights for the dual tests".into()),
    }
}

fn tail_above_floor(v: &SpectralVector, opts: &ClassifyOptions) -> bool {
    let logs = v.log_hs_norms();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    logs.last().is_some_and(|&l| l.is_finite() && l >= max + opts.floor.ln())
}

fn weights_label(w: &WeightSequence) -> String {
    use crate::weights::WeightKind;
    match w.kind() {
        WeightKind::Factorial => "factorial".into(),
        WeightKind::Gevrey(s) => format!("gevrey:{s}"),
        WeightKind::Custom(t) => format!("custom ({} entries)", t.len()),
        WeightKind::CustomLog(t) => format!("custom ({} entries)", t.len()),
    }
}

fn gather_evidence(v: &SpectralVector, w: &WeightSequence, opts: &ClassifyOptions, report: &mut ClassificationReport) {
    if w.certificate().is_none() {
        report.warnings.push("weights uncertified; class tests skipped".into());
        return;
    }
    match komatsu_membership(v, w, opts.regime, opts) {
        Ok(k) => report.evidence.komatsu = Some(k),
        Err(e) => report.warnings.push(format!("coefficient-side test: {e}")),
    }
    match definition_membership(v.op(), v, w, opts.m_max, opts) {
        Ok(d) => {
            if d.deferred {
                report.warnings.push("definition-side test truncation-dominated; verdict from the coefficient side".into());
            }
            report.evidence.definition = Some(d);
        }
        Err(e) => report.warnings.push(format!("definition-side test: {e}")),
    }
    match dual_growth(v, w, opts) {
        Ok(d) => report.evidence.dual = Some(d),
        Err(e) => report.warnings.push(format!("dual growth test: {e}")),
    }
}
