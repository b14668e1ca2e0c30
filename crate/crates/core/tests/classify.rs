//! Classifier properties on synthesized inputs.

use eigenreg::classify::{
    classify, definition_membership, dual_growth, fit_decay, gevrey_order, komatsu_membership, pairing_converges,
    ClassifyOptions, DualClass, FitModel, PairingVerdict, Regime, Tier,
};
use eigenreg::spectrum::{Manifold, ModelOperator, Point};
use eigenreg::synth::{delta_at, from_profile, DecayModel, DecayProfile, Phase, Split};
use eigenreg::transform::SpectralVector;
use eigenreg::weights::{check_conditions, make_weights, WeightKind, WeightSequence};
use proptest::prelude::*;

fn certified(kind: WeightKind) -> WeightSequence {
    let mut w = make_weights(kind, 2).unwrap();
    check_conditions(&mut w, 64).unwrap();
    w
}

fn profile(model: DecayModel, seed: u64) -> DecayProfile {
    DecayProfile { model, phase: Phase::Random(seed), split: Split::Random(seed ^ 0x5eed) }
}

fn opts() -> ClassifyOptions {
    ClassifyOptions::default()
}

#[test]
fn round_trip_recovers_every_family() {
    let circle = ModelOperator::circle();
    let g2 = certified(WeightKind::Gevrey(2.0));
    for seed in 0..20u64 {
        let v = from_profile(&circle, &profile(DecayModel::Exponential { l: 1.0, g: 0.5 }, seed), 4096).unwrap();
        let est = gevrey_order(&v, &opts()).unwrap();
        assert!((est.s - 2.0).abs() < 0.1, "seed {seed}: s = {}", est.s);

        let v = from_profile(&circle, &profile(DecayModel::Polynomial { p: 3.0 }, seed), 1000).unwrap();
        let fits = fit_decay(&v, None, &opts()).unwrap();
        let FitModel::Polynomial { p } = fits[0].model else { unreachable!() };
        assert!((p - 3.0).abs() < 0.05 && fits[0].aic < fits[1].aic, "seed {seed}: p = {p}");

        let v = from_profile(&circle, &profile(DecayModel::Associated { weights: g2.clone(), l: 1.0 }, seed), 4096)
            .unwrap();
        let est = gevrey_order(&v, &opts()).unwrap();
        assert!((est.s - 2.0).abs() < 0.2, "seed {seed}: s = {}", est.s);
        let k = komatsu_membership(&v, &g2, Regime::Roumieu, &opts()).unwrap();
        assert_eq!(k.witness_l, Some(1.0));
    }
}

#[test]
fn custom_profile_round_trips_through_the_polynomial_model() {
    let op = ModelOperator::sphere();
    let f = std::sync::Arc::new(|lam: f64| -2.5 * lam.ln_1p());
    let v = from_profile(&op, &profile(DecayModel::Custom(f), 9), 600).unwrap();
    let FitModel::Polynomial { p } = fit_decay(&v, None, &opts()).unwrap()[0].model else { unreachable!() };
    assert!((p - 2.5).abs() < 1e-9);
}

/// Verdict summary that must not depend on shift or scale.
fn verdicts(v: &SpectralVector, w: &WeightSequence) -> (String, bool, bool, bool, DualClass) {
    let o = opts();
    let r = classify(v, None, &o);
    let k = komatsu_membership(v, w, Regime::Roumieu, &o).unwrap();
    let kb = komatsu_membership(v, w, Regime::Beurling, &o).unwrap();
    let d = definition_membership(v.op(), v, w, 15, &o).unwrap();
    (r.tier.name().to_string(), k.member, kb.member, d.member, dual_growth(v, w, &o).unwrap().class)
}

fn sample_profiles() -> Vec<DecayModel> {
    vec![
        DecayModel::Exponential { l: 1.0, g: 1.0 },
        DecayModel::Exponential { l: 1.0, g: 0.5 },
        DecayModel::Exponential { l: 0.7, g: 1.0 / 3.0 },
        DecayModel::Polynomial { p: 3.0 },
        DecayModel::Exponential { l: -0.5, g: 1.0 },
    ]
}

#[test]
fn verdicts_are_invariant_under_shift() {
    let w = certified(WeightKind::Gevrey(2.0));
    for manifold in [Manifold::Circle, Manifold::Sphere2] {
        let base = ModelOperator::new(manifold, 0.0).unwrap();
        let shifted = ModelOperator::new(manifold, 1.0).unwrap();
        for (i, model) in sample_profiles().into_iter().enumerate() {
            let v = from_profile(&base, &profile(model, i as u64), 2048).unwrap();
            let vs = v.reindexed(&shifted).unwrap();
            assert_eq!(verdicts(&v, &w), verdicts(&vs, &w), "{manifold} profile {i}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scaling_changes_constants_only(log_factor in -200.0f64..200.0, which in 0usize..5, seed in any::<u64>()) {
        let w = certified(WeightKind::Factorial);
        let op = ModelOperator::circle();
        let model = sample_profiles().swap_remove(which);
        let v = from_profile(&op, &profile(model, seed), 2048).unwrap();
        let scaled = v.scaled(log_factor);
        prop_assert_eq!(verdicts(&v, &w), verdicts(&scaled, &w));
        if let (Ok(a), Ok(b)) = (gevrey_order(&v, &opts()), gevrey_order(&scaled, &opts())) {
            prop_assert!((a.s - b.s).abs() < 1e-6 * a.s);
        }
        let k = komatsu_membership(&v, &w, Regime::Roumieu, &opts()).unwrap();
        let ks = komatsu_membership(&scaled, &w, Regime::Roumieu, &opts()).unwrap();
        if let (Some(a), Some(b)) = (k.witness_log_c, ks.witness_log_c) {
            prop_assert!((b - a - log_factor).abs() < 1e-6 * (1.0 + a.abs() + log_factor.abs()));
        }
    }

    #[test]
    fn coefficient_and_definition_sides_agree_on_members(
        s_idx in 0usize..2, t in -1i32..=1, sphere in any::<bool>(), seed in any::<u64>()
    ) {
        let s = [1.0, 2.0][s_idx];
        let w = certified(WeightKind::Gevrey(s));
        let (op, j_max) = if sphere { (ModelOperator::sphere(), 1024) } else { (ModelOperator::circle(), 4096) };
        let v = from_profile(&op, &profile(DecayModel::Associated { weights: w.clone(), l: 2f64.powi(t) }, seed), j_max)
            .unwrap();
        let k = komatsu_membership(&v, &w, Regime::Roumieu, &opts()).unwrap();
        let d = definition_membership(&op, &v, &w, 15, &opts()).unwrap();
        prop_assert!(k.member && d.member, "rho {:?} curvature {:?}", k.shape_exponent, d.curvature);
    }

    #[test]
    fn membership_is_monotone_in_the_gevrey_order(s_idx in 0usize..3, bump in 0.1f64..2.0) {
        let s = [1.0, 1.5, 2.0][s_idx];
        let op = ModelOperator::circle();
        let v = from_profile(&op, &profile(DecayModel::Exponential { l: 1.0, g: 1.0 / s }, 3), 4096).unwrap();
        let here = komatsu_membership(&v, &certified(WeightKind::Gevrey(s)), Regime::Roumieu, &opts()).unwrap();
        prop_assert!(here.member);
        let above = komatsu_membership(&v, &certified(WeightKind::Gevrey(s + bump)), Regime::Roumieu, &opts()).unwrap();
        prop_assert!(above.member);
        let r = classify(&v, None, &opts());
        prop_assert!(r.flags.gevrey(s + bump) && r.flags.smooth);
    }
}

#[test]
fn roumieu_duals_pair_finitely_with_members() {
    let op = ModelOperator::circle();
    for s in [1.0, 2.0] {
        let w = certified(WeightKind::Gevrey(s));
        let duals = [
            from_profile(&op, &profile(DecayModel::Exponential { l: -1.0, g: 0.5 / s }, 1), 4096).unwrap(),
            delta_at(&op, Point::Circle(0.4), 4096).unwrap(),
        ];
        for u in &duals {
            assert_eq!(dual_growth(u, &w, &opts()).unwrap().class, DualClass::RoumieuDual);
            for l in [0.5, 1.0, 2.0] {
                let phi = from_profile(&op, &profile(DecayModel::Associated { weights: w.clone(), l }, 2), 4096).unwrap();
                let p = pairing_converges(u, &phi, &opts()).unwrap();
                assert_eq!(p.verdict, PairingVerdict::Converged, "s {s} L {l}: {p:?}");
            }
        }
    }
}

#[test]
fn analytic_tier_exactly_at_s_one() {
    let op = ModelOperator::circle();
    for (s, analytic) in [(1.0, true), (1.5, false), (2.0, false), (3.0, false)] {
        let v = from_profile(&op, &profile(DecayModel::Exponential { l: 1.0, g: 1.0 / s }, 0), 4096).unwrap();
        let r = classify(&v, None, &opts());
        assert_eq!(r.tier == Tier::Analytic, analytic, "s = {s}: {:?}", r.tier);
    }
}
