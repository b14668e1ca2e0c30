//! Acceptance suite: one PASS/FAIL line per criterion, each at its stated
//! tolerance.
//!
//! Two criteria cannot hold as stated and are listed in `KNOWN_FAILURES`:
//! the Gevrey lower bound fails wherever `M(r) = 0` (small `r`), and a
//! `10^{-3}` Cauchy tail for the torus series needs `λ ≈ 2.5·10^{16}`. They
//! run at full strength and print FAIL; only unexpected failures make the
//! binary exit nonzero.

use std::f64::consts::TAU;
use std::time::Instant;

use eigenreg::classify::{
    classify, definition_membership, dual_growth, komatsu_membership, pairing_converges, ClassifyOptions, DualClass,
    PairingVerdict, Regime, Tier,
};
use eigenreg::spectrum::{multiplicity_witness, series_diagnostic, Manifold, ModelOperator, Point};
use eigenreg::synth::{delta_at, from_profile, poisson_value, DecayModel, DecayProfile, Phase, Split};
use eigenreg::transform::{forward, inverse, plancherel_residual, Grid, SampledFunction, SpectralVector};
use eigenreg::weights::{
    check_conditions, gevrey_bounds_check, make_weights, validates_m2, AssociatedFunction, WeightKind, WeightSequence,
};
use eigenreg_cli::{cmd_analyze, cmd_verify, CliError, Command, Outcome, RunConfig};
use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const KNOWN_FAILURES: [u32; 2] = [4, 8];

struct Line {
    id: u32,
    pass: bool,
    what: &'static str,
    detail: String,
}

fn line(id: u32, what: &'static str, pass: bool, detail: String) -> Line {
    Line { id, pass, what, detail }
}

fn opts() -> ClassifyOptions {
    ClassifyOptions::default()
}

fn certified(kind: WeightKind) -> WeightSequence {
    let mut w = make_weights(kind, 2).expect("weights");
    check_conditions(&mut w, 64).expect("conditions");
    w
}

fn profile(model: DecayModel, seed: u64) -> DecayProfile {
    DecayProfile { model, phase: Phase::Random(seed), split: Split::Random(seed ^ 0x5eed) }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn plancherel() -> Line {
    let start = Instant::now();
    let mut rng = SplitMix64::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for op in [ModelOperator::circle(), ModelOperator::torus(), ModelOperator::sphere()] {
        let j_max = 128;
        for _ in 0..50 {
            let mut v = SpectralVector::zeros(&op, j_max);
            for b in v.blocks_mut() {
                for c in &mut b.coeffs {
                    *c = Complex64::new(unit(&mut rng), unit(&mut rng));
                }
            }
            let top = v.levels()[j_max].base(&op);
            let grid = match op.manifold {
                Manifold::Circle => Grid::minimal(Manifold::Circle, top.sqrt().round() as usize),
                Manifold::Torus2 => Grid::minimal(Manifold::Torus2, top.sqrt().floor() as usize),
                Manifold::Sphere2 => Grid::minimal(Manifold::Sphere2, j_max),
            };
            let f = inverse(&v, grid).expect("inverse");
            worst = worst.max(plancherel_residual(&op, &f, j_max).expect("residual"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    line(
        1,
        "Plancherel, 50 band-limited functions per manifold",
        worst < 1e-10 && secs < 30.0,
        format!("max residual {worst:.2e} (< 1e-10), {secs:.2} s (< 30 s)"),
    )
}

fn poisson() -> Line {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for r in [0.3, 0.5, 0.9] {
        let f = SampledFunction::from_fn(Grid::Circle { n: 512 }, |p| match p {
            Point::Circle(x) => Complex64::new(poisson_value(r, x), 0.0),
            _ => unreachable!(),
        });
        let v = forward(&ModelOperator::circle(), &f, 64).expect("forward");
        for (j, lv) in v.levels().iter().enumerate() {
            for k in 0..lv.d {
                worst = worst.max((v.coeff(j, k) - TAU.sqrt() * r.powi(j as i32)).norm());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    line(
        2,
        "Poisson kernel coefficients, |k| <= 64, N = 512",
        worst < 1e-12 && secs < 1.0,
        format!("max abs error {worst:.2e} (< 1e-12), {secs:.3} s (< 1 s)"),
    )
}

fn associated_identity() -> Line {
    let grid = log_grid(1e-2, 1e6, 100);
    let mut worst: f64 = 0.0;
    for s in [1.0, 1.5, 2.0, 3.0] {
        let w = make_weights(WeightKind::Gevrey(s), 2).expect("weights");
        let af = AssociatedFunction::new(&w);
        for &r in &grid {
            let m = af.value(r).expect("M(r)");
            // The maximizing 2k sits near r^{1/s}; scan well past it.
            let k_end = r.powf(1.0 / s).ceil() as u64 + 20;
            let log_r = r.ln();
            let log_sup = (0..=k_end).map(|k| 2.0 * k as f64 * log_r - w.log_m(2 * k)).fold(f64::NEG_INFINITY, f64::max);
            // exp(-M) / inf_k r^{-2k} M_{2k} - 1, in log space.
            worst = worst.max((log_sup - m).exp_m1().abs());
        }
    }
    line(
        3,
        "associated function against brute-force infimum",
        worst <= 1e-12,
        format!("max relative error {worst:.2e} (<= 1e-12), 100 points, s in {{1, 1.5, 2, 3}}"),
    )
}

fn gevrey_bounds() -> Line {
    let grid = log_grid(1e-2, 1e6, 100);
    let mut parts = Vec::new();
    let mut total = 0;
    for s in [1.0, 1.5, 2.0, 3.0] {
        let rep = gevrey_bounds_check(s, 2, &grid).expect("bounds");
        let v = rep.violations();
        let aux = rep.aux_violations().len();
        total += v.len() + aux;
        let last = v.last().map_or_else(|| "-".into(), |r| format!("{r:.3}"));
        parts.push(format!("s={s}: {} bound + {aux} aux (largest failing r {last})", v.len()));
    }
    line(4, "Gevrey bounds on [1e-2, 1e6]", total == 0, format!("{total} violations: {}", parts.join("; ")))
}

fn gevrey_recovery() -> Line {
    let start = Instant::now();
    let op = ModelOperator::circle();
    let mut worst: f64 = 0.0;
    let mut tier_errors = 0;
    for s in [1.0, 1.5, 2.0, 3.0] {
        for seed in 0..20u64 {
            let v = from_profile(&op, &profile(DecayModel::Exponential { l: 1.0, g: 1.0 / s }, seed), 4096)
                .expect("profile");
            let r = classify(&v, None, &opts());
            let got = r.gevrey.map_or(f64::NAN, |g| g.s);
            let rel = (got / s - 1.0).abs();
            worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
            if (r.tier == Tier::Analytic) != (s == 1.0) {
                tier_errors += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    line(
        5,
        "Gevrey order recovery, 4 orders x 20 seeds",
        worst <= 0.05 && tier_errors == 0 && secs < 10.0,
        format!("max relative error {:.2}% (<= 5%), {tier_errors} tier errors, {secs:.2} s (< 10 s)", 100.0 * worst),
    )
}

fn equivalence() -> Line {
    let mut disagreements = Vec::new();
    let ops = [(ModelOperator::circle(), 4096), (ModelOperator::sphere(), 1024)];
    let mut members = 0;
    for s in [1.0, 2.0] {
        let w = certified(WeightKind::Gevrey(s));
        for l in [0.5, 1.0, 2.0] {
            for (op, j_max) in &ops {
                let v = from_profile(op, &profile(DecayModel::Associated { weights: w.clone(), l }, 5), *j_max)
                    .expect("profile");
                let k = komatsu_membership(&v, &w, Regime::Roumieu, &opts()).expect("komatsu");
                let d = definition_membership(op, &v, &w, 15, &opts()).expect("definition");
                members += 1;
                if !(k.member && d.member) {
                    disagreements.push(format!("member s={s} L={l} {}", op.manifold));
                }
            }
        }
    }
    // Decay too slow for the weights: a Gevrey-2 and a Gevrey-3 profile, and
    // polynomial decay.
    let outside = [
        (WeightKind::Gevrey(1.0), DecayModel::Exponential { l: 1.0, g: 0.5 }),
        (WeightKind::Gevrey(2.0), DecayModel::Exponential { l: 1.0, g: 1.0 / 3.0 }),
        (WeightKind::Gevrey(1.0), DecayModel::Polynomial { p: 3.0 }),
    ];
    let mut non_members = 0;
    for (kind, model) in outside {
        let w = certified(kind.clone());
        for (op, j_max) in &ops {
            let v = from_profile(op, &profile(model.clone(), 6), *j_max).expect("profile");
            let k = komatsu_membership(&v, &w, Regime::Roumieu, &opts()).expect("komatsu");
            let d = definition_membership(op, &v, &w, 15, &opts()).expect("definition");
            non_members += 1;
            if k.member || d.member {
                disagreements.push(format!("non-member {model:?} vs {kind:?} {}", op.manifold));
            }
        }
    }
    line(
        6,
        "coefficient and definition sides agree",
        disagreements.is_empty(),
        format!("{members} members, {non_members} non-members, disagreements: [{}]", disagreements.join(", ")),
    )
}

fn m2_certificate() -> Line {
    // (2k)! / (k!)^2 = Π_{i=1}^{k} (k + i) / i <= 4^k.
    let oracle = (0..=50u64).all(|k| (1..=k).map(|i| ((k + i) as f64 / i as f64).ln()).sum::<f64>() <= k as f64 * 4f64.ln());
    let mut bad = Vec::new();
    for s in [1.0f64, 2.0, 3.0] {
        let mut w = make_weights(WeightKind::Gevrey(s), 2).expect("weights");
        let rep = check_conditions(&mut w, 50).expect("conditions");
        let dyadic = rep.m2.is_some_and(|m| m.a == 1.0 && m.h == 2f64.powf(s));
        if !(validates_m2(&w, 1.0, 2f64.powf(s), 50) && dyadic) {
            bad.push(s);
        }
    }
    line(
        7,
        "(M.2) with A = 1, H = 2^s for k <= 50",
        bad.is_empty() && oracle,
        format!("failing orders {bad:?}, central binomial oracle {}", if oracle { "holds" } else { "fails" }),
    )
}

fn weyl() -> Line {
    let sphere = multiplicity_witness(&ModelOperator::sphere(), 200.0 * 201.0);
    let mut parts = vec![format!("sphere max d/(1+lambda) = {:.4} over {} levels", sphere.c, sphere.levels)];
    let mut pass = sphere.c <= 3.0 && sphere.levels == 201;
    // Largest reachable range per manifold.
    for (op, lambda_max) in
        [(ModelOperator::circle(), 1e15), (ModelOperator::torus(), 1e7), (ModelOperator::sphere(), 1e15)]
    {
        let crit = op.n() as f64 / op.nu() as f64;
        let conv = series_diagnostic(&op, crit + 0.25, lambda_max);
        let div = series_diagnostic(&op, crit - 0.25, lambda_max);
        let tail = conv.tail_estimate.unwrap_or(f64::INFINITY);
        pass &= tail < 1e-3 && div.monotone_divergence;
        parts.push(format!(
            "{} tail {tail:.2e} at lambda {lambda_max:e}, divergence marker {}",
            op.manifold, div.monotone_divergence
        ));
    }
    line(8, "Weyl multiplicity and series tails", pass, parts.join("; "))
}

fn dual_quantifiers() -> Line {
    let op = ModelOperator::circle();
    let g1 = certified(WeightKind::Gevrey(1.0));
    let fast = from_profile(&op, &profile(DecayModel::Exponential { l: -0.5, g: 1.0 }, 1), 2048).expect("profile");
    let d_fast = dual_growth(&fast, &g1, &opts()).expect("dual");
    let slow = from_profile(&op, &profile(DecayModel::Exponential { l: -1.0, g: 0.5 }, 1), 2048).expect("profile");
    let d_slow = dual_growth(&slow, &g1, &opts()).expect("dual");
    let sphere = ModelOperator::sphere();
    let delta = delta_at(&sphere, Point::Sphere { theta: 0.7, phi: 1.9 }, 300).expect("delta");
    let deltas: Vec<DualClass> = [1.0, 2.0]
        .iter()
        .map(|&s| dual_growth(&delta, &certified(WeightKind::Gevrey(s)), &opts()).expect("dual").class)
        .collect();
    let pass = d_fast.beurling
        && !d_fast.roumieu
        && d_fast.class == DualClass::BeurlingDual
        && d_slow.class == DualClass::RoumieuDual
        && deltas.iter().all(|c| *c == DualClass::RoumieuDual);
    line(
        9,
        "dual quantifier patterns",
        pass,
        format!(
            "exp(0.5|k|): {:?} (L = {:?}); exp(|k|^1/2): {:?}; sphere delta s=1,2: {deltas:?}",
            d_fast.class, d_fast.witness_l, d_slow.class
        ),
    )
}

fn dual_coincidence() -> Line {
    let mut converged = 0;
    let mut violations = Vec::new();
    let mut divergent = 0;
    let mut divergent_ok = 0;
    for (op, j_max) in [(ModelOperator::circle(), 4096), (ModelOperator::sphere(), 1024)] {
        let x0 = match op.manifold {
            Manifold::Sphere2 => Point::Sphere { theta: 1.1, phi: 0.2 },
            _ => Point::Circle(0.4),
        };
        for s in [1.0, 2.0] {
            let w = certified(WeightKind::Gevrey(s));
            let functionals = [
                from_profile(&op, &profile(DecayModel::Exponential { l: -1.0, g: 0.5 / s }, 1), j_max).expect("u"),
                from_profile(&op, &profile(DecayModel::Exponential { l: -0.5, g: 1.0 / s }, 2), j_max).expect("u"),
                from_profile(&op, &profile(DecayModel::Polynomial { p: -2.0 }, 3), j_max).expect("u"),
                delta_at(&op, x0, j_max).expect("delta"),
            ];
            let tests = [
                from_profile(&op, &profile(DecayModel::Associated { weights: w.clone(), l: 0.5 }, 4), j_max).expect("phi"),
                from_profile(&op, &profile(DecayModel::Associated { weights: w.clone(), l: 1.0 }, 5), j_max).expect("phi"),
                from_profile(&op, &profile(DecayModel::Associated { weights: w.clone(), l: 2.0 }, 6), j_max).expect("phi"),
                // Decays past the floor before j_max on both manifolds.
                from_profile(&op, &profile(DecayModel::Exponential { l: 2.0, g: 1.0 / s }, 7), j_max).expect("phi"),
                from_profile(&op, &profile(DecayModel::Polynomial { p: 1.0 }, 8), j_max).expect("phi"),
            ];
            let dual: Vec<bool> = functionals
                .iter()
                .map(|u| dual_growth(u, &w, &opts()).expect("dual").class == DualClass::RoumieuDual)
                .collect();
            let member: Vec<bool> = tests
                .iter()
                .map(|phi| komatsu_membership(phi, &w, Regime::Roumieu, &opts()).expect("member").member)
                .collect();
            for (i, u) in functionals.iter().enumerate() {
                for (k, phi) in tests.iter().enumerate() {
                    let p = pairing_converges(u, phi, &opts()).expect("pairing");
                    let both = dual[i] && member[k];
                    if p.verdict == PairingVerdict::Diverged {
                        divergent += 1;
                        if !both {
                            divergent_ok += 1;
                        }
                    }
                    if both {
                        if p.verdict == PairingVerdict::Converged && p.relative_tail < 1e-6 {
                            converged += 1;
                        } else {
                            violations.push(format!("{} s={s} u{i} phi{k}: {:?}", op.manifold, p.verdict));
                        }
                    }
                }
            }
        }
    }
    line(
        10,
        "dual members pair finitely with class members",
        violations.is_empty() && divergent == divergent_ok,
        format!(
            "{converged} dual-member pairings converged (tail < 1e-6), {divergent} divergences all with a non-member: {}, failures [{}]",
            divergent == divergent_ok,
            violations.join(", ")
        ),
    )
}

type Cmd = fn(&RunConfig) -> Result<Outcome, CliError>;

fn determinism() -> Line {
    let dir = tempfile::tempdir().expect("tempdir");
    let coef = dir.path().join("gevrey2.coef");
    let v = from_profile(&ModelOperator::sphere(), &profile(DecayModel::Exponential { l: 1.0, g: 0.5 }, 9), 512)
        .expect("profile");
    std::fs::write(&coef, eigenreg::transform::write_coef_file(&v, &Default::default())).expect("write");
    let mut analyze = RunConfig::new(Command::Analyze);
    analyze.input = Some(coef);
    analyze.weights = "gevrey:2".into();
    let verify = RunConfig::new(Command::Verify);
    let mut same = true;
    let mut sizes = Vec::new();
    for (name, cfg, cmd) in [
        ("analyze", &analyze, cmd_analyze as Cmd),
        ("verify", &verify, cmd_verify as Cmd),
    ] {
        let runs: Vec<String> = [1usize, 1, 8, 8]
            .iter()
            .map(|&n| {
                let cfg = RunConfig { threads: Some(n), ..cfg.clone() };
                let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("pool");
                pool.install(|| cmd(&cfg)).expect("command").json
            })
            .collect();
        same &= runs.iter().all(|r| r == &runs[0]);
        sizes.push(format!("{name} {} bytes", runs[0].len()));
    }
    line(
        11,
        "structured reports are byte-identical",
        same,
        format!("{} across two runs at 1 and 8 threads", sizes.join(", ")),
    )
}

fn main() {
    let start = Instant::now();
    let checks: [fn() -> Line; 11] = [
        plancherel,
        poisson,
        associated_identity,
        gevrey_bounds,
        gevrey_recovery,
        equivalence,
        m2_certificate,
        weyl,
        dual_quantifiers,
        dual_coincidence,
        determinism,
    ];
    let mut unexpected = 0;
    for check in checks {
        let l = check();
        let known = KNOWN_FAILURES.contains(&l.id);
        let tag = match (l.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if !l.pass && !known {
            unexpected += 1;
        }
        println!("{tag} [{:>2}] {}: {}", l.id, l.what, l.detail);
    }
    println!("acceptance: {unexpected} unexpected failures, {:.1} s", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
