//! End-to-end acceptance run. Prints one line per criterion and exits with
//! a failure status if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use czcap::capacity::{CapacityEstimate, Estimator};
use czcap::geom::{generate, Point, SetDescriptor, Square};
use czcap::kernels::KernelSpec;
use czcap::meascurv::{l2_identity_report, non_ahlfors_mass, theta_values};
use czcap::measure::DiscreteMeasure;
use czcap::symbols::{binomial_identity_check, consistency_report, expand_p};
use czcap::symmetry::{menger_sq, perm, perm_via_identity, scan, ScanMode, Triple, KAPPA_ONE};
use czcap::{rng, Fraction};
use num_traits::ToPrimitive;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
}

fn timed(id: u32, name: &'static str, limit: Option<f64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (mut pass, mut detail) = f();
    let secs = t.elapsed().as_secs_f64();
    if let Some(limit) = limit {
        if secs >= limit {
            pass = false;
            detail.push_str(&format!("; runtime {secs:.1}s over {limit}s"));
        }
    }
    Outcome { id, name, pass, detail, secs }
}

fn report(o: &Outcome) {
    println!(
        "criterion {:>2} {} {} ({:.1}s): {}",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.name,
        o.secs,
        o.detail
    );
}

fn scan_box() -> Square<f64> {
    Square { corner: vec![-1.0, -1.0], side: 2.0 }
}

fn c1() -> (bool, String) {
    let binomial = (0..=50).all(|m| binomial_identity_check(m).unwrap().equal);
    let positive = (1..=20).all(|n| expand_p(n).unwrap().all_positive());
    let reports: Vec<_> = (1..=20).map(|n| consistency_report(n).unwrap()).collect();
    let constant = reports.iter().all(|r| r.constant);
    let ratio = reports[0].ratios[0].clone();
    (
        binomial && positive && constant,
        format!("binomial m<=50 {binomial}, coefficients positive n<=20 {positive}, ratios constant {constant} (ratio {ratio})"),
    )
}

fn c2() -> (bool, String) {
    let r = scan(1, 100_000, 11, &scan_box(), ScanMode::Uniform).unwrap();
    let sum_ok = (r.min_ratio - 0.5).abs() <= 0.5e-9 && (r.max_ratio - 0.5).abs() <= 0.5e-9;
    let k_ok = (r.max_p1_ratio - r.min_p1_ratio) <= 1e-9 * KAPPA_ONE && (r.min_p1_ratio - KAPPA_ONE).abs() <= 1e-9 * KAPPA_ONE;
    (
        sum_ok && k_ok,
        format!(
            "(p1+p2)/c^2 in [{:.15}, {:.15}], p1/c^2 in [{:.15}, {:.15}], kappa_1 = 1/4, skipped {}",
            r.min_ratio, r.max_ratio, r.min_p1_ratio, r.max_p1_ratio, r.skipped
        ),
    )
}

fn c3() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=4 {
        let u = scan(n, 100_000, 100 + u64::from(n), &scan_box(), ScanMode::Uniform).unwrap();
        let l = scan(n, 1_000, 200 + u64::from(n), &scan_box(), ScanMode::Collinear).unwrap();
        let pass = u.min_scaled_p >= -1e-12 && l.max_scaled_abs_p <= 1e-12 && u.min_ratio > 1e-6 && u.max_ratio < 1e6;
        ok &= pass;
        parts.push(format!(
            "n={n}: min scaled p {:.2e}, collinear max |p| {:.2e}, c1 {:.3e}, C {:.3e}",
            u.min_scaled_p, l.max_scaled_abs_p, u.min_ratio, u.max_ratio
        ));
    }
    (ok, parts.join("; "))
}

fn c4() -> (bool, String) {
    let t = Triple::new(Point::xy(-1.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.0, 1.0)).unwrap();
    let p: f64 = perm(&KernelSpec::huovinen(), &t).unwrap();
    let c2: f64 = menger_sq(&t);
    (
        (p + 1.0 / 16.0).abs() <= 1e-12 && (c2 - 1.0).abs() <= 1e-12,
        format!("p_H = {p}, c^2 = {c2}"),
    )
}

/// Sample coordinates lie on a dyadic lattice, so both sides are evaluated
/// exactly as well as in floating point.
const LATTICE: i32 = 1 << 16;

fn c5() -> (bool, String) {
    let mut r = rng::stream(5);
    // Both sides are homogeneous of degree -2, so the exact check runs on
    // the integer lattice coordinates.
    let exact = |p: &Point<f64>| {
        let int = |v: f64| Fraction::from_integer(((v * f64::from(LATTICE)) as i64).into());
        Point::from_vec(p.coords().iter().map(|v| int(*v)).collect())
    };
    let mut worst: f64 = 0.0;
    let mut float_worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=3u32 {
        let spec = KernelSpec::odd_power(1, n);
        let exact_spec = KernelSpec::<Fraction>::odd_power(1, n);
        let mut drawn = 0;
        while drawn < 10_000 {
            let mut coord = || f64::from(r.gen_range(-LATTICE..LATTICE)) / f64::from(LATTICE);
            let z = Point::xy(coord(), coord());
            let w = Point::xy(coord(), coord());
            let Ok(t) = Triple::new(Point::xy(0.0, 0.0), z.clone(), w.clone()) else {
                continue;
            };
            drawn += 1;
            let (ez, ew) = (exact(&z), exact(&w));
            let et = Triple::exact(exact(&Point::xy(0.0, 0.0)), ez.clone(), ew.clone()).unwrap();
            let a = perm_via_identity(n, &ez, &ew).unwrap();
            let b = perm(&exact_spec, &et).unwrap();
            let diff = ((a.clone() - b.clone()) / b.clone()).to_f64().unwrap().abs();
            worst = worst.max(diff);
            let fa: f64 = perm_via_identity(n, &z, &w).unwrap();
            let fb: f64 = perm(&spec, &t).unwrap();
            let bf = b.to_f64().unwrap() * f64::from(LATTICE).powi(2);
            float_worst = float_worst.max((fa - bf).abs().max((fb - bf).abs()) / bf.abs());
        }
        count += drawn;
    }
    (
        worst <= 1e-10,
        format!("{count} pairs, exact relative difference {worst:.2e}; float evaluation within {float_worst:.2e} of exact"),
    )
}

fn uniform(points: Vec<Point<f64>>) -> DiscreteMeasure<f64> {
    DiscreteMeasure::uniform(points, 1.0).unwrap()
}

fn c6() -> (bool, String) {
    let mut suite: Vec<(String, DiscreteMeasure<f64>)> = Vec::new();
    let seg = SetDescriptor::segment(vec![0.0, 0.0], vec![1.0, 0.0]);
    for h in [1.0 / 64.0, 1.0 / 256.0] {
        suite.push((format!("segment h={h}"), uniform(generate(&seg, h).unwrap().support)));
    }
    let circle = SetDescriptor::circle(vec![0.0, 0.0], 0.5);
    suite.push(("circle".into(), uniform(generate(&circle, 1.0 / 64.0).unwrap().support)));
    for depth in 1..=3u32 {
        let c = SetDescriptor::cantor(depth, vec![0.0, 0.0], 1.0);
        let h = 0.25f64.powi(depth as i32) / 2.0;
        suite.push((format!("cantor depth {depth}"), uniform(generate(&c, h).unwrap().support)));
    }
    let cloud = SetDescriptor::cloud(300, vec![0.0, 0.0], vec![1.0, 1.0], 3);
    suite.push(("cloud".into(), uniform(cloud.cloud_points().unwrap())));

    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (name, mu) in &suite {
        assert!(mu.len() <= 300, "{name} has {} atoms", mu.len());
        let base = mu.default_eps();
        for eps in [base, 4.0 * base] {
            for n in 1..=2 {
                for i in 1..=2 {
                    let r = l2_identity_report(i, n, mu, eps).unwrap();
                    let c = r.normalized_residual();
                    worst = worst.max(c);
                    ok &= r.residual <= 10.0 * r.growth_constant * r.mass;
                    cases += 1;
                }
            }
        }
    }
    (ok, format!("{cases} cases over {} measures, max residual/(growth*mass) = {worst:.3}", suite.len()))
}

fn suite_2d() -> Vec<(&'static str, SetDescriptor<f64>)> {
    vec![
        ("segment", SetDescriptor::segment(vec![0.0, 0.0], vec![1.0, 0.0])),
        ("circle", SetDescriptor::circle(vec![0.0, 0.0], 0.5)),
        ("cantor-3", SetDescriptor::cantor(3, vec![0.0, 0.0], 1.0)),
        ("cloud", SetDescriptor::cloud(100, vec![0.0, 0.0], vec![1.0, 1.0], 7)),
    ]
}

fn suite_3d() -> Vec<(&'static str, SetDescriptor<f64>)> {
    vec![
        ("face-xy", SetDescriptor::face(vec![0.0, 0.0, 0.0], 1.0, vec![1, 2])),
        ("face-yz", SetDescriptor::face(vec![1.0, 0.0, 0.0], 1.0, vec![2, 3])),
        ("two-faces", SetDescriptor::union(vec![
            SetDescriptor::face(vec![0.0, 0.0, 0.0], 1.0, vec![1, 2]),
            SetDescriptor::face(vec![0.0, 0.0, 0.0], 1.0, vec![1, 3]),
        ])),
        ("segment-x", SetDescriptor::segment(vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0])),
        ("segment-diagonal", SetDescriptor::segment(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0])),
    ]
}

const EST_2D: [Estimator; 4] = [
    Estimator::Plus,
    Estimator::NPlus { n: 1 },
    Estimator::NPlus { n: 2 },
    Estimator::NPlus { n: 3 },
];
const EST_3D: [Estimator; 4] = [
    Estimator::RieszPlus,
    Estimator::HatKPlus { k: 1 },
    Estimator::HatKPlus { k: 2 },
    Estimator::HatKPlus { k: 3 },
];

struct Run {
    set: &'static str,
    est: Estimator,
    e: CapacityEstimate<f64>,
}

/// The comparability suite: every estimator on every suite set at the
/// fixed resolution, runs in parallel, results in a fixed order.
fn run_suite() -> Vec<Run> {
    let mut jobs = Vec::new();
    for (name, desc) in suite_2d() {
        let disc = generate(&desc, 1.0 / 64.0).unwrap();
        for est in EST_2D {
            jobs.push((name, est, disc.clone()));
        }
    }
    for (name, desc) in suite_3d() {
        let disc = generate(&desc, 1.0 / 16.0).unwrap();
        for est in EST_3D {
            jobs.push((name, est, disc.clone()));
        }
    }
    jobs.into_par_iter()
        .map(|(set, est, disc)| Run { set, est, e: est.on(&disc).unwrap() })
        .collect()
}

fn find<'a>(runs: &'a [Run], set: &str, est: Estimator) -> &'a CapacityEstimate<f64> {
    &runs.iter().find(|r| r.set == set && r.est == est).expect("run present").e
}

fn serialize(runs: &[Run]) -> String {
    runs.iter()
        .map(|r| format!("{} {} {}\n", r.set, r.est.label(), serde_json::to_string(&r.e).unwrap()))
        .collect()
}

fn c9(runs: &[Run]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, _) in suite_2d() {
        let base = find(runs, name, Estimator::Plus).value;
        let ratios: Vec<f64> = [2, 3].iter().map(|&n| find(runs, name, Estimator::NPlus { n }).value / base).collect();
        ok &= ratios.iter().all(|r| (1e-2..=1e2).contains(r));
        parts.push(format!("{name} gamma+ {base:.4} n=2 {:.3} n=3 {:.3}", ratios[0], ratios[1]));
    }
    for (name, _) in suite_3d() {
        let base = find(runs, name, Estimator::RieszPlus).value;
        let ratios: Vec<f64> = (1..=3).map(|k| find(runs, name, Estimator::HatKPlus { k }).value / base).collect();
        ok &= ratios.iter().all(|r| *r >= 1.0 - 1e-9 && *r <= 1e2);
        parts.push(format!(
            "{name} Gamma+ {base:.4} k-ratios {:.3}/{:.3}/{:.3}",
            ratios[0], ratios[1], ratios[2]
        ));
    }
    let leak = runs.iter().fold(0.0f64, |m, r| m.max(r.e.leakage));
    ok &= leak <= 3.0;
    parts.push(format!("max leakage {leak:.3}"));
    (ok, parts.join("; "))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn c7(runs: &[Run]) -> (bool, String) {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let planar: Vec<Estimator> = vec![
        Estimator::Plus,
        Estimator::NPlus { n: 2 },
        Estimator::NPlus { n: 3 },
        Estimator::NmPlus { n: 1, m: 2 },
        Estimator::Single { n: 1, i: 1 },
        Estimator::Single { n: 2, i: 2 },
    ];
    let sets = [
        (SetDescriptor::cantor(2, vec![0.0, 0.0], 1.0), 1.0 / 32.0, &planar),
        (SetDescriptor::cloud(40, vec![0.0, 0.0], vec![1.0, 1.0], 9), 1.0 / 32.0, &planar),
    ];
    let spatial: Vec<Estimator> = EST_3D.to_vec();
    let sets3 = [
        (SetDescriptor::face(vec![0.0, 0.0, 0.0], 1.0, vec![1, 2]), 1.0 / 8.0, &spatial),
        (SetDescriptor::segment(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]), 1.0 / 8.0, &spatial),
    ];
    let mut cases = 0;
    for (desc, h, ests) in sets.iter().chain(sets3.iter()) {
        for est in ests.iter() {
            let base = est.run(desc, *h).unwrap().value;
            for lambda in [2.0, 4.0] {
                let v = est.run(&desc.scaled(lambda), h * lambda).unwrap().value;
                let e = rel(v / lambda, base);
                worst = worst.max(e);
                ok &= e <= 1e-8;
                cases += 1;
            }
        }
    }
    let mut bitwise = true;
    for (name, _) in suite_2d() {
        let a = find(runs, name, Estimator::Plus);
        let b = find(runs, name, Estimator::NPlus { n: 1 });
        bitwise &= a.value.to_bits() == b.value.to_bits() && a.witness == b.witness;
    }
    (
        ok && bitwise,
        format!("{cases} dilations, max relative deviation {worst:.2e}; n=1 bitwise equal to gamma+ on the 2D suite: {bitwise}"),
    )
}

fn c8(runs: &[Run]) -> (bool, String) {
    let slack = 1.0 - 1e-9;
    let mut ok = true;
    let mut checks = 0;
    let mut min_margin = f64::INFINITY;
    let mut check = |more: f64, fewer: f64| {
        checks += 1;
        min_margin = min_margin.min(fewer / more);
        fewer >= more * slack
    };
    for (name, desc) in suite_2d() {
        let disc = generate(&desc, 1.0 / 64.0).unwrap();
        for n in 1..=3u32 {
            let both = find(runs, name, Estimator::NPlus { n }).value;
            for i in 1..=2 {
                let single = Estimator::Single { n, i }.on(&disc).unwrap().value;
                ok &= check(both, single);
            }
        }
        let mixed = Estimator::NmPlus { n: 1, m: 2 }.on(&disc).unwrap().value;
        let k1 = Estimator::Single { n: 1, i: 1 }.on(&disc).unwrap().value;
        let k2 = Estimator::Single { n: 2, i: 2 }.on(&disc).unwrap().value;
        ok &= check(mixed, k1);
        ok &= check(mixed, k2);
    }
    for (name, _) in suite_3d() {
        let all = find(runs, name, Estimator::RieszPlus).value;
        for k in 1..=3 {
            ok &= check(all, find(runs, name, Estimator::HatKPlus { k }).value);
        }
    }
    (ok, format!("{checks} kernel-dropping comparisons, min fewer/more ratio {min_margin:.6}"))
}

fn c10() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, i) in [(1, 1), (2, 2)] {
        let est = Estimator::Single { n, i };
        let per_side: Vec<f64> = [1.0, 0.5, 0.25]
            .iter()
            .map(|&l| {
                let q = SetDescriptor::square(vec![0.0, 0.0], l);
                est.run(&q, l / 16.0).unwrap().value / l
            })
            .collect();
        let spread = per_side.iter().fold(0.0f64, |m, v| m.max(rel(*v, per_side[0])));
        ok &= spread <= 1e-8;
        parts.push(format!("{} value/l(Q) = {:.6} (spread {spread:.1e})", est.label(), per_side[0]));
    }
    let est = Estimator::Single { n: 1, i: 1 };
    let mut constant: f64 = 0.0;
    let mut family = suite_2d();
    family.push(("square", SetDescriptor::square(vec![0.0, 0.0], 1.0)));
    for (_, desc) in &family {
        let v = est.run(desc, 1.0 / 32.0).unwrap().value;
        constant = constant.max(v / desc.diameter());
    }
    ok &= constant.is_finite() && constant <= 10.0;
    parts.push(format!("value/diam <= {constant:.4} over {} sets", family.len()));
    (ok, parts.join("; "))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

fn c11(runs: &[Run]) -> (bool, String) {
    let witnesses: Vec<(&CapacityEstimate<f64>, &DiscreteMeasure<f64>)> = runs
        .iter()
        .filter_map(|r| r.e.witness.as_ref().map(|w| (&r.e, w)))
        .collect();
    let pooled: Vec<f64> = witnesses.iter().flat_map(|(_, w)| theta_values(w)).collect();
    let med = median(pooled);
    let threshold = 100.0 * med;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (e, w) in &witnesses {
        let cov = non_ahlfors_mass(w, threshold, e.h / 2.0).unwrap();
        worst = worst.max(cov.covered_mass / w.mass());
        ok &= cov.covered_mass <= 0.5 * w.mass();
    }
    let mut monotone = true;
    for (e, w) in witnesses.iter().take(10) {
        let mut last = f64::INFINITY;
        for factor in [0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0] {
            let c = non_ahlfors_mass(w, factor * med, e.h / 2.0).unwrap().covered_mass;
            monotone &= c <= last;
            last = c;
        }
    }
    (
        ok && monotone,
        format!(
            "{} witnesses, median theta {med:.4}, M = {threshold:.3}, max covered/mass {worst:.3}, monotone on 10: {monotone}",
            witnesses.len()
        ),
    )
}

fn c12(runs: &[Run], first: &str) -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for r in runs {
        let g = r.e.duality_gap / (1.0 + r.e.value.abs());
        worst = worst.max(g);
        ok &= g <= 1e-7;
    }
    let second = serialize(&run_suite());
    let identical = second.as_bytes() == first.as_bytes();
    (
        ok && identical,
        format!(
            "{} optima, max gap/(1+value) {worst:.2e}; rerun byte-identical: {identical} ({} bytes)",
            runs.len(),
            first.len()
        ),
    )
}

/// Criteria selected by `CZCAP_CRITERIA` (comma-separated ids); all when unset.
fn selected() -> Vec<u32> {
    match std::env::var("CZCAP_CRITERIA") {
        Ok(v) => v.split(',').filter_map(|x| x.trim().parse().ok()).collect(),
        Err(_) => (1..=12).collect(),
    }
}

fn main() -> ExitCode {
    let want = selected();
    let on = |id: u32| want.contains(&id);
    let mut outcomes = Vec::new();
    let mut emit = |o: Outcome| {
        report(&o);
        outcomes.push(o.pass);
    };
    if on(1) {
        emit(timed(1, "exact identities", Some(5.0), c1));
    }
    if on(2) {
        emit(timed(2, "n=1 symmetrization law", Some(10.0), c2));
    }
    if on(3) {
        emit(timed(3, "positivity and vanishing", None, c3));
    }
    if on(4) {
        emit(timed(4, "Huovinen counterexample", None, c4));
    }
    if on(5) {
        emit(timed(5, "closed-form permutation identity", Some(5.0), c5));
    }
    if on(6) {
        emit(timed(6, "L2 symmetrization residual", Some(120.0), c6));
    }

    let suite = [7, 8, 9, 11, 12].iter().any(|&id| on(id)).then(|| {
        let t = Instant::now();
        let runs = run_suite();
        let secs = t.elapsed().as_secs_f64();
        let first = serialize(&runs);
        (runs, secs, first)
    });
    if let Some((runs, suite_secs, _)) = &suite {
        if on(7) {
            emit(timed(7, "capacity homogeneity", None, || c7(runs)));
        }
        if on(8) {
            emit(timed(8, "capacity monotonicity", None, || c8(runs)));
        }
        if on(9) {
            let mut o9 = timed(9, "comparability experiments", None, || c9(runs));
            o9.secs += suite_secs;
            if o9.secs >= 600.0 {
                o9.pass = false;
                o9.detail.push_str("; runtime over 600s");
            }
            emit(o9);
        }
    }
    if on(10) {
        emit(timed(10, "single-kernel square scaling", None, c10));
    }
    if let Some((runs, _, first)) = &suite {
        if on(11) {
            emit(timed(11, "non-Ahlfors covering", None, || c11(runs)));
        }
        if on(12) {
            emit(timed(12, "LP certification and determinism", None, || c12(runs, first)));
        }
    }

    let passed = outcomes.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
