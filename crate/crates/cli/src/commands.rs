use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use czcap::capacity::{estimate, kernel_set_name, CapacityEstimate, CapacityRun, Estimator};
use czcap::geom::{generate, SetDescriptor, Square};
use czcap::kernels::KernelSpec;
use czcap::meascurv::{
    curvature_energy, growth_constant, l2_identity_report, non_ahlfors_mass, perm_energy, theta_values,
    transform_norm,
};
use czcap::measure::DiscreteMeasure;
use czcap::symbols::identity_suite;
use czcap::symmetry::{scan, RatioScanReport, ScanMode};
use czcap::VERSION;

use crate::{
    AhlforsArgs, CapacityArgs, Command, Common, CompareArgs, EnergyArgs, Failure, IdentityArgs, Mode, ScanArgs,
};

type Outcome = Result<(), Failure>;

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::ScanRatios(a) => scan_ratios(cmd, a),
        Command::CheckIdentities(a) => check_identities(cmd, a),
        Command::Energy(a) => energy(cmd, a),
        Command::Capacity(a) => capacity(cmd, a),
        Command::Compare(a) => compare(cmd, a),
        Command::Ahlfors(a) => ahlfors(cmd, a),
    }
}

fn config_json(cmd: &Command) -> Value {
    serde_json::to_value(cmd).expect("config serializes")
}

fn write(common: &Common, text: &str) -> Outcome {
    match &common.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json(cmd: &Command, common: &Common, body: Value) -> Outcome {
    let mut doc = json!({ "version": VERSION, "config": config_json(cmd) });
    if let (Value::Object(dst), Value::Object(src)) = (&mut doc, body) {
        dst.extend(src);
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    write(common, &text)
}

/// CSV with the version and the resolved config as leading comment lines.
fn write_csv(cmd: &Command, common: &Common, header: &str, rows: &[String]) -> Outcome {
    let mut text = format!("# czcap {VERSION}\n# config {}\n{header}\n", config_json(cmd));
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    write(common, &text)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn usage<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

fn load_set(path: &Path) -> Result<SetDescriptor, Failure> {
    let desc = SetDescriptor::from_json(&read(path)?).map_err(usage(path))?;
    desc.validate().map_err(usage(path))?;
    Ok(desc)
}

/// Reads a measure, a set descriptor (uniform unit mass on its support, or
/// on its points for clouds) or a capacity run descriptor (its witness).
fn load_measure(path: &Path, h: Option<f64>) -> Result<DiscreteMeasure, Failure> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(usage(path))?;
    if value.get("points").is_some() {
        let mu: DiscreteMeasure = serde_json::from_value(value).map_err(usage(path))?;
        return DiscreteMeasure::new(mu.points().to_vec(), mu.weights().to_vec()).map_err(usage(path));
    }
    if value.get("kernels").is_some() {
        let run = CapacityRun::<f64>::from_json(&text).map_err(usage(path))?;
        let p = run.problem().map_err(usage(path))?;
        return estimate(&p)?
            .witness
            .ok_or_else(|| Failure::Invariant("the capacity program has value zero and no witness".into()));
    }
    let desc = SetDescriptor::from_json(&text).map_err(usage(path))?;
    desc.validate().map_err(usage(path))?;
    let points = match (desc.cloud_points(), h) {
        (_, Some(h)) => generate(&desc, h).map_err(usage(path))?.support,
        (Some(points), None) => points,
        (None, None) => return Err(Failure::Usage("--h is required for this set descriptor".into())),
    };
    Ok(DiscreteMeasure::uniform(points, 1.0)?)
}

fn scan_ratios(cmd: &Command, a: &ScanArgs) -> Outcome {
    let bx = Square { corner: a.corner.clone(), side: a.side };
    let mode = match a.mode {
        Mode::Uniform => ScanMode::Uniform,
        Mode::Collinear => ScanMode::Collinear,
        Mode::NearCollinear => ScanMode::NearCollinear { offset: a.offset },
    };
    let reports = a
        .n
        .iter()
        .map(|&n| scan(n, a.samples, a.seed, &bx, mode))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| match e {
            czcap::Error::InvalidParameter(m) => Failure::Usage(m),
            e => Failure::Numeric(e),
        })?;
    let rows: Vec<String> = reports.iter().map(RatioScanReport::csv_row).collect();
    write_csv(cmd, &a.common, RatioScanReport::CSV_HEADER, &rows)?;
    if let Some(r) = reports.iter().find(|r| r.negative_count > 0) {
        return Err(Failure::Invariant(format!(
            "n = {}: {} triples with p1 + p2 < 0",
            r.n, r.negative_count
        )));
    }
    Ok(())
}

fn check_identities(cmd: &Command, a: &IdentityArgs) -> Outcome {
    let suite = identity_suite(a.max_m, a.max_n).map_err(|e| Failure::Usage(e.to_string()))?;
    let pass = suite.all_pass();
    write_json(cmd, &a.common, json!({ "all_pass": pass, "report": suite }))?;
    if !pass {
        return Err(Failure::Invariant("an exact identity failed; see the report".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct EnergyRow {
    n: u32,
    i: usize,
    lhs: f64,
    p_eps: f64,
    residual: f64,
    normalized_residual: f64,
}

#[derive(Serialize)]
struct PermRow {
    n: u32,
    p_sum: f64,
    ratio_to_curvature: Option<f64>,
    transform_norm: Option<f64>,
}

fn energy(cmd: &Command, a: &EnergyArgs) -> Outcome {
    let mu = load_measure(&a.input, a.h)?;
    if mu.len() > czcap::meascurv::MAX_ATOMS {
        return Err(Failure::Usage(format!(
            "{} atoms exceed the cap of {}",
            mu.len(),
            czcap::meascurv::MAX_ATOMS
        )));
    }
    let eps = a.eps.unwrap_or_else(|| mu.default_eps());
    let c2 = curvature_energy(&mu, eps)?;
    let mut rows = Vec::new();
    let mut perms = Vec::new();
    for &n in &a.n {
        for i in 1..=2 {
            let r = l2_identity_report(i, n, &mu, eps)?;
            rows.push(EnergyRow {
                n,
                i,
                lhs: r.lhs,
                p_eps: r.p_eps,
                residual: r.residual,
                normalized_residual: r.normalized_residual(),
            });
        }
        let specs = [KernelSpec::odd_power(1, n), KernelSpec::odd_power(2, n)];
        let p = perm_energy(&specs, &mu, eps)?;
        let norm = if a.iters > 0 {
            Some(transform_norm(&specs, &mu, eps, a.iters, a.seed)?)
        } else {
            None
        };
        perms.push(PermRow {
            n,
            p_sum: p,
            ratio_to_curvature: (c2 > 0.0).then(|| p / c2),
            transform_norm: norm,
        });
    }
    let body = json!({
        "atoms": mu.len(),
        "mass": mu.mass(),
        "eps": eps,
        "growth_constant": growth_constant(&mu),
        "curvature_energy": c2,
        "l2": rows,
        "permutation": perms,
    });
    write_json(cmd, &a.common, body)?;
    let scale = c2.abs().max(f64::MIN_POSITIVE);
    if let Some(p) = perms.iter().find(|p| p.p_sum < -1e-9 * scale) {
        return Err(Failure::Invariant(format!("negative permutation energy {} at n = {}", p.p_sum, p.n)));
    }
    Ok(())
}

fn strip(mut e: CapacityEstimate, witness: bool) -> CapacityEstimate {
    if !witness {
        e.witness = None;
    }
    e
}

fn capacity(cmd: &Command, a: &CapacityArgs) -> Outcome {
    let text = read(&a.input)?;
    let run = CapacityRun::<f64>::from_json(&text).map_err(usage(&a.input))?;
    let p = run.problem().map_err(usage(&a.input))?;
    let e = estimate(&p)?;
    let gap_ok = e.duality_gap <= 1e-7 * (1.0 + e.value.abs());
    write_json(cmd, &a.common, json!({ "run": run, "estimate": strip(e, a.witness) }))?;
    if !gap_ok {
        return Err(Failure::Invariant("duality gap above tolerance".into()));
    }
    Ok(())
}

fn compare(cmd: &Command, a: &CompareArgs) -> Outcome {
    let desc = load_set(&a.set)?;
    let disc = generate(&desc, a.h).map_err(usage(&a.set))?;
    let ests: Vec<Estimator> = match desc.dim() {
        2 => {
            let mut v = vec![Estimator::Plus, Estimator::NPlus { n: a.n }];
            if let Some(m) = a.m {
                v.push(Estimator::NmPlus { n: a.n, m });
            }
            v.push(Estimator::Single { n: a.n, i: 1 });
            v.push(Estimator::Single { n: a.n, i: 2 });
            v
        }
        3 => vec![
            Estimator::RieszPlus,
            Estimator::HatKPlus { k: 1 },
            Estimator::HatKPlus { k: 2 },
            Estimator::HatKPlus { k: 3 },
        ],
        d => return Err(Failure::Usage(format!("compare supports sets in R^2 and R^3, not R^{d}"))),
    };
    let results = ests.iter().map(|e| e.on(&disc)).collect::<Result<Vec<_>, _>>()?;
    let base = results[0].value;
    let rows: Vec<String> = ests
        .iter()
        .zip(&results)
        .map(|(est, e)| {
            let ratio = if base > 0.0 { e.value / base } else { f64::NAN };
            format!(
                "{},{},{},{},{},{},{}",
                est.label(),
                e.value,
                ratio,
                kernel_set_name(&e.kernels),
                e.leakage,
                e.duality_gap,
                e.support_size
            )
        })
        .collect();
    write_csv(
        cmd,
        &a.common,
        "kernel-set,value,ratio-to-gamma-plus,kernels,leakage,duality_gap,support_size",
        &rows,
    )?;
    // Dropping kernels from the list never lowers the optimum.
    if results[1..].iter().any(|e| e.value < base * (1.0 - 1e-9)) && desc.dim() == 3 {
        return Err(Failure::Invariant("a hat-k estimate fell below the full estimate".into()));
    }
    Ok(())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v[v.len() / 2]
}

fn ahlfors(cmd: &Command, a: &AhlforsArgs) -> Outcome {
    let mu = load_measure(&a.input, a.h)?;
    let thetas = theta_values(&mu);
    let med = if thetas.is_empty() { 0.0 } else { median(thetas) };
    let threshold = match a.threshold {
        Some(m) => m,
        None if med > 0.0 => 100.0 * med,
        None => return Err(Failure::Usage("a single atom has no density profile; pass --M".into())),
    };
    let min_radius = a.min_radius.unwrap_or_else(|| mu.default_eps());
    let report = non_ahlfors_mass(&mu, threshold, min_radius).map_err(|e| Failure::Usage(e.to_string()))?;
    let body = json!({
        "atoms": mu.len(),
        "mass": mu.mass(),
        "median_theta": med,
        "threshold": threshold,
        "min_radius": min_radius,
        "report": report,
    });
    write_json(cmd, &a.common, body)?;
    if report.covered_mass > mu.mass() {
        return Err(Failure::Invariant("covered mass exceeds the total mass".into()));
    }
    Ok(())
}
