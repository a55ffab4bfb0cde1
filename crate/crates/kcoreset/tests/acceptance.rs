//! Acceptance run for criteria 1-9. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails. Pass criterion numbers as arguments (or in
//! `KCORESET_ACCEPTANCE`, comma separated) to run a subset.

use std::time::{Duration, Instant};

use kcoreset::experiments::{self, median, size_floor_check, ExperimentSpec};
use kcoreset::gen::{generate, Generator};
use kcoreset::io::write_points;
use kcoreset_core::discrepancy::{chernoff_bound, color_from_matching, disc_at, hoeffding, sum_delta_sq};
use kcoreset_core::matching::{
    annulus_length_pow, clipped_length_pow, min_cost_matching_bruteforce, min_cost_matching_exact, rho_annulus,
    rho_ball, Annulus,
};
use kcoreset_core::net::{build_net_with, NetOptions};
use kcoreset_core::rng::{derive_seed, stream};
use kcoreset_core::{Ball, KernelSpec, Point, PointSet};
use rand::Rng;
use serde_json::Value;

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn uniform(rng: &mut impl Rng, n: usize, dim: usize, lo: f64, hi: f64) -> PointSet {
    let coords = (0..n * dim).map(|_| rng.random_range(lo..hi)).collect();
    PointSet::from_flat(dim, coords).unwrap()
}

fn c1_matching_oracle() -> Outcome {
    let mut rng = stream(SEED, "c1", 0);
    let mut worst = 0.0f64;
    let mut count = 0;
    for trial in 0..200 {
        let dim = 2 + trial % 2;
        let n = [4, 6, 8, 10][(trial / 2) % 4];
        let ps = uniform(&mut rng, n, dim, 0.0, 1.0);
        let exact = min_cost_matching_exact(&ps).unwrap();
        let brute = min_cost_matching_bruteforce(&ps).unwrap();
        worst = worst.max((exact.cost - brute.cost).abs());
        count += 1;
    }
    outcome(worst <= 1e-9, format!("{count} instances, max |exact - brute| = {worst:.3e}"))
}

fn c2_ball_length() -> Outcome {
    let ball = Ball::new(Point::origin(2), 1.0).unwrap();
    let mut medians = Vec::new();
    for n in [64usize, 256, 1024, 4096] {
        let vals: Vec<f64> = (0..20)
            .map(|t| {
                let ps = generate(&Generator::UniformDisk, n, 2, derive_seed(SEED, "c2", ((n as u64) << 8) | t)).unwrap();
                let m = min_cost_matching_exact(&ps).unwrap();
                rho_ball(&ball, &m, &ps).unwrap()
            })
            .collect();
        medians.push((n, median(&vals)));
    }
    let m256 = medians[1].1;
    let m4096 = medians[3].1;
    let ratio = m4096 / m256;
    let list: Vec<String> = medians.iter().map(|(n, m)| format!("n={n}: {m:.4}")).collect();
    outcome(ratio <= 1.5, format!("median rho {}; ratio 4096/256 = {ratio:.3}", list.join(", ")))
}

fn c3_chernoff() -> Outcome {
    const N: usize = 10_000;
    let kernel = KernelSpec::gaussian(2);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut checks = 0;
    for inst in 0..20u64 {
        let ps = generate(&Generator::UniformSquare, 64, 2, derive_seed(SEED, "c3", inst)).unwrap();
        let m = min_cost_matching_exact(&ps).unwrap();
        let net = build_net_with(&ps, &kernel, &NetOptions::capped(20_000)).unwrap();
        // the center where the coloring sum has the largest variance
        let probe = color_from_matching(&m, 0);
        let centers = net.centers();
        let x = (0..centers.len())
            .map(|i| (sum_delta_sq(&ps, &probe, &kernel, centers.point(i)), i))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, i)| centers.point(i).to_vec())
            .unwrap();
        let sums: Vec<f64> = (0..N as u64)
            .map(|k| {
                let chi = color_from_matching(&m, derive_seed(SEED, "c3-coloring", (inst << 20) | k));
                disc_at(&ps, &chi, &kernel, &x).unwrap()
            })
            .collect();
        for alpha in [0.5, 1.0, 2.0] {
            let cb = chernoff_bound(&ps, &m, &kernel, &x, alpha).unwrap();
            assert_eq!(cb.bound, hoeffding(cb.sum_delta_sq, alpha));
            let p = sums.iter().filter(|&&s| s >= alpha).count() as f64 / N as f64;
            let b = cb.bound.min(1.0);
            let se = (b * (1.0 - b) / N as f64).sqrt();
            worst_excess = worst_excess.max(p - cb.bound);
            checks += 1;
            if p > cb.bound + 3.0 * se {
                return outcome(
                    false,
                    format!("instance {inst}, alpha {alpha}: tail {p} exceeds bound {} + 3 se {se}", cb.bound),
                );
            }
        }
    }
    outcome(
        true,
        format!("{checks} (instance, alpha) checks over {N} colorings; largest tail minus bound {worst_excess:.4}"),
    )
}

fn run_experiment(json: &str) -> experiments::ExperimentOutput {
    experiments::run(&ExperimentSpec::from_json(json).unwrap()).unwrap()
}

fn assertion_summary(out: &experiments::ExperimentOutput) -> String {
    out.summary
        .assertions
        .iter()
        .map(|a| format!("{} = {:.3} ({} {})", a.name, a.value, a.comparison, a.threshold))
        .collect::<Vec<_>>()
        .join("; ")
}

fn c4_growth() -> Outcome {
    let out = run_experiment(&format!(
        r#"{{"experiment": "disc_growth", "generator": {{"name": "uniform-square"}}, "dim": 2,
            "n_grid": [64, 256, 1024, 4096], "kernels": ["gaussian", "triangle"], "trials": 20,
            "seed": {SEED}, "matching": "exact", "max_centers": 100000}}"#
    ));
    let expected = ["slope_matching/gaussian", "slope_random/gaussian", "slope_matching/triangle", "slope_random/triangle"];
    let present = expected
        .iter()
        .all(|name| out.summary.assertions.iter().any(|a| a.name == *name));
    outcome(
        out.summary.passed && present,
        format!("exact matching at every n; {}", assertion_summary(&out)),
    )
}

fn c5_certification() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for eps in [0.1, 0.05, 0.02] {
        let bound = 4.0 / eps * (1.0f64 / eps).ln().max(1.0).sqrt();
        let mut passes = 0;
        let mut sizes = Vec::new();
        let mut errors = Vec::new();
        for run in 0..5u64 {
            let seed = derive_seed(SEED, "c5", run);
            let points = generate(&Generator::UniformSquare, 4096, 2, seed).unwrap();
            let path = dir.path().join(format!("p{run}.csv"));
            write_points(&path, &points).unwrap();
            let args = [
                "kcoreset".to_string(),
                "--quiet".into(),
                "--seed".into(),
                seed.to_string(),
                "sample".into(),
                path.to_str().unwrap().into(),
                "--eps".into(),
                eps.to_string(),
                "--verify".into(),
            ];
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = kcoreset::cli::dispatch(args, &mut out, &mut err);
            let v: Value = serde_json::from_slice(&out).expect("sample prints JSON");
            let value = v["linf"]["value"].as_f64().unwrap();
            let size = v["size"].as_u64().unwrap() as f64;
            assert_eq!(code == 0, value <= eps, "exit code follows the verification");
            passes += usize::from(value <= eps);
            ok &= size <= bound;
            sizes.push(size);
            errors.push(format!("{value:.4}"));
        }
        ok &= passes >= 4;
        lines.push(format!(
            "eps={eps}: {passes}/5 within eps (L-inf {}), sizes {:?} <= {bound:.1}",
            errors.join(" "),
            sizes
        ));
    }
    outcome(ok, lines.join("; "))
}

fn c6_frontier() -> Outcome {
    let out = run_experiment(&format!(
        r#"{{"experiment": "eps_frontier", "generator": {{"name": "uniform-square"}}, "dim": 2,
            "n_grid": [4096], "eps_grid": [0.1, 0.05, 0.02, 0.01], "kernels": ["gaussian"],
            "seed": {SEED}, "max_centers": 200000, "probe_trials": 5, "probe_accept": 4}}"#
    ));
    let sizes: Vec<String> = out
        .summary
        .metrics
        .iter()
        .filter(|(k, _)| k.contains("required_size"))
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let slopes_ok = ["halving_size_slope", "random_size_slope"]
        .iter()
        .all(|name| out.summary.assertions.iter().any(|a| a.name == *name && a.passed));
    outcome(slopes_ok, format!("{}; {}", assertion_summary(&out), sizes.join(", ")))
}

fn c7_size_floor() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for kernel in [KernelSpec::gaussian(2), KernelSpec::triangle(2)] {
        for eps in [0.2, 0.1, 0.05] {
            let f = size_floor_check(eps, &kernel, SEED, 1.0).unwrap();
            ok &= f.passed();
            lines.push(format!(
                "{kernel} eps={eps}: t={}, {} undersized samples ({}), min L-inf {:.4}, halving kept {}/{} sites",
                f.sites,
                f.checked,
                if f.exhaustive { "all" } else { "one per missing site and size" },
                f.min_undersized_linf,
                f.halving_sites_kept,
                f.sites
            ));
        }
    }
    outcome(ok, lines.join("; "))
}

fn c8_delta_kernel() -> Outcome {
    let out = run_experiment(&format!(
        r#"{{"experiment": "delta_kernel", "generator": {{"name": "isolated-point"}}, "dim": 2,
            "n_grid": [9], "eta_grid": [1, 2, 4, 8, 10], "kernels": ["gaussian"], "seed": {SEED},
            "max_centers": 20000}}"#
    ));
    let values: Vec<String> = out
        .summary
        .metrics
        .iter()
        .filter(|(k, _)| k.starts_with("min_disc"))
        .map(|(k, v)| format!("{k}: {v:.4}"))
        .collect();
    outcome(out.summary.passed, format!("{}; {}", assertion_summary(&out), values.join(", ")))
}

fn c9_annulus() -> Outcome {
    let mut rng = stream(SEED, "c9", 0);
    let mut worst = f64::NEG_INFINITY;
    let mut nonzero = 0;
    for trial in 0..500 {
        let dim = 2 + trial % 2;
        let center = Point::new((0..dim).map(|_| rng.random_range(-0.5..0.5)).collect()).unwrap();
        let inner = rng.random_range(0.0..1.0);
        let outer = inner + rng.random_range(0.01..1.0);
        let annulus = Annulus::new(center.clone(), inner, outer).unwrap();
        let big = Ball::new(center.clone(), outer).unwrap();
        // single segment
        let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let lhs = annulus_length_pow(&annulus, &a, &b);
        let rhs = clipped_length_pow(&big, &a, &b)
            - if inner > 0.0 {
                clipped_length_pow(&Ball::new(center.clone(), inner).unwrap(), &a, &b)
            } else {
                0.0
            };
        worst = worst.max(lhs - rhs);
        nonzero += usize::from(lhs > 0.0);
        // whole min-cost matchings
        let ps = uniform(&mut rng, 12, dim, -1.5, 1.5);
        let m = min_cost_matching_exact(&ps).unwrap();
        let lhs = rho_annulus(&annulus, &m, &ps).unwrap();
        let inner_rho = if inner > 0.0 {
            rho_ball(&Ball::new(center.clone(), inner).unwrap(), &m, &ps).unwrap()
        } else {
            0.0
        };
        worst = worst.max(lhs - (rho_ball(&big, &m, &ps).unwrap() - inner_rho));
    }
    outcome(
        worst <= 1e-9,
        format!("500 segment and 500 matching configurations ({nonzero} segments meet the annulus); max violation {worst:.3e}"),
    )
}

type Criterion = (usize, &'static str, Duration, fn() -> Outcome);

fn main() {
    let minutes = |m: u64| Duration::from_secs(60 * m);
    let criteria: [Criterion; 9] = [
        (1, "matching oracle equivalence", minutes(1), c1_matching_oracle),
        (2, "ball length boundedness", minutes(10), c2_ball_length),
        (3, "tail bound soundness", minutes(5), c3_chernoff),
        (4, "discrepancy growth contrast", minutes(30), c4_growth),
        (5, "eps-sample certification", minutes(20), c5_certification),
        (6, "baseline separation", minutes(45), c6_frontier),
        (7, "size floor", minutes(1), c7_size_floor),
        (8, "delta-kernel blowup", minutes(2), c8_delta_kernel),
        (9, "annulus superadditivity", minutes(1), c9_annulus),
    ];
    let mut selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if selected.is_empty() {
        if let Ok(list) = std::env::var("KCORESET_ACCEPTANCE") {
            selected = list.split(',').filter_map(|s| s.trim().parse().ok()).collect();
        }
    }
    let mut failures = 0;
    for (id, name, budget, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = result.passed && in_time;
        failures += usize::from(!passed);
        println!(
            "criterion {id} ({name}): {} [{:.1}s of {}s]: {}{}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            result.detail,
            if in_time { "" } else { " (over time budget)" }
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
