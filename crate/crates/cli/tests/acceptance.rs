//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use spiroplanck::coverage::{coverage_binomial, coverage_poisson, density, le_cam_bound, p_r, total_variation};
use spiroplanck::curve::{generate_curve, spirograph_point, SpirographParams};
use spiroplanck::oracle::{simulate_sequential, Topology, TrialConfig};
use spiroplanck::planner::{run, Outcome, PlannerConfig};
use spiroplanck::radiometry::{
    argmax, listing_grid, local_maxima, spectral_curve, spectral_radiance, PhysicalConstants, SpectralForm,
    SpectralParams, REFERENCE_TEMPERATURES,
};
use spiroplanck::{FieldSpec64, PlannerConfig64};
use spiroplanck_cli::bench;
use spiroplanck_cli::commands::{execute, manifest_path, replay, Command};
use spiroplanck_cli::config::Config;

type Check = std::result::Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within_budget(elapsed: Duration, budget: Duration) -> std::result::Result<(), String> {
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))
}

fn planner_benchmark() -> Check {
    let start = Instant::now();
    let config: PlannerConfig64 = PlannerConfig::benchmark();
    let curve = generate_curve(&config.curve).map_err(|e| e.to_string())?;
    let distinct: std::collections::HashSet<_> = curve
        .iter()
        .map(|p| spiroplanck::curve::quantize(p, config.epsilon).unwrap())
        .collect();
    ensure(distinct.len() >= 400, || format!("only {} distinct curve points", distinct.len()))?;
    let result = run(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    // independent iteration of (1 - e^{-cN})^N
    let c = std::f64::consts::PI * 49.0 / 1e4;
    let p = |n: f64| (1.0 - (-c * n).exp()).powf(n);
    let oracle_n = (1..10_000).find(|&n| p(n as f64) >= 0.1).unwrap();

    ensure(result.outcome == Outcome::Converged, || format!("outcome {}", result.outcome))?;
    ensure(result.n_final == 321 && oracle_n == 321, || {
        format!("n_final {} oracle {}", result.n_final, oracle_n)
    })?;
    ensure((0.1000..=0.1005).contains(&result.p_final), || format!("p_final {}", result.p_final))?;
    ensure((result.p_final - p(321.0)).abs() < 1e-12, || "p_final disagrees with oracle".into())?;
    ensure(p(320.0) < 0.1, || format!("p(320) = {}", p(320.0)))?;
    within_budget(elapsed, Duration::from_secs(1))?;
    Ok(format!("n_final=321 p_final={:.6} p(320)={:.6} in {elapsed:.2?}", result.p_final, p(320.0)))
}

fn monte_carlo() -> Check {
    let config = TrialConfig {
        field: FieldSpec64::benchmark(),
        n_nodes: 321,
        trials: 10_000,
        seed: 2012,
        topology: Topology::Torus,
    };
    let start = Instant::now();
    let stats = simulate_sequential(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure((0.08..=0.12).contains(&stats.p_no_isolated), || {
        format!("p_no_isolated {}", stats.p_no_isolated)
    })?;
    ensure((2.0..=2.6).contains(&stats.mean_isolated_count), || {
        format!("mean_isolated_count {}", stats.mean_isolated_count)
    })?;
    within_budget(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "p_no_isolated={:.4} mean_isolated={:.3} in {elapsed:.2?}",
        stats.p_no_isolated, stats.mean_isolated_count
    ))
}

fn binomial_poisson() -> Check {
    let start = Instant::now();
    let field = FieldSpec64::benchmark();
    let n_nodes = 101;
    let b = coverage_binomial(&field, n_nodes).map_err(|e| e.to_string())?;
    let pr = p_r(&field).map_err(|e| e.to_string())?;

    // exact pmf by the ratio recurrence from (1-p)^m
    let m = n_nodes - 1;
    let mut oracle = vec![(1.0 - pr).powi(m as i32)];
    for k in 1..=m {
        let prev = oracle[k - 1];
        oracle.push(prev * (m - k + 1) as f64 / k as f64 * pr / (1.0 - pr));
    }
    let worst = b.mass.iter().zip(&oracle).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure(b.mass.len() == oracle.len() && worst <= 1e-12, || format!("max pmf error {worst:e}"))?;
    let total: f64 = b.mass.iter().sum();
    ensure((total - 1.0).abs() <= 1e-9, || format!("sum {total}"))?;

    let lambda = density(&field, n_nodes);
    let poisson = coverage_poisson(lambda, m).map_err(|e| e.to_string())?;
    let tv = total_variation(&b.mass, &poisson.mass);
    let bound = le_cam_bound(m, pr);
    ensure(tv <= bound, || format!("tv {tv} > bound {bound}"))?;
    ensure((bound - 0.0237).abs() < 5e-5, || format!("bound {bound}"))?;
    within_budget(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("max error {worst:.1e}, TV={tv:.5} <= Le Cam {bound:.5}"))
}

fn planck_curves() -> Check {
    let start = Instant::now();
    let grid: Vec<f64> = listing_grid();
    let curves = REFERENCE_TEMPERATURES
        .iter()
        .map(|&t| {
            spectral_curve(&SpectralParams {
                grid: grid.clone(),
                ..SpectralParams::new(t)
            })
        })
        .collect::<spiroplanck::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;

    for (t, c) in REFERENCE_TEMPERATURES.iter().zip(&curves) {
        let values: Vec<f64> = c.iter().map(|p| p.1).collect();
        let peak = argmax(c).unwrap();
        let rises = values[..=peak].windows(2).all(|w| w[0] <= w[1]);
        let falls = values[peak..].windows(2).all(|w| w[0] >= w[1]);
        ensure(local_maxima(&values) == 1 && rises && falls, || format!("T={t} not unimodal"))?;
    }
    for pair in curves.windows(2) {
        let ok = pair[0].iter().zip(&pair[1]).all(|(lo, hi)| lo.1 <= hi.1);
        ensure(ok, || "not monotone in temperature".into())?;
    }
    let peak_nm = curves[1][argmax(&curves[1]).unwrap()].0 * 1e9;
    ensure((peak_nm - 483.5).abs() <= 10.0, || format!("T=6000 argmax at {peak_nm} nm"))?;
    let v: f64 = spectral_radiance(500e-9, 6000.0, &PhysicalConstants::rounded(), SpectralForm::Radiance)
        .map_err(|e| e.to_string())?;
    ensure(((v - 9.94e13) / 9.94e13).abs() <= 0.01, || format!("P(500 nm) = {v:e}"))?;
    within_budget(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("argmax {peak_nm:.0} nm, P(500 nm, 6000 K) = {v:.4e}"))
}

fn spirograph() -> Check {
    let start = Instant::now();
    let params: SpirographParams<f64> = SpirographParams::figure_one();
    let origin = spirograph_point(&params, 0.0).map_err(|e| e.to_string())?;
    ensure(origin.x == 165.0 && origin.y == 0.0, || format!("point(0) = ({}, {})", origin.x, origin.y))?;
    let curve = generate_curve(&params).map_err(|e| e.to_string())?;
    let period = 4.0 * std::f64::consts::PI;
    let mut worst = 0.0f64;
    for p in &curve {
        let q = spirograph_point(&params, p.t + period).unwrap();
        worst = worst.max((p.x - q.x).abs()).max((p.y - q.y).abs());
        ensure(p.x * p.x + p.y * p.y <= 275.0 * 275.0, || format!("point at t={} outside 275", p.t))?;
    }
    ensure(worst <= 1e-9, || format!("period mismatch {worst:e}"))?;
    within_budget(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{} points, period error {worst:.1e}", curve.len()))
}

fn table_round_trip(dir: &std::path::Path) -> Check {
    let start = Instant::now();
    execute(Command::Bench, Config::default(), dir).map_err(|e| e.to_string())?;
    let echoed = std::fs::read_to_string(dir.join("bench.csv")).map_err(|e| e.to_string())?;
    let first = bench::parse(&echoed, "bench.csv").map_err(|e| e.to_string())?;
    let second = bench::parse(&bench::render(&first), "re-emitted").map_err(|e| e.to_string())?;
    let overhead = |rows: &[bench::ReferenceRow]| -> Vec<u64> {
        rows.iter()
            .flat_map(|r| [r.pt_mpt_simulation, r.pt_mpt_emulation, r.spiroplanck])
            .collect()
    };
    let expected = [41, 19, 9, 115, 63, 13, 250, 109, 18, 432, 204, 25, 712, 458, 45];
    ensure(overhead(&first) == expected && overhead(&second) == expected, || {
        format!("values {:?}", overhead(&second))
    })?;
    let nodes: Vec<u64> = second.iter().map(|r| r.nodes).collect();
    ensure(nodes == [10, 15, 20, 25, 30], || format!("nodes {nodes:?}"))?;
    within_budget(start.elapsed(), Duration::from_secs(1))?;
    Ok("15 values echoed exactly".into())
}

fn determinism(dir: &std::path::Path) -> Check {
    let first = dir.join("first");
    let second = dir.join("second");
    let cases = [
        (Command::Plan, &["placement.csv", "trace.csv"][..]),
        (Command::MonteCarlo, &["montecarlo.csv", "montecarlo_histogram.csv"][..]),
    ];
    let mut compared = 0;
    for (command, files) in cases {
        execute(command, Config::default(), &first).map_err(|e| e.to_string())?;
        replay(&manifest_path(&first, command), &second).map_err(|e| e.to_string())?;
        for f in files {
            let a = std::fs::read(first.join(f)).map_err(|e| e.to_string())?;
            let b = std::fs::read(second.join(f)).map_err(|e| e.to_string())?;
            ensure(!a.is_empty() && a == b, || format!("{f} differs on rerun"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} CSV files byte-identical after manifest rerun"))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let criteria: [Criterion; 7] = [
        ("1 planner benchmark", Box::new(planner_benchmark)),
        ("2 monte carlo vs isolation formula", Box::new(monte_carlo)),
        ("3 binomial/poisson agreement", Box::new(binomial_poisson)),
        ("4 planck curves", Box::new(planck_curves)),
        ("5 spirograph fidelity", Box::new(spirograph)),
        ("6 reference table round trip", Box::new(|| table_round_trip(&dir.path().join("bench")))),
        ("7 manifest determinism", Box::new(|| determinism(&dir.path().join("determinism")))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
