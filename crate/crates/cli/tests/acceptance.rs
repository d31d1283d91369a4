//! Acceptance suite: one pass/fail line per criterion.
//!
//! The process exits 0 after reporting so the remaining workspace tests
//! still run; set `ACCEPTANCE_STRICT=1` to turn any failure into a
//! nonzero exit.

use std::time::{Duration, Instant};

use mott_kinetics::dynamics::{
    integrate, rk4_step, stationarity_residual, IntegratorConfig, Trajectory,
};
use mott_kinetics::oracle::{
    bump_rate, check_brute_force, check_strong_limit, check_weak_limit, rate_scaling_at_gap_minimum,
};
use mott_kinetics::scenarios::{make_equilibrium, make_pump_bump, probe_state};
use mott_kinetics::{
    build_grid, DistributionState, KernelConfig, ModelParams, MomentumGrid, Regime, RhsEvaluator,
};
use mott_kinetics_cli::validate::{fmt_series, spectrum_checks, strictly_decreasing};
use mott_kinetics_cli::{parse_config, run};

// Fixed-point criterion.
const FIXED_POINT_RESIDUAL: f64 = 1e-10;
const FIXED_POINT_MOTION: f64 = 1e-8;
const FIXED_POINT_BUDGET: Duration = Duration::from_secs(30);

// Entropy, conservation and kinetic-drift criteria.
const ENTROPY_SLACK: f64 = 1e-9;
const ENTROPY_BUDGET: Duration = Duration::from_secs(120);
const SPECIES_DRIFT: f64 = 1e-8;
const KINETIC_RATIO: f64 = 1.5;
/// Drift below this is round-off, not broadening.
const KINETIC_RESOLUTION: f64 = 1e-12;

// Limit checks.
const LIMIT_RMS: f64 = 0.05;
const STRONG_LIMIT_ETA: f64 = 0.2;
const WEAK_LIMIT_ETA: f64 = 0.02;

// Gap-minimum relaxation.
const EXPONENT_RANGE: (f64, f64) = (1.5, 2.5);
const EDGE_RATIO: f64 = 10.0;

const BRUTE_FORCE_TOLERANCE: f64 = 1e-13;
const BRUTE_FORCE_STATES: u64 = 20;

const ORDER_TARGET: f64 = 4.0;
const ORDER_SLACK: f64 = 0.3;

const STRONG_U: f64 = 20.0;
const STRONG_ETA: f64 = 0.2;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn grid(u: f64, sizes: &[usize]) -> MomentumGrid {
    build_grid(ModelParams::with_u(u, sizes.len()).unwrap(), sizes).unwrap()
}

fn strong(eta: f64) -> KernelConfig {
    KernelConfig::new(Regime::Strong, eta).unwrap()
}

fn quiet(dt: f64, t_final: f64, output_every: usize) -> IntegratorConfig {
    IntegratorConfig {
        output_every,
        ddot: false,
        ..IntegratorConfig::new(dt, t_final).unwrap()
    }
}

fn evolve(
    state: DistributionState,
    evaluator: &RhsEvaluator<'_>,
    config: &IntegratorConfig,
) -> Trajectory {
    integrate(state, evaluator, config, |_, _, _| {
        Ok::<(), mott_kinetics::Error>(())
    })
    .unwrap()
}

fn fixed_point() -> Outcome {
    let start = Instant::now();
    let g = grid(STRONG_U, &[8, 8]);
    let ev = RhsEvaluator::new(&g, strong(STRONG_ETA)).unwrap();
    let state = make_equilibrium(&g, 2.0, -2.0, 1.0);
    let residual = stationarity_residual(&state, &ev).unwrap();
    let run = evolve(state.clone(), &ev, &quiet(0.01, 1.0, 100));
    let moved = run.final_state.sup_distance(&state);
    let elapsed = start.elapsed();
    Outcome::new(
        residual < FIXED_POINT_RESIDUAL && moved < FIXED_POINT_MOTION && elapsed < FIXED_POINT_BUDGET,
        format!(
            "residual {residual:.3e} (< {FIXED_POINT_RESIDUAL:e}), moved {moved:.3e} in {} steps (< {FIXED_POINT_MOTION:e}), {:.1?}",
            run.steps, elapsed
        ),
    )
}

struct PumpRun {
    trajectory: Trajectory,
    elapsed: Duration,
}

fn pump_run(eta: f64) -> PumpRun {
    let start = Instant::now();
    let g = grid(STRONG_U, &[8, 8]);
    let ev = RhsEvaluator::new(&g, strong(eta)).unwrap();
    let state = make_pump_bump(&g, 0.5, 0.2, 0.3).unwrap();
    let trajectory = evolve(state, &ev, &quiet(0.01, 5.0, 1));
    PumpRun {
        trajectory,
        elapsed: start.elapsed(),
    }
}

fn entropy_monotone(run: &PumpRun) -> Outcome {
    let s: Vec<f64> = run.trajectory.records.iter().map(|r| r.entropy).collect();
    let worst = s
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs())
        .fold(f64::INFINITY, f64::min);
    Outcome::new(
        run.trajectory.steps == 500 && worst >= -ENTROPY_SLACK && run.elapsed < ENTROPY_BUDGET,
        format!(
            "{} steps, S {:.6} -> {:.6}, smallest relative step {worst:.3e} (>= -{ENTROPY_SLACK:e}), {:.1?}",
            run.trajectory.steps,
            s[0],
            s[s.len() - 1],
            run.elapsed
        ),
    )
}

fn kinetic_drift(run: &PumpRun) -> f64 {
    let e0 = run.trajectory.records[0].e_kin;
    run.trajectory
        .records
        .iter()
        .map(|r| (r.e_kin - e0).abs())
        .fold(0.0, f64::max)
}

fn conservation(wide: &PumpRun, narrow: &PumpRun) -> Outcome {
    let records = &wide.trajectory.records;
    let first = records[0].counts;
    let species = records
        .iter()
        .flat_map(|r| (0..4).map(move |p| (r.counts[p] - first[p]).abs() / first[p].abs()))
        .fold(0.0, f64::max);
    let (d_wide, d_narrow) = (kinetic_drift(wide), kinetic_drift(narrow));
    let ratio = d_wide / d_narrow;
    let resolved = d_narrow > KINETIC_RESOLUTION;
    let mut detail = format!(
        "species drift {species:.3e} (< {SPECIES_DRIFT:e}); kinetic drift eta=0.2 {d_wide:.3e}, eta=0.1 {d_narrow:.3e}, ratio {ratio:.3} (>= {KINETIC_RATIO})"
    );
    if !resolved {
        detail.push_str(&format!(
            "; drift below round-off resolution {KINETIC_RESOLUTION:e}, not broadening-controlled"
        ));
    }
    Outcome::new(
        species < SPECIES_DRIFT && resolved && ratio >= KINETIC_RATIO,
        detail,
    )
}

fn strong_limit() -> Outcome {
    let g = grid(STRONG_U, &[8, 8]);
    let probe = probe_state(&g, 1);
    let reports = check_strong_limit(
        &g,
        &[20.0, 50.0, 100.0],
        &probe,
        STRONG_LIMIT_ETA,
        LIMIT_RMS,
    )
    .unwrap();
    let rms: Vec<f64> = reports.iter().map(|r| r.rms_rel_diff).collect();
    Outcome::new(
        strictly_decreasing(&rms) && rms[2] <= LIMIT_RMS,
        format!(
            "8x8, eta {STRONG_LIMIT_ETA}, U/J 20,50,100: rms {} (last <= {LIMIT_RMS})",
            fmt_series(&rms)
        ),
    )
}

fn weak_limit() -> Outcome {
    let g = grid(0.1, &[5, 5]);
    let probe = probe_state(&g, 1);
    let report =
        check_weak_limit(&g, &[0.1, 0.03, 0.01], &probe, WEAK_LIMIT_ETA, LIMIT_RMS).unwrap();
    let rms: Vec<f64> = report.reports.iter().map(|r| r.rms_rel_diff).collect();
    Outcome::new(
        strictly_decreasing(&rms) && rms[2] <= LIMIT_RMS,
        format!(
            "5x5, eta {WEAK_LIMIT_ETA}, U/J 0.1,0.03,0.01: rms {} (last <= {LIMIT_RMS}), {} masked",
            fmt_series(&rms),
            report.masked.len()
        ),
    )
}

fn gap_minimum() -> Outcome {
    let g = grid(STRONG_U, &[8, 8]);
    let config = KernelConfig::with_default_eta(Regime::Strong, &g);
    let scaling = rate_scaling_at_gap_minimum(&g, &[0.4, 0.2, 0.1], 0.3, &config).unwrap();
    let exponent = scaling.exponent.unwrap_or(f64::NAN);
    let band_top = g.params().j;
    let edge = bump_rate(&g, band_top, 0.1, 0.3, &config).unwrap();
    let ratio = edge / scaling.rates[2];
    Outcome::new(
        (EXPONENT_RANGE.0..=EXPONENT_RANGE.1).contains(&exponent) && ratio >= EDGE_RATIO,
        format!(
            "8x8, eta {:.4}: exponent {exponent:.3} (in [{}, {}]), edge/gap-minimum rate at width 0.1 {ratio:.3} (>= {EDGE_RATIO})",
            config.eta, EXPONENT_RANGE.0, EXPONENT_RANGE.1
        ),
    )
}

fn brute_force() -> Outcome {
    let g = grid(3.0, &[4, 4]);
    let mut worst = 0.0f64;
    let mut pass = true;
    for regime in [Regime::Strong, Regime::Weak, Regime::General] {
        let config = KernelConfig::new(regime, 0.3).unwrap();
        for report in
            check_brute_force(&g, &config, 0..BRUTE_FORCE_STATES, BRUTE_FORCE_TOLERANCE).unwrap()
        {
            worst = worst.max(report.max_rel_diff);
            pass &= report.pass;
        }
    }
    Outcome::new(
        pass,
        format!("4x4, {BRUTE_FORCE_STATES} states x 3 regimes: worst relative diff {worst:.3e} (<= {BRUTE_FORCE_TOLERANCE:e})"),
    )
}

fn integrator_order() -> Outcome {
    let g = grid(STRONG_U, &[8, 8]);
    let ev = RhsEvaluator::new(&g, strong(STRONG_ETA)).unwrap();
    let initial = make_pump_bump(&g, 0.5, 0.2, 0.3).unwrap();
    let rhs = |s: &DistributionState| ev.evaluate(s);
    let t_final = 1.0;
    let solve = |dt: f64| {
        let mut s = initial.clone();
        for _ in 0..(t_final / dt).round() as usize {
            s = rk4_step(&s, &rhs, dt).unwrap();
        }
        s
    };
    let dt = 0.1;
    let (a, b, c) = (solve(dt), solve(dt / 2.0), solve(dt / 4.0));
    let (e1, e2) = (a.sup_distance(&b), b.sup_distance(&c));
    let order = (e1 / e2).log2();
    Outcome::new(
        (order - ORDER_TARGET).abs() <= ORDER_SLACK,
        format!(
            "dt {dt}, {}, {}: differences {e1:.3e}, {e2:.3e}, order {order:.3}",
            dt / 2.0,
            dt / 4.0
        ),
    )
}

fn spectrum() -> Outcome {
    let cases: [(f64, &[usize]); 6] = [
        (20.0, &[8, 8]),
        (0.5, &[6, 6]),
        (7.0, &[5, 5]),
        (3.0, &[4, 4, 4]),
        (1.0, &[12, 4]),
        (100.0, &[7, 10]),
    ];
    let mut failed = Vec::new();
    let mut gaps = 0;
    for (u, sizes) in cases {
        for check in spectrum_checks(&grid(u, sizes)) {
            gaps += check.name.contains("min gap") as usize;
            if !check.pass {
                failed.push(format!("{} ({})", check.name, check.detail));
            }
        }
    }
    let detail = if failed.is_empty() {
        format!(
            "{} grids, residuals < 1e-12, min gap = U on {gaps} grids with J_k = 0",
            cases.len()
        )
    } else {
        failed.join("; ")
    };
    Outcome::new(failed.is_empty() && gaps > 0, detail)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in [1, 4, 8] {
        let out = dir.path().join(format!("threads_{threads}"));
        let text = serde_json::json!({
            "model": {"U": 20.0, "dim": 2, "grid_sizes": [8, 8]},
            "kernel": {"regime": "strong"},
            "init": {"kind": "pump_bump", "center": 0.0, "width": 0.2, "amplitude": 0.3},
            "integrate": {"dt": 0.01, "t_final": 0.2, "output_every": 2},
            "output": {"directory": out},
            "threads": threads
        })
        .to_string();
        let summary = run(&parse_config(&text).unwrap()).unwrap();
        outputs.push(std::fs::read(summary.trajectory).unwrap());
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    Outcome::new(
        identical,
        format!(
            "threads 1, 4, 8: {} bytes each, identical = {identical}",
            outputs[0].len()
        ),
    )
}

fn main() {
    // Ignore libtest arguments such as filters passed by `cargo test`.
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |id: u32, name: &'static str, outcome: Outcome| {
        println!(
            "criterion {id:>2} {} {name}: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
        results.push((id, name, outcome));
    };

    report(1, "detailed-balance fixed point", fixed_point());
    let wide = pump_run(STRONG_ETA);
    report(2, "H-theorem", entropy_monotone(&wide));
    let narrow = pump_run(0.1);
    report(3, "conservation", conservation(&wide, &narrow));
    report(4, "strong-limit equivalence", strong_limit());
    report(5, "weak-limit equivalence", weak_limit());
    report(6, "gap-minimum slow relaxation", gap_minimum());
    report(7, "oracle bit-equality", brute_force());
    report(8, "integrator order", integrator_order());
    report(9, "spectrum correctness", spectrum());
    report(10, "determinism", determinism());

    let passed = results.iter().filter(|r| r.2.pass).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.1?}",
        results.len(),
        start.elapsed()
    );
    if passed < results.len() && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
