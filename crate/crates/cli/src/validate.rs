//! Oracle suite behind the `validate` subcommand.

use mott_kinetics::oracle::{
    check_brute_force, check_strong_limit, check_weak_limit, rate_scaling_at_gap_minimum,
};
use mott_kinetics::scenarios::probe_state;
use mott_kinetics::{build_grid, KernelConfig, ModelParams, MomentumGrid, Regime, SpectralTable};

/// Tolerances and settings for the suite.
pub const BRUTE_FORCE_TOLERANCE: f64 = 1e-13;
pub const SPECTRAL_TOLERANCE: f64 = 1e-12;
pub const LIMIT_TOLERANCE: f64 = 0.05;
pub const STRONG_LIMIT_ETA: f64 = 0.2;
pub const WEAK_LIMIT_ETA: f64 = 0.02;
pub const SCALING_EXPONENT: (f64, f64) = (1.5, 2.5);

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            detail: detail.into(),
            pass,
        }
    }
}

fn square(u: f64, n: usize) -> mott_kinetics::Result<MomentumGrid> {
    build_grid(ModelParams::with_u(u, 2)?, &[n, n])
}

pub fn spectrum_checks(grid: &MomentumGrid) -> Vec<Check> {
    let table = SpectralTable::strong(grid);
    let label = format!("spectrum {:?} U={}", grid.sizes(), grid.params().u);
    let orth = table.max_orthogonality_error();
    let eig = table.max_eigen_residual();
    let mut checks = vec![Check::new(
        label.clone(),
        orth < SPECTRAL_TOLERANCE && eig < SPECTRAL_TOLERANCE,
        format!("orthogonality {orth:.2e}, eigen residual {eig:.2e}"),
    )];
    if !grid.zero_dispersion_points().is_empty() {
        let gap = table.min_gap();
        checks.push(Check::new(
            format!("{label} min gap"),
            gap == grid.params().u,
            format!("min gap {gap}"),
        ));
    }
    checks
}

pub fn brute_force_checks(seeds: u64) -> mott_kinetics::Result<Vec<Check>> {
    let grid = square(3.0, 4)?;
    let mut checks = Vec::new();
    for regime in [Regime::Strong, Regime::Weak, Regime::General] {
        let config = KernelConfig::new(regime, 0.3)?;
        let reports = check_brute_force(&grid, &config, 0..seeds, BRUTE_FORCE_TOLERANCE)?;
        let worst = reports.iter().map(|r| r.max_rel_diff).fold(0.0, f64::max);
        checks.push(Check::new(
            format!("brute force {regime:?} 4x4").to_lowercase(),
            reports.iter().all(|r| r.pass),
            format!("{seeds} states, worst relative diff {worst:.2e}"),
        ));
    }
    Ok(checks)
}

pub fn limit_checks() -> mott_kinetics::Result<Vec<Check>> {
    let mut checks = Vec::new();

    let grid = square(20.0, 8)?;
    let probe = probe_state(&grid, 1);
    let reports = check_strong_limit(
        &grid,
        &[20.0, 50.0, 100.0],
        &probe,
        STRONG_LIMIT_ETA,
        LIMIT_TOLERANCE,
    )?;
    let rms: Vec<f64> = reports.iter().map(|r| r.rms_rel_diff).collect();
    checks.push(Check::new(
        "strong limit 8x8",
        strictly_decreasing(&rms) && rms[rms.len() - 1] <= LIMIT_TOLERANCE,
        format!("rms {}", fmt_series(&rms)),
    ));

    let grid = square(0.1, 5)?;
    let probe = probe_state(&grid, 1);
    let weak = check_weak_limit(
        &grid,
        &[0.1, 0.03, 0.01],
        &probe,
        WEAK_LIMIT_ETA,
        LIMIT_TOLERANCE,
    )?;
    let rms: Vec<f64> = weak.reports.iter().map(|r| r.rms_rel_diff).collect();
    checks.push(Check::new(
        "weak limit 5x5",
        strictly_decreasing(&rms) && rms[rms.len() - 1] <= LIMIT_TOLERANCE,
        format!("rms {}, {} masked", fmt_series(&rms), weak.masked.len()),
    ));

    let grid = square(20.0, 8)?;
    let config = KernelConfig::with_default_eta(Regime::Strong, &grid);
    let scaling = rate_scaling_at_gap_minimum(&grid, &[0.4, 0.2, 0.1], 0.3, &config)?;
    let exponent = scaling.exponent.unwrap_or(f64::NAN);
    checks.push(Check::new(
        "gap-minimum rate exponent",
        (SCALING_EXPONENT.0..=SCALING_EXPONENT.1).contains(&exponent),
        format!("exponent {exponent:.3}"),
    ));
    Ok(checks)
}

/// Runs the suite; `quick` keeps to the 4x4 and spectrum checks.
pub fn run_validation(quick: bool) -> mott_kinetics::Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (u, n) in [(10.0, 4), (10.0, 5), (0.3, 6)] {
        checks.extend(spectrum_checks(&square(u, n)?));
    }
    checks.extend(brute_force_checks(if quick { 5 } else { 20 })?);
    if !quick {
        checks.extend(limit_checks()?);
    }
    Ok(checks)
}

pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

pub fn fmt_series(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(" > ")
}

pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    checks
        .iter()
        .map(|c| {
            format!(
                "{} {:width$}  {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )
        })
        .collect()
}
