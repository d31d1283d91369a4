//! Run orchestration: integrate, write `trajectory.csv` and snapshots.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use mott_kinetics::dynamics::integrate;
use mott_kinetics::observables::ObservableRecord;
use mott_kinetics::{RhsEvaluator, SpectralTable};

use crate::config::RunConfig;
use crate::snapshot::Snapshot;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";

pub const TRAJECTORY_HEADER: &str =
    "t,S,N_plus_up,N_plus_down,N_minus_up,N_minus_down,E_kin,Ddot,f_min,f_max,rhs_norm";

/// 17 significant digits, independent of locale.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_row(record: &ObservableRecord) -> String {
    let mut fields = vec![format_value(record.t), format_value(record.entropy)];
    fields.extend(record.counts.iter().map(|&c| format_value(c)));
    fields.push(format_value(record.e_kin));
    fields.push(record.ddot.map(format_value).unwrap_or_default());
    fields.extend([record.f_min, record.f_max, record.rhs_norm].map(format_value));
    fields.join(",")
}

pub fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("snapshot_{step}.json"))
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: usize,
    pub records: usize,
    pub final_t: f64,
    pub snapshots: Vec<PathBuf>,
    pub trajectory: PathBuf,
}

/// Executes a run inside a dedicated pool of `config.threads` workers.
pub fn run(config: &RunConfig) -> anyhow::Result<RunSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .context("cannot build worker pool")?;
    pool.install(|| execute(config))
}

fn execute(config: &RunConfig) -> anyhow::Result<RunSummary> {
    let grid = config.grid()?;
    let kernel = config.kernel_config(&grid)?;
    let initial = config.initial_state(&grid)?;
    let evaluator = RhsEvaluator::with_spectral(&grid, SpectralTable::strong(&grid), kernel)?;

    let dir = &config.output.directory;
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let trajectory = dir.join(TRAJECTORY_FILE);
    let mut csv = BufWriter::new(
        File::create(&trajectory)
            .with_context(|| format!("cannot create {}", trajectory.display()))?,
    );
    writeln!(csv, "{TRAJECTORY_HEADER}")?;

    let total = config.integrate.steps();
    let stride = config.output.snapshot_stride;
    let mut snapshots = Vec::new();
    log::info!(
        "running {total} steps on {:?} with eta = {} and {} threads",
        grid.sizes(),
        evaluator.config().eta,
        config.threads
    );

    let result = integrate(
        initial,
        &evaluator,
        &config.integrate,
        |step, state, record| -> anyhow::Result<()> {
            writeln!(csv, "{}", trajectory_row(record))?;
            if stride > 0 && (step % stride == 0 || step == total) {
                let path = snapshot_path(dir, step);
                Snapshot::capture(&grid, state, step)
                    .write(&path)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                snapshots.push(path);
            }
            log::debug!("step {step}: t = {}, S = {}", record.t, record.entropy);
            Ok(())
        },
    )?;
    csv.flush()?;

    Ok(RunSummary {
        steps: result.steps,
        records: result.records.len(),
        final_t: result.final_state.t,
        snapshots,
        trajectory,
    })
}

/// Writes the per-point spectrum CSV and returns the smallest direct gap.
pub fn write_spectrum(config: &RunConfig, out: &Path) -> anyhow::Result<f64> {
    let grid = config.grid()?;
    let table = SpectralTable::strong(&grid);
    let mut w = BufWriter::new(
        File::create(out).with_context(|| format!("cannot create {}", out.display()))?,
    );
    let axes: Vec<String> = (0..grid.dim()).map(|i| format!("k_{i}")).collect();
    writeln!(w, "index,{},J_k,E_minus,E_plus,gap", axes.join(","))?;
    for (idx, point) in table.points().iter().enumerate() {
        let k: Vec<String> = grid.momentum(idx).into_iter().map(format_value).collect();
        writeln!(
            w,
            "{idx},{},{},{},{},{}",
            k.join(","),
            format_value(point.j_k),
            format_value(point.energy[0]),
            format_value(point.energy[1]),
            format_value(point.gap)
        )?;
    }
    w.flush()?;
    Ok(table.min_gap())
}
