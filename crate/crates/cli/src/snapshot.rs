//! State snapshots as JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use mott_kinetics::{DistributionState, MomentumGrid};
use serde::{Deserialize, Serialize};

/// Storage order of [`Snapshot::f`].
pub const LAYOUT: &str =
    "a,s,k: planes (+,up) (+,down) (-,up) (-,down), k row-major with the last axis fastest";

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed snapshot: {0}")]
    Json(#[from] serde_json::Error),
    #[error("snapshot grid {found:?} does not match configured grid {expected:?}")]
    GridMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error(transparent)]
    State(#[from] mott_kinetics::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridMeta {
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub dim: usize,
    pub grid_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub grid: GridMeta,
    pub layout: String,
    pub step: usize,
    pub t: f64,
    pub f: Vec<f64>,
}

impl Snapshot {
    pub fn capture(grid: &MomentumGrid, state: &DistributionState, step: usize) -> Self {
        let p = grid.params();
        Self {
            grid: GridMeta {
                u: p.u,
                j: p.j,
                dim: p.dim,
                grid_sizes: grid.sizes().to_vec(),
            },
            layout: LAYOUT.to_owned(),
            step,
            t: state.t,
            f: state.as_slice().to_vec(),
        }
    }

    /// Converts back to a state; the grid sizes must agree, the couplings may differ.
    pub fn into_state(self, grid: &MomentumGrid) -> Result<DistributionState, SnapshotError> {
        if self.grid.grid_sizes != grid.sizes() {
            return Err(SnapshotError::GridMismatch {
                expected: grid.sizes().to_vec(),
                found: self.grid.grid_sizes,
            });
        }
        Ok(DistributionState::from_vec(grid.len(), self.f, self.t)?)
    }

    pub fn read(path: &Path) -> Result<Self, SnapshotError> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }

    pub fn write(&self, path: &Path) -> Result<(), SnapshotError> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut out, self)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }
}
