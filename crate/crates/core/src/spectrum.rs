//! Quasi-particle and hole energies, the diagonalising rotation, and
//! ground-state correlators.
//!
//! Rotation rows are indexed by band (`Minus` then `Plus`), columns by the
//! on-site occupation label `X = 0, 1`. Every row satisfies
//!
//! ```text
//! (J_k / 2) * (O_0 + O_1) = (-E + U^Y) * O_Y,   U^0 = 0, U^1 = U
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ModelParams, MomentumGrid};

/// Band label: `Minus` is the hole band, `Plus` the quasi-particle band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    Minus,
    Plus,
}

impl Band {
    pub const ALL: [Band; 2] = [Band::Minus, Band::Plus];

    /// Row index into a rotation matrix.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Band::Minus => 0,
            Band::Plus => 1,
        }
    }

    #[inline]
    pub fn from_index(i: usize) -> Band {
        if i == 0 {
            Band::Minus
        } else {
            Band::Plus
        }
    }

    #[inline]
    pub fn flip(self) -> Band {
        match self {
            Band::Minus => Band::Plus,
            Band::Plus => Band::Minus,
        }
    }
}

/// Which eigenvalue assignment a table uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    /// `E+ - E- > 0` everywhere; canonical.
    Strong,
    /// `E- ~ -J_k + U/2`, used only for the weak-coupling comparison.
    Weak,
}

/// A 2x2 real matrix stored by rows.
pub type Rotation = [[f64; 2]; 2];

/// Exact energies `(E-, E+)` with `E+ - E- = sqrt(J_k^2 + U^2)`.
pub fn energies(params: &ModelParams, j_k: f64) -> (f64, f64) {
    let root = j_k.hypot(params.u);
    if root == 0.0 {
        return (0.0, 0.0);
    }
    // U - root = -J_k^2 / (root + U) avoids cancellation for |J_k| << U
    let minus = -0.5 * (j_k + j_k * j_k / (root + params.u));
    (minus, 0.5 * (params.u - j_k + root))
}

/// Direct gap `sqrt(J_k^2 + U^2)`.
pub fn direct_gap(params: &ModelParams, j_k: f64) -> f64 {
    j_k.hypot(params.u)
}

/// Strong-order rotation `[[cos, sin], [-sin, cos]]`.
pub fn rotation_matrix(params: &ModelParams, j_k: f64) -> Rotation {
    let root = j_k.hypot(params.u);
    if root == 0.0 {
        return [[1.0, 0.0], [0.0, 1.0]];
    }
    let cos = ((root + params.u) / (2.0 * root)).sqrt();
    // (1 - U/root) / 2 = J_k^2 / (2 root (root + U))
    let sin = j_k / (2.0 * root * (root + params.u)).sqrt();
    [[cos, sin], [-sin, cos]]
}

/// `|J_k|` at or below which the weak-order rotation is treated as singular.
pub fn weak_singular_threshold(params: &ModelParams) -> f64 {
    1e-12 * params.j
}

/// First-order weak-coupling rotation; singular at `J_k = 0`.
pub fn weak_rotation_matrix(params: &ModelParams, j_k: f64) -> Result<Rotation> {
    if j_k.abs() <= weak_singular_threshold(params) {
        return Err(Error::SingularWeakRotation);
    }
    let r = params.u / (2.0 * j_k);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok([
        [s * (1.0 + r), s * (1.0 - r)],
        [s * (-1.0 + r), s * (1.0 + r)],
    ])
}

/// Exact energies in the weak ordering: `(E-, E+)` with `E- ~ -J_k + U/2`.
pub fn weak_energies(params: &ModelParams, j_k: f64) -> (f64, f64) {
    let u = params.u;
    let root = j_k.hypot(u);
    let sign = if j_k < 0.0 { -1.0 } else { 1.0 };
    // sign * root - J_k = sign * U^2 / (root + |J_k|)
    let lift = if root == 0.0 {
        0.0
    } else {
        sign * u * u / (root + j_k.abs())
    };
    (0.5 * (u - j_k - sign * root), 0.5 * (u + lift))
}

/// Residual of the eigenvalue equation for one row, maximised over `Y`.
pub fn eigen_residual(params: &ModelParams, j_k: f64, row: [f64; 2], energy: f64) -> f64 {
    let lhs = 0.5 * j_k * (row[0] + row[1]);
    let r0 = (lhs - (-energy) * row[0]).abs();
    let r1 = (lhs - (-energy + params.u) * row[1]).abs();
    r0.max(r1)
}

/// Per-point spectral data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub j_k: f64,
    /// Energies indexed by `Band::index`.
    pub energy: [f64; 2],
    pub rotation: Rotation,
    pub gap: f64,
}

impl SpectralPoint {
    #[inline]
    pub fn e(&self, band: Band) -> f64 {
        self.energy[band.index()]
    }

    #[inline]
    pub fn row(&self, band: Band) -> [f64; 2] {
        self.rotation[band.index()]
    }
}

/// Energies, rotations and gaps tabulated over a grid.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    params: ModelParams,
    ordering: Ordering,
    points: Vec<SpectralPoint>,
    masked: Vec<usize>,
}

impl SpectralTable {
    /// Strong-order table.
    pub fn strong(grid: &MomentumGrid) -> Self {
        let params = *grid.params();
        let points = grid
            .dispersion()
            .par_iter()
            .map(|&j_k| {
                let (em, ep) = energies(&params, j_k);
                SpectralPoint {
                    j_k,
                    energy: [em, ep],
                    rotation: rotation_matrix(&params, j_k),
                    gap: direct_gap(&params, j_k),
                }
            })
            .collect();
        Self {
            params,
            ordering: Ordering::Strong,
            points,
            masked: Vec::new(),
        }
    }

    /// Weak-order table. Points with `J_k = 0` get the strong-order entries
    /// and are listed in [`SpectralTable::masked`].
    pub fn weak(grid: &MomentumGrid) -> Self {
        let params = *grid.params();
        let mut masked = Vec::new();
        let points = grid
            .dispersion()
            .iter()
            .enumerate()
            .map(|(idx, &j_k)| match weak_rotation_matrix(&params, j_k) {
                Ok(rotation) => {
                    let (em, ep) = weak_energies(&params, j_k);
                    SpectralPoint {
                        j_k,
                        energy: [em, ep],
                        rotation,
                        gap: direct_gap(&params, j_k),
                    }
                }
                Err(_) => {
                    masked.push(idx);
                    let (em, ep) = energies(&params, j_k);
                    SpectralPoint {
                        j_k,
                        energy: [em, ep],
                        rotation: rotation_matrix(&params, j_k),
                        gap: direct_gap(&params, j_k),
                    }
                }
            })
            .collect();
        Self {
            params,
            ordering: Ordering::Weak,
            points,
            masked,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }

    #[inline]
    pub fn point(&self, idx: usize) -> &SpectralPoint {
        &self.points[idx]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid points where the weak-order rotation is undefined.
    pub fn masked(&self) -> &[usize] {
        &self.masked
    }

    pub fn min_gap(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.gap)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation of `O O^T` from the identity.
    pub fn max_orthogonality_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| {
                let o = p.rotation;
                let mut worst = 0.0f64;
                for i in 0..2 {
                    for j in 0..2 {
                        let dot = o[i][0] * o[j][0] + o[i][1] * o[j][1];
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((dot - target).abs());
                    }
                }
                worst
            })
            .fold(0.0, f64::max)
    }

    /// Largest eigenvalue-equation residual over all points and bands.
    pub fn max_eigen_residual(&self) -> f64 {
        self.points
            .iter()
            .flat_map(|p| Band::ALL.map(|b| eigen_residual(&self.params, p.j_k, p.row(b), p.e(b))))
            .fold(0.0, f64::max)
    }
}

/// Ground-state correlators `f^{XY}` per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateCorrelators {
    pub f01: Vec<f64>,
    pub f00: Vec<f64>,
    pub f11: Vec<f64>,
    pub double_occupancy: f64,
}

impl GroundStateCorrelators {
    /// Correlated parts `f^{aa,corr}` in the rotated basis at point `idx`,
    /// returned as `(minus, plus)`.
    pub fn rotated_corr(&self, params: &ModelParams, j_k: f64, idx: usize) -> (f64, f64) {
        let d = self.double_occupancy;
        let c00 = self.f00[idx] - (0.5 - d);
        let c11 = self.f11[idx] - d;
        let c01 = self.f01[idx];
        let o = rotation_matrix(params, j_k);
        let rot = |row: [f64; 2]| {
            row[0] * row[0] * c00 + row[1] * row[1] * c11 + 2.0 * row[0] * row[1] * c01
        };
        (rot(o[0]), rot(o[1]))
    }
}

/// Ground-state values of the on-site correlators for double occupancy `d`.
pub fn ground_state_correlators(grid: &MomentumGrid, d: f64) -> Result<GroundStateCorrelators> {
    if !(0.0..=0.5).contains(&d) {
        return Err(Error::InvalidModel(format!(
            "double occupancy must lie in [0, 1/2], got {d}"
        )));
    }
    let u = grid.params().u;
    let mut out = GroundStateCorrelators {
        f01: Vec::with_capacity(grid.len()),
        f00: Vec::with_capacity(grid.len()),
        f11: Vec::with_capacity(grid.len()),
        double_occupancy: d,
    };
    for &j_k in grid.dispersion() {
        let root = j_k.hypot(u);
        let (ratio, mix) = if root == 0.0 {
            (0.0, 0.0)
        } else {
            (u / root, j_k / root)
        };
        out.f01.push(0.25 * mix);
        out.f00.push(0.25 + 0.25 * ratio - d);
        out.f11.push(0.25 - 0.25 * ratio + d);
    }
    Ok(out)
}

const DISTRIBUTION_SLACK: f64 = 1e-9;

/// Maps rotated correlated parts `(f^{--,corr}, f^{++,corr})` to the
/// distributions `(f^-, f^+)` using the strong-order rotation.
pub fn correlator_to_distribution(
    params: &ModelParams,
    j_k: f64,
    corr: (f64, f64),
    d: f64,
) -> Result<(f64, f64)> {
    let o = rotation_matrix(params, j_k);
    let dist = |row: [f64; 2], c: f64| {
        0.5 + (0.5 - 2.0 * d) * (row[0] * row[0] - row[1] * row[1]) + 2.0 * c
    };
    let minus = dist(o[0], corr.0);
    let plus = dist(o[1], corr.1);
    for (index, value) in [(0, minus), (1, plus)] {
        if !(-DISTRIBUTION_SLACK..=1.0 + DISTRIBUTION_SLACK).contains(&value) {
            return Err(Error::Unphysical { index, value });
        }
    }
    Ok((minus, plus))
}
