//! General-coupling kernel built from the rotated four-slot amplitude.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::amplitude::{amplitude_sum, amplitude_sum_literal, SlotRow};
use super::{delta_broadened, physical_input, Channel, KernelConfig, PointOccupations, RhsField};
use crate::error::{Error, Result};
use crate::lattice::MomentumGrid;
use crate::spectrum::{Band, SpectralTable};
use crate::state::{plane, DistributionState, Spin, PLANES};

#[inline]
fn slot(spectral: &SpectralTable, band: Band, idx: usize) -> SlotRow {
    let p = spectral.point(idx);
    SlotRow {
        row: p.row(band),
        j: p.j_k,
    }
}

fn slots(
    spectral: &SpectralTable,
    ch: Channel,
    k: usize,
    p: usize,
    q: usize,
    k3: usize,
) -> [SlotRow; 4] {
    [
        slot(spectral, ch.a, k3),
        slot(spectral, ch.d, k),
        slot(spectral, ch.c, q),
        slot(spectral, ch.b, p),
    ]
}

/// Signed amplitude sum `T` of one channel.
pub fn general_amplitude(
    spectral: &SpectralTable,
    ch: Channel,
    k: usize,
    p: usize,
    q: usize,
    k3: usize,
) -> f64 {
    amplitude_sum(&slots(spectral, ch, k, p, q, k3))
}

/// Collision weight `(T/4)^2` of one channel.
pub fn general_weight(
    spectral: &SpectralTable,
    ch: Channel,
    k: usize,
    p: usize,
    q: usize,
    k3: usize,
) -> f64 {
    let t = general_amplitude(spectral, ch, k, p, q, k3);
    0.0625 * t * t
}

/// [`general_weight`] through the literal `X, Y, V` loops.
pub fn general_weight_literal(
    spectral: &SpectralTable,
    ch: Channel,
    k: usize,
    p: usize,
    q: usize,
    k3: usize,
) -> f64 {
    let t = amplitude_sum_literal(&slots(spectral, ch, k, p, q, k3));
    0.0625 * t * t
}

/// General right-hand side summed over the enabled channels.
pub fn general_rhs(
    state: &DistributionState,
    grid: &MomentumGrid,
    spectral: &SpectralTable,
    config: &KernelConfig,
) -> Result<RhsField> {
    state.check_grid(grid)?;
    config.validate(grid)?;
    if spectral.len() != grid.len() {
        return Err(Error::InvalidKernel(
            "spectral table does not match grid".into(),
        ));
    }
    let state = physical_input(state);
    let n = grid.len();
    let prefactor = -2.0 * PI / (n * n) as f64;
    let channels: Vec<Channel> = Channel::all()
        .filter(|c| config.channels.contains(*c))
        .collect();
    let rows: [Vec<SlotRow>; 2] = Band::ALL.map(|b| (0..n).map(|i| slot(spectral, b, i)).collect());
    let energy: [Vec<f64>; 2] =
        Band::ALL.map(|b| spectral.points().iter().map(|pt| pt.e(b)).collect());
    let occ = PointOccupations::new(&state);
    let (f, g) = (&occ.f, &occ.g);

    let per_point: Vec<[f64; PLANES]> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = [0.0; PLANES];
            for p in 0..n {
                let kp = grid.add(k, p);
                for q in 0..n {
                    let k3 = grid.sub(kp, q);
                    for &ch in &channels {
                        let (a, b, c, d) = (ch.a.index(), ch.b.index(), ch.c.index(), ch.d.index());
                        let mismatch = energy[a][k3] - energy[b][p] + energy[c][q] - energy[d][k];
                        let w = delta_broadened(mismatch, config.eta);
                        if w == 0.0 {
                            continue;
                        }
                        let t = amplitude_sum(&[rows[a][k3], rows[d][k], rows[c][q], rows[b][p]]);
                        let weight = w * 0.0625 * t * t;
                        for s in Spin::ALL {
                            let sb = s.flip();
                            let (pd, pb, pa, pc) = (
                                plane(ch.d, s),
                                plane(ch.b, sb),
                                plane(ch.a, s),
                                plane(ch.c, sb),
                            );
                            let b = f[k][pd] * f[p][pb] * g[k3][pa] * g[q][pc]
                                - f[k3][pa] * f[q][pc] * g[k][pd] * g[p][pb];
                            acc[pd] += weight * b;
                        }
                    }
                }
            }
            acc.map(|v| prefactor * v)
        })
        .collect();
    Ok(RhsField::from_points(per_point))
}
