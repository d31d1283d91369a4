//! Scalar diagnostics of a distribution state.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    bracket, delta_broadened, general_amplitude, Channel, KernelConfig, Regime, RhsEvaluator,
    RhsField,
};
use crate::lattice::MomentumGrid;
use crate::spectrum::{Band, SpectralTable};
use crate::state::{DistributionState, Spin, PLANES};

/// Diagnostics at one time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: f64,
    pub entropy: f64,
    /// Mean occupations in plane order `(+,up), (+,down), (-,up), (-,down)`.
    pub counts: [f64; PLANES],
    pub e_kin: f64,
    /// Double-occupancy drift; absent in the weak regime.
    pub ddot: Option<f64>,
    pub f_min: f64,
    pub f_max: f64,
    pub rhs_norm: f64,
}

#[inline]
fn mixing(f: f64) -> f64 {
    let mut h = 0.0;
    if f > 0.0 {
        h -= f * f.ln();
    }
    if f < 1.0 {
        h -= (1.0 - f) * (1.0 - f).ln();
    }
    h
}

/// Fermionic entropy per grid point, summed over bands and spins.
pub fn entropy(state: &DistributionState) -> f64 {
    state
        .as_slice()
        .iter()
        .map(|&f| mixing(f.clamp(0.0, 1.0)))
        .sum::<f64>()
        / state.points() as f64
}

/// `dS/dt = -(1/N) sum ∂t f ln(f / (1 - f))`, skipping saturated entries.
pub fn entropy_production(state: &DistributionState, rhs: &RhsField) -> f64 {
    let sum: f64 = state
        .as_slice()
        .iter()
        .zip(rhs.as_slice())
        .filter(|(f, _)| **f > 0.0 && **f < 1.0)
        .map(|(&f, &d)| -d * (f / (1.0 - f)).ln())
        .sum();
    sum / state.points() as f64
}

/// `(1/N) sum_k f^a_{k,s}` in plane order.
pub fn species_counts(state: &DistributionState) -> [f64; PLANES] {
    let n = state.points();
    std::array::from_fn(|p| state.as_slice()[p * n..(p + 1) * n].iter().sum::<f64>() / n as f64)
}

/// `(1/N) sum_{k,s} J_k (f^+_{k,s} + f^-_{k,s})`.
pub fn kinetic_invariant(state: &DistributionState, grid: &MomentumGrid) -> f64 {
    let mut sum = 0.0;
    for band in Band::ALL {
        for spin in Spin::ALL {
            sum += state
                .plane(band, spin)
                .iter()
                .zip(grid.dispersion())
                .map(|(f, j)| f * j)
                .sum::<f64>();
        }
    }
    sum / grid.len() as f64
}

/// Double-occupancy drift evaluated with the general-coupling machinery.
pub fn ddot_diagnostic(
    state: &DistributionState,
    spectral: &SpectralTable,
    grid: &MomentumGrid,
    config: &KernelConfig,
) -> Result<f64> {
    state.check_grid(grid)?;
    if spectral.len() != grid.len() {
        return Err(Error::InvalidKernel(
            "spectral table does not match grid".into(),
        ));
    }
    let n = grid.len();
    let u = grid.params().u;
    let channels: Vec<Channel> = Channel::all()
        .filter(|c| config.channels.contains(*c))
        .collect();
    let f = |b: Band, s: Spin, k: usize| state.get(b, s, k).clamp(0.0, 1.0);
    let pt = |i: usize| spectral.point(i);

    let per_k: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let jk = grid.j(k);
            let root = jk.hypot(u);
            if root == 0.0 || jk == 0.0 {
                return 0.0;
            }
            let weight_k = jk / root;
            let mut acc = 0.0;
            for p in 0..n {
                let kp = grid.add(k, p);
                for q in 0..n {
                    let k3 = grid.sub(kp, q);
                    for &ch in &channels {
                        let mismatch =
                            pt(k3).e(ch.a) - pt(p).e(ch.b) + pt(q).e(ch.c) - pt(k).e(ch.d);
                        let w = delta_broadened(mismatch, config.eta);
                        if w == 0.0 {
                            continue;
                        }
                        let (oa, ob, oc) = (pt(k3).row(ch.a), pt(p).row(ch.b), pt(q).row(ch.c));
                        let od = pt(k).row(ch.d.flip());
                        let t = |o: [f64; 2]| o[0] + o[1];
                        let dot = |x: [f64; 2], y: [f64; 2]| x[0] * y[0] + x[1] * y[1];
                        let xdot = |x: [f64; 2], y: [f64; 2]| x[0] * y[1] + x[1] * y[0];
                        let brace = (od[0] - od[1])
                            * (grid.j(k3) * t(oa) * dot(ob, oc) - grid.j(p) * t(ob) * xdot(oa, oc)
                                + grid.j(q) * t(oc) * dot(oa, ob));
                        let amp = -general_amplitude(spectral, ch, k, p, q, k3) / 16.0;
                        for s in Spin::ALL {
                            let sb = s.flip();
                            let b = bracket(
                                f(ch.d, s, k),
                                f(ch.b, sb, p),
                                f(ch.a, s, k3),
                                f(ch.c, sb, q),
                            );
                            acc += weight_k * w * brace * amp * b;
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let total: f64 = per_k.iter().sum();
    Ok(-4.0 * PI / (n * n * n) as f64 * total)
}

/// Builds a record from a state and its already evaluated derivative.
pub fn measure(
    state: &DistributionState,
    evaluator: &RhsEvaluator<'_>,
    rhs: &RhsField,
    with_ddot: bool,
) -> Result<ObservableRecord> {
    let grid = evaluator.grid();
    let ddot = if with_ddot && evaluator.config().regime != Regime::Weak {
        Some(ddot_diagnostic(
            state,
            evaluator.spectral(),
            grid,
            evaluator.config(),
        )?)
    } else {
        None
    };
    Ok(ObservableRecord {
        t: state.t,
        entropy: entropy(state),
        counts: species_counts(state),
        e_kin: kinetic_invariant(state, grid),
        ddot,
        f_min: state.min(),
        f_max: state.max(),
        rhs_norm: evaluator.residual_of(rhs),
    })
}
