//! Initial conditions and the equilibrium-family fit.

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::MomentumGrid;
use crate::spectrum::Band;
use crate::state::{plane, DistributionState, Spin};

/// How to build the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    Equilibrium {
        alpha_plus: f64,
        alpha_minus: f64,
        beta: f64,
    },
    PumpBump {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    GroundPlusNoise {
        amplitude: f64,
        seed: u64,
    },
    /// A snapshot file; resolved by the caller since the core has no I/O.
    CustomFile {
        path: PathBuf,
    },
}

impl ScenarioSpec {
    pub fn build(&self, grid: &MomentumGrid) -> Result<DistributionState> {
        match *self {
            ScenarioSpec::Equilibrium {
                alpha_plus,
                alpha_minus,
                beta,
            } => Ok(make_equilibrium(grid, alpha_plus, alpha_minus, beta)),
            ScenarioSpec::PumpBump {
                center,
                width,
                amplitude,
            } => make_pump_bump(grid, center, width, amplitude),
            ScenarioSpec::GroundPlusNoise { amplitude, seed } => {
                ground_plus_noise(grid, amplitude, seed)
            }
            ScenarioSpec::CustomFile { .. } => Err(Error::InvalidScenario(
                "custom_file states must be loaded by the caller".into(),
            )),
        }
    }
}

/// `1 / (exp(x) + 1)` without overflow.
#[inline]
pub fn fermi(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// `f^a_k = 1 / (exp(alpha_a + beta J_k) + 1)`, equal for both spins.
pub fn make_equilibrium(
    grid: &MomentumGrid,
    alpha_plus: f64,
    alpha_minus: f64,
    beta: f64,
) -> DistributionState {
    DistributionState::from_fn(grid.len(), |band, _, k| {
        let alpha = match band {
            Band::Plus => alpha_plus,
            Band::Minus => alpha_minus,
        };
        fermi(alpha + beta * grid.j(k))
    })
}

/// Particle-hole pairs on the energy shell `J_k ≈ center`:
/// `f^+ = A exp(-(J_k - center)^2 / 2 width^2)` and `f^- = 1 - f^+`.
pub fn make_pump_bump(
    grid: &MomentumGrid,
    center: f64,
    width: f64,
    amplitude: f64,
) -> Result<DistributionState> {
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::InvalidScenario(format!(
            "amplitude must lie in [0, 1], got {amplitude}"
        )));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "width must be finite and > 0, got {width}"
        )));
    }
    if !center.is_finite() {
        return Err(Error::InvalidScenario("center must be finite".into()));
    }
    Ok(DistributionState::from_fn(grid.len(), |band, _, k| {
        let z = (grid.j(k) - center) / width;
        let bump = amplitude * (-0.5 * z * z).exp();
        match band {
            Band::Plus => bump,
            Band::Minus => 1.0 - bump,
        }
    }))
}

/// Ground state with independent uniform excitations of size up to
/// `amplitude` in every entry.
pub fn ground_plus_noise(
    grid: &MomentumGrid,
    amplitude: f64,
    seed: u64,
) -> Result<DistributionState> {
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::InvalidScenario(format!(
            "noise amplitude must lie in [0, 1], got {amplitude}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(DistributionState::from_fn(grid.len(), |band, _, _| {
        let x = amplitude * rng.gen::<f64>();
        match band {
            Band::Plus => x,
            Band::Minus => 1.0 - x,
        }
    }))
}

/// Smooth random logistic field per plane, with logits bounded by 2.
pub fn probe_state(grid: &MomentumGrid, seed: u64) -> DistributionState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let mut coeffs = Vec::new();
    for _ in 0..4 {
        let offset: f64 = rng.gen_range(-0.8..0.8);
        let modes: Vec<(f64, f64)> = (0..dim)
            .map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
            .collect();
        coeffs.push((offset, modes));
    }
    DistributionState::from_fn(grid.len(), |band, spin, k| {
        let (offset, modes) = &coeffs[plane(band, spin)];
        let momentum = grid.momentum(k);
        let mut logit = *offset;
        for (i, (a, b)) in modes.iter().enumerate() {
            logit += a * momentum[i].cos() + b * momentum[i].sin();
        }
        fermi(logit.clamp(-2.0, 2.0))
    })
}

/// Independent uniform entries in `(0, 1)`.
pub fn random_state(points: usize, seed: u64) -> DistributionState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DistributionState::from_fn(points, |_, _, _| rng.gen_range(0.01..0.99))
}

/// Parameters and RMS logit misfit of an equilibrium fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumFit {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub beta: f64,
    pub residual: f64,
}

const FIT_EDGE: f64 = 1e-12;

/// Least-squares fit of `logit f^a_k = -alpha_a - beta J_k` over both bands
/// and spins, using entries strictly inside `(0, 1)`.
pub fn fit_equilibrium(grid: &MomentumGrid, state: &DistributionState) -> Result<EquilibriumFit> {
    state.check_grid(grid)?;
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    let mut total = 0;
    for band in Band::ALL {
        let col = match band {
            Band::Plus => 0,
            Band::Minus => 1,
        };
        for spin in Spin::ALL {
            for (k, &f) in state.plane(band, spin).iter().enumerate() {
                total += 1;
                if f > FIT_EDGE && f < 1.0 - FIT_EDGE {
                    rows.push((col, grid.j(k), (f / (1.0 - f)).ln()));
                }
            }
        }
    }
    if 2 * rows.len() <= total {
        return Err(Error::IllConditionedFit(format!(
            "only {} of {total} entries lie strictly inside (0, 1)",
            rows.len()
        )));
    }
    let mean_j = rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64;
    let var_j = rows.iter().map(|r| (r.1 - mean_j).powi(2)).sum::<f64>() / rows.len() as f64;
    if var_j < 1e-12 {
        return Err(Error::IllConditionedFit(
            "dispersion has no spread over the fitted entries".into(),
        ));
    }
    for col in 0..2 {
        if !rows.iter().any(|r| r.0 == col) {
            return Err(Error::IllConditionedFit(
                "one band has no interior entries".into(),
            ));
        }
    }

    let a = DMatrix::from_fn(rows.len(), 3, |i, c| match c {
        0 | 1 => {
            if rows[i].0 == c {
                -1.0
            } else {
                0.0
            }
        }
        _ => -rows[i].1,
    });
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.2));
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::IllConditionedFit(e.to_string()))?;
    let misfit = &a * &x - &b;
    let residual = (misfit.norm_squared() / rows.len() as f64).sqrt();
    Ok(EquilibriumFit {
        alpha_plus: x[0],
        alpha_minus: x[1],
        beta: x[2],
        residual,
    })
}
