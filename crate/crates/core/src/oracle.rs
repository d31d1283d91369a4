//! Reference evaluations and limit checks used for validation.
//!
//! The brute-force path recomputes momenta from integer coordinates, the
//! dispersion from its closed form and the amplitude from the literal
//! label loops, so it shares no tables with the optimised kernels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    bracket, cross_section_strong, general_rhs, general_weight_literal, rhs, strong_rhs, weak_rhs,
    Channel, ChannelSet, KernelConfig, Regime, RhsField, StrongChannel,
};
use crate::lattice::{dispersion, ModelParams, MomentumGrid};
use crate::scenarios::{make_pump_bump, random_state};
use crate::spectrum::{Band, SpectralTable};
use crate::state::{plane, DistributionState, Spin, PLANES};

/// Largest grid accepted by [`brute_force_rhs`].
pub const BRUTE_FORCE_LIMIT: usize = 256;

fn literal_delta(x: f64, eta: f64) -> f64 {
    (-(x * x) / (2.0 * eta * eta)).exp() / (eta * (2.0 * PI).sqrt())
}

/// `a + sign * b` on integer coordinates, reduced modulo the grid.
fn shift(grid: &MomentumGrid, a: usize, b: usize, sign: i64) -> usize {
    let (ca, cb) = (grid.coords(a), grid.coords(b));
    let m: Vec<usize> = ca
        .iter()
        .zip(&cb)
        .zip(grid.sizes())
        .map(|((&x, &y), &n)| (x as i64 + sign * y as i64).rem_euclid(n as i64) as usize)
        .collect();
    grid.index_of(&m)
}

fn strong_channel_of(ch: Channel) -> Option<StrongChannel> {
    StrongChannel::ALL
        .into_iter()
        .find(|s| s.channel(ch.d) == ch)
}

/// Naive nested-loop right-hand side for any regime.
pub fn brute_force_rhs(
    state: &DistributionState,
    grid: &MomentumGrid,
    spectral: &SpectralTable,
    config: &KernelConfig,
) -> Result<RhsField> {
    let n = grid.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GridTooLarge {
            points: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    state.check_grid(grid)?;
    config.validate(grid)?;
    let mut f = state.clone();
    f.clamp_physical();
    let params = *grid.params();
    let j = |i: usize| dispersion(&params, &grid.momentum(i));
    let potential = config.potential_or_default(grid);
    let mut out = vec![0.0; PLANES * n];

    for d in Band::ALL {
        for s in Spin::ALL {
            let sb = s.flip();
            for k in 0..n {
                let mut sum = 0.0;
                if config.regime == Regime::Weak {
                    if d == Band::Minus {
                        for p in 0..n {
                            for q in 0..n {
                                let k1 = shift(grid, k, q, -1);
                                let p1 = shift(grid, p, q, 1);
                                let w = literal_delta(j(k) + j(p) - j(k1) - j(p1), config.eta);
                                let kpq = shift(grid, shift(grid, k, p, -1), q, -1);
                                let n_of = |sp: Spin, i: usize| f.get(Band::Minus, sp, i);
                                for s1 in Spin::ALL {
                                    for s2 in Spin::ALL {
                                        let v =
                                            potential.get(s1 == s, q) * potential.get(s2 == s, q);
                                        sum += w
                                            * v
                                            * bracket(
                                                n_of(s, k),
                                                n_of(s2, p),
                                                n_of(s, k1),
                                                n_of(s2, p1),
                                            );
                                    }
                                }
                                let v = potential.same[q] * potential.same[kpq];
                                sum -= w
                                    * v
                                    * bracket(n_of(s, k), n_of(s, p), n_of(s, k1), n_of(s, p1));
                            }
                        }
                    }
                } else {
                    for p in 0..n {
                        for q in 0..n {
                            let k3 = shift(grid, shift(grid, k, p, 1), q, -1);
                            for a in Band::ALL {
                                for b in Band::ALL {
                                    for c in Band::ALL {
                                        let ch = Channel::new(a, b, c, d);
                                        if !config.channels.contains(ch) {
                                            continue;
                                        }
                                        let (w, weight) = if config.regime == Regime::Strong {
                                            let Some(sc) = strong_channel_of(ch) else {
                                                continue;
                                            };
                                            let w = literal_delta(
                                                0.5 * (j(k3) + j(q) - j(k) - j(p)),
                                                config.eta,
                                            );
                                            (w, cross_section_strong(sc, j(k), j(p), j(q), j(k3)))
                                        } else {
                                            let e =
                                                |band: Band, i: usize| spectral.point(i).e(band);
                                            let x = e(a, k3) - e(b, p) + e(c, q) - e(d, k);
                                            (
                                                literal_delta(x, config.eta),
                                                general_weight_literal(spectral, ch, k, p, q, k3),
                                            )
                                        };
                                        let br = bracket(
                                            f.get(d, s, k),
                                            f.get(b, sb, p),
                                            f.get(a, s, k3),
                                            f.get(c, sb, q),
                                        );
                                        sum += w * weight * br;
                                    }
                                }
                            }
                        }
                    }
                }
                out[plane(d, s) * n + k] = -2.0 * PI / (n * n) as f64 * sum;
            }
        }
    }
    RhsField::from_vec(n, out)
}

/// `||a - b||_2 / ||b||_2`, zero when both vanish.
pub fn rms_rel_diff(candidate: &[f64], reference: &[f64]) -> f64 {
    let diff: f64 = candidate
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = reference.iter().map(|b| b * b).sum::<f64>().sqrt();
    if norm == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / norm
    }
}

/// Difference of one labelled pair of fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDiff {
    pub channel: String,
    pub rms_rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub label: String,
    pub max_abs_diff: f64,
    /// `max |a - b| / max |b|`.
    pub max_rel_diff: f64,
    pub rms_rel_diff: f64,
    pub channels: Vec<ChannelDiff>,
    pub tolerance: f64,
    pub pass: bool,
}

fn select(field: &RhsField, planes: &[usize], excluded: &[usize]) -> Vec<f64> {
    let n = field.points();
    planes
        .iter()
        .flat_map(|&p| {
            (0..n)
                .filter(|k| !excluded.contains(k))
                .map(move |k| field.as_slice()[p * n + k])
        })
        .collect()
}

/// Compares selected planes of two fields, skipping `excluded` points.
/// The report passes when `rms_rel_diff <= tolerance`.
pub fn compare_fields(
    label: impl Into<String>,
    candidate: &RhsField,
    reference: &RhsField,
    planes: &[usize],
    excluded: &[usize],
    tolerance: f64,
) -> ComparisonReport {
    let a = select(candidate, planes, excluded);
    let b = select(reference, planes, excluded);
    let max_abs_diff = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let max_ref = b.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let max_rel_diff = if max_ref == 0.0 {
        if max_abs_diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        max_abs_diff / max_ref
    };
    let rms = rms_rel_diff(&a, &b);
    ComparisonReport {
        label: label.into(),
        max_abs_diff,
        max_rel_diff,
        rms_rel_diff: rms,
        channels: Vec::new(),
        tolerance,
        pass: rms <= tolerance,
    }
}

const ALL_PLANES: [usize; PLANES] = [0, 1, 2, 3];

/// Optimised kernel vs [`brute_force_rhs`] on one random state per seed.
/// Each report passes when `max_rel_diff <= tolerance`.
pub fn check_brute_force(
    grid: &MomentumGrid,
    config: &KernelConfig,
    seeds: impl IntoIterator<Item = u64>,
    tolerance: f64,
) -> Result<Vec<ComparisonReport>> {
    let spectral = SpectralTable::strong(grid);
    seeds
        .into_iter()
        .map(|seed| {
            let state = random_state(grid.len(), seed);
            let fast = rhs(&state, grid, Some(&spectral), config)?;
            let slow = brute_force_rhs(&state, grid, &spectral, config)?;
            let label = format!("{:?} seed {seed}", config.regime).to_lowercase();
            let mut report = compare_fields(label, &fast, &slow, &ALL_PLANES, &[], tolerance);
            report.pass = report.max_rel_diff <= tolerance;
            Ok(report)
        })
        .collect()
}

fn with_u(grid: &MomentumGrid, u: f64) -> Result<MomentumGrid> {
    let p = grid.params();
    MomentumGrid::new(ModelParams::new(u, p.j, p.dim)?, grid.sizes())
}

/// General vs strong kernel on `probe` for each `U` in `u_list`.
pub fn check_strong_limit(
    grid: &MomentumGrid,
    u_list: &[f64],
    probe: &DistributionState,
    eta: f64,
    tolerance: f64,
) -> Result<Vec<ComparisonReport>> {
    if u_list.is_empty() || u_list.windows(2).any(|w| w[1] <= w[0]) || u_list[0] < 10.0 {
        return Err(Error::InvalidCheck(
            "U list must be increasing with minimum >= 10".into(),
        ));
    }
    u_list
        .iter()
        .map(|&u| {
            let g = with_u(grid, u)?;
            let table = SpectralTable::strong(&g);
            let general = KernelConfig::new(Regime::General, eta)?;
            let strong = KernelConfig::new(Regime::Strong, eta)?;
            let full_g = general_rhs(probe, &g, &table, &general)?;
            let full_s = strong_rhs(probe, &g, &strong)?;
            let mut report = compare_fields(
                format!("U={u}"),
                &full_g,
                &full_s,
                &ALL_PLANES,
                &[],
                tolerance,
            );
            for sc in StrongChannel::ALL {
                let set = ChannelSet::only(Band::ALL.map(|d| sc.channel(d)));
                let a = general_rhs(probe, &g, &table, &general.clone().with_channels(set))?;
                let b = strong_rhs(probe, &g, &strong.clone().with_channels(set))?;
                report.channels.push(ChannelDiff {
                    channel: format!("{sc:?}").to_lowercase(),
                    rms_rel_diff: rms_rel_diff(a.as_slice(), b.as_slice()),
                });
            }
            Ok(report)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLimitReport {
    pub reports: Vec<ComparisonReport>,
    /// Grid points excluded because the weak-order rotation is singular.
    pub masked: Vec<usize>,
}

/// Four-hole channel of the general kernel (weak-order table) vs the weak
/// kernel with contact potential, on the hole planes.
pub fn check_weak_limit(
    grid: &MomentumGrid,
    u_list: &[f64],
    probe: &DistributionState,
    eta: f64,
    tolerance: f64,
) -> Result<WeakLimitReport> {
    if u_list.is_empty() || u_list.windows(2).any(|w| w[1] >= w[0]) || u_list[0] > 0.1 {
        return Err(Error::InvalidCheck(
            "U list must be decreasing with maximum <= 0.1".into(),
        ));
    }
    let hole_planes = [plane(Band::Minus, Spin::Up), plane(Band::Minus, Spin::Down)];
    let mut masked = Vec::new();
    let mut reports = Vec::new();
    for &u in u_list {
        let g = with_u(grid, u)?;
        let table = SpectralTable::weak(&g);
        masked = table.masked().to_vec();
        let general =
            KernelConfig::new(Regime::General, eta)?.with_channels(ChannelSet::all_minus());
        let weak = KernelConfig::new(Regime::Weak, eta)?;
        let a = general_rhs(probe, &g, &table, &general)?;
        let b = weak_rhs(probe, &g, &weak)?;
        reports.push(compare_fields(
            format!("U={u}"),
            &a,
            &b,
            &hole_planes,
            &masked,
            tolerance,
        ));
    }
    Ok(WeakLimitReport { reports, masked })
}

/// `sup |∂t f|` for a pump bump.
pub fn bump_rate(
    grid: &MomentumGrid,
    center: f64,
    width: f64,
    amplitude: f64,
    config: &KernelConfig,
) -> Result<f64> {
    let state = make_pump_bump(grid, center, width, amplitude)?;
    Ok(crate::kernels::rhs(&state, grid, None, config)?.sup_norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub widths: Vec<f64>,
    pub rates: Vec<f64>,
    /// Least-squares slope of `ln rate` against `ln width`; `None` when a
    /// rate vanishes.
    pub exponent: Option<f64>,
}

/// Power-law fit of the instantaneous rate of bumps centred at `center`.
pub fn rate_scaling(
    grid: &MomentumGrid,
    center: f64,
    widths: &[f64],
    amplitude: f64,
    config: &KernelConfig,
) -> Result<ScalingReport> {
    if widths.len() < 2
        || widths.windows(2).any(|w| w[1] >= w[0])
        || widths.iter().any(|&w| w <= 0.0)
    {
        return Err(Error::InvalidCheck(
            "widths must be positive and strictly decreasing".into(),
        ));
    }
    let rates = widths
        .iter()
        .map(|&w| bump_rate(grid, center, w, amplitude, config))
        .collect::<Result<Vec<_>>>()?;
    let exponent = if rates.iter().all(|&r| r > 0.0) {
        let xs: Vec<f64> = widths.iter().map(|w| w.ln()).collect();
        let ys: Vec<f64> = rates.iter().map(|r| r.ln()).collect();
        let m = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(ScalingReport {
        widths: widths.to_vec(),
        rates,
        exponent,
    })
}

/// [`rate_scaling`] for bumps on the `J_k = 0` shell, where the direct gap
/// is minimal.
pub fn rate_scaling_at_gap_minimum(
    grid: &MomentumGrid,
    widths: &[f64],
    amplitude: f64,
    config: &KernelConfig,
) -> Result<ScalingReport> {
    rate_scaling(grid, 0.0, widths, amplitude, config)
}
