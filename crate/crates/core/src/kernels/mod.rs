//! Collision integrals for the three coupling regimes.
//!
//! All kernels share one momentum convention: a particle at `k` (spin `s`)
//! scatters off a partner at `p` (spin `s̄`) into `k3 = k + p - q` (spin `s`)
//! and `q` (spin `s̄`). Every sum over `(p, q)` runs in lexicographic order
//! for each output point so results do not depend on the thread count.

mod amplitude;
mod general;
mod strong;
mod weak;

use std::borrow::Cow;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::MomentumGrid;
use crate::spectrum::{Band, SpectralTable};
use crate::state::{plane, DistributionState, Spin, PLANES};

pub use amplitude::{amplitude_sum, amplitude_sum_literal, SlotRow};
pub use general::{general_amplitude, general_rhs, general_weight, general_weight_literal};
pub use strong::{cross_section_strong, strong_rhs, StrongChannel};
pub use weak::weak_rhs;

/// Which collision integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Strong,
    Weak,
    General,
}

/// One band assignment `(a, b, c, d)`: `d` at `k`, `b` at `p`, `a` at `k3`,
/// `c` at `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Channel {
    pub a: Band,
    pub b: Band,
    pub c: Band,
    pub d: Band,
}

impl Channel {
    pub fn new(a: Band, b: Band, c: Band, d: Band) -> Self {
        Self { a, b, c, d }
    }

    /// Bit position inside a [`ChannelSet`].
    pub fn bit(self) -> u16 {
        (self.a.index() | self.b.index() << 1 | self.c.index() << 2 | self.d.index() << 3) as u16
    }

    pub fn all() -> impl Iterator<Item = Channel> {
        (0..16u16).map(|i| {
            Channel::new(
                Band::from_index((i & 1) as usize),
                Band::from_index((i >> 1 & 1) as usize),
                Band::from_index((i >> 2 & 1) as usize),
                Band::from_index((i >> 3 & 1) as usize),
            )
        })
    }

    /// Whether the band content is the same before and after the collision.
    pub fn is_elastic(self) -> bool {
        let plus = |b: Band| (b == Band::Plus) as u8;
        plus(self.a) + plus(self.c) == plus(self.b) + plus(self.d)
    }
}

/// A subset of the sixteen band assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelSet(u16);

impl ChannelSet {
    pub const ALL: ChannelSet = ChannelSet(u16::MAX);
    pub const NONE: ChannelSet = ChannelSet(0);

    pub fn only(channels: impl IntoIterator<Item = Channel>) -> Self {
        ChannelSet(channels.into_iter().fold(0, |m, c| m | 1 << c.bit()))
    }

    /// The four-hole channel that dominates at weak coupling.
    pub fn all_minus() -> Self {
        Self::only([Channel::new(
            Band::Minus,
            Band::Minus,
            Band::Minus,
            Band::Minus,
        )])
    }

    pub fn elastic() -> Self {
        Self::only(Channel::all().filter(|c| c.is_elastic()))
    }

    #[inline]
    pub fn contains(self, c: Channel) -> bool {
        self.0 >> c.bit() & 1 == 1
    }
}

impl Default for ChannelSet {
    fn default() -> Self {
        Self::ALL
    }
}

/// Two-body potential `V^{ss'}_q` tabulated over the grid, spin-symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    /// `V^{ss}_q`.
    pub same: Vec<f64>,
    /// `V^{s s̄}_q`.
    pub opposite: Vec<f64>,
}

impl Potential {
    /// Contact repulsion: `V^{s s̄} = U`, `V^{ss} = 0`.
    pub fn hubbard(u: f64, points: usize) -> Self {
        Self {
            same: vec![0.0; points],
            opposite: vec![u; points],
        }
    }

    #[inline]
    pub fn get(&self, same_spin: bool, q: usize) -> f64 {
        if same_spin {
            self.same[q]
        } else {
            self.opposite[q]
        }
    }

    pub fn validate(&self, grid: &MomentumGrid) -> Result<()> {
        for (name, table) in [("same", &self.same), ("opposite", &self.opposite)] {
            if table.len() != grid.len() {
                return Err(Error::InvalidKernel(format!(
                    "potential.{name} has {} entries, grid has {}",
                    table.len(),
                    grid.len()
                )));
            }
            for q in 0..grid.len() {
                let v = table[q];
                if !v.is_finite() {
                    return Err(Error::InvalidKernel(format!(
                        "potential.{name}[{q}] is not finite"
                    )));
                }
                if (v - table[grid.neg(q)]).abs() > 1e-12 * v.abs().max(1.0) {
                    return Err(Error::InvalidKernel(format!(
                        "potential.{name} is not symmetric under q -> -q"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Kernel selection and regularisation.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    pub regime: Regime,
    /// Gaussian width of the broadened energy delta.
    pub eta: f64,
    /// Weak regime only; `None` means the contact potential.
    pub potential: Option<Potential>,
    pub channels: ChannelSet,
}

impl KernelConfig {
    pub fn new(regime: Regime, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "eta must be finite and > 0, got {eta}"
            )));
        }
        Ok(Self {
            regime,
            eta,
            potential: None,
            channels: ChannelSet::ALL,
        })
    }

    /// Config with the grid-derived default width.
    pub fn with_default_eta(regime: Regime, grid: &MomentumGrid) -> Self {
        Self {
            regime,
            eta: default_eta(grid),
            potential: None,
            channels: ChannelSet::ALL,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "eta must be finite and > 0, got {eta}"
            )));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn with_potential(mut self, potential: Potential) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn with_channels(mut self, channels: ChannelSet) -> Self {
        self.channels = channels;
        self
    }

    pub fn validate(&self, grid: &MomentumGrid) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "eta must be finite and > 0, got {}",
                self.eta
            )));
        }
        if let Some(v) = &self.potential {
            v.validate(grid)?;
        }
        Ok(())
    }

    /// The potential in effect, defaulting to the contact repulsion.
    pub fn potential_or_default(&self, grid: &MomentumGrid) -> Cow<'_, Potential> {
        match &self.potential {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(Potential::hubbard(grid.params().u, grid.len())),
        }
    }
}

/// Half the mean spacing of the distinct dispersion values.
pub fn default_eta(grid: &MomentumGrid) -> f64 {
    0.5 * grid.mean_energy_spacing()
}

const GAUSS_CUTOFF: f64 = 700.0;

/// Normalised Gaussian `exp(-x^2 / 2 eta^2) / (eta sqrt(2 pi))`.
#[inline]
pub fn delta_broadened(x: f64, eta: f64) -> f64 {
    let z = 0.5 * (x / eta) * (x / eta);
    if z > GAUSS_CUTOFF {
        return 0.0;
    }
    (-z).exp() / (eta * (2.0 * PI).sqrt())
}

/// Fermionic loss-minus-gain product for `d + b -> a + c`.
#[inline]
pub(crate) fn bracket(fd: f64, fb: f64, fa: f64, fc: f64) -> f64 {
    fd * fb * (1.0 - fa) * (1.0 - fc) - fa * fc * (1.0 - fd) * (1.0 - fb)
}

/// Time derivatives `∂t f^a_{k,s}` in the state's plane layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsField {
    points: usize,
    values: Vec<f64>,
}

impl RhsField {
    pub fn zeros(points: usize) -> Self {
        Self {
            points,
            values: vec![0.0; PLANES * points],
        }
    }

    pub fn from_vec(points: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != PLANES * points {
            return Err(Error::StateShape {
                expected: PLANES * points,
                got: values.len(),
            });
        }
        Ok(Self { points, values })
    }

    /// Assembles a field from per-point outputs indexed by plane.
    pub(crate) fn from_points(per_point: Vec<[f64; PLANES]>) -> Self {
        let n = per_point.len();
        let mut values = vec![0.0; PLANES * n];
        for (k, out) in per_point.iter().enumerate() {
            for (p, v) in out.iter().enumerate() {
                values[p * n + k] = *v;
            }
        }
        Self { points: n, values }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, band: Band, spin: Spin, k: usize) -> f64 {
        self.values[plane(band, spin) * self.points + k]
    }

    pub fn plane(&self, band: Band, spin: Spin) -> &[f64] {
        let start = plane(band, spin) * self.points;
        &self.values[start..start + self.points]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `(1/N) sum_k` of one plane.
    pub fn plane_mean(&self, band: Band, spin: Spin) -> f64 {
        self.plane(band, spin).iter().sum::<f64>() / self.points as f64
    }
}

/// Occupations regrouped per grid point, `[plane]` in storage order, along
/// with their complements `1 - f`.
pub(crate) struct PointOccupations {
    pub f: Vec<[f64; PLANES]>,
    pub g: Vec<[f64; PLANES]>,
}

impl PointOccupations {
    pub fn new(state: &DistributionState) -> Self {
        let n = state.points();
        let data = state.as_slice();
        let f: Vec<[f64; PLANES]> = (0..n)
            .map(|k| std::array::from_fn(|p| data[p * n + k]))
            .collect();
        let g = f.iter().map(|v| v.map(|x| 1.0 - x)).collect();
        Self { f, g }
    }
}

/// Clamps a copy of the input into `[0, 1]` when needed, logging the size.
pub(crate) fn physical_input(state: &DistributionState) -> Cow<'_, DistributionState> {
    if state.overshoot() == 0.0 {
        return Cow::Borrowed(state);
    }
    let mut copy = state.clone();
    let clamp = copy.clamp_physical();
    log::debug!("kernel input clamped by {clamp:e} at t = {}", state.t);
    Cow::Owned(copy)
}

/// Dispatches to the configured regime. `spectral` is required for the
/// general regime and built on demand otherwise.
pub fn rhs(
    state: &DistributionState,
    grid: &MomentumGrid,
    spectral: Option<&SpectralTable>,
    config: &KernelConfig,
) -> Result<RhsField> {
    match config.regime {
        Regime::Strong => strong_rhs(state, grid, config),
        Regime::Weak => weak_rhs(state, grid, config),
        Regime::General => match spectral {
            Some(t) => general_rhs(state, grid, t, config),
            None => general_rhs(state, grid, &SpectralTable::strong(grid), config),
        },
    }
}

/// A kernel bound to a grid and its spectral table.
#[derive(Debug, Clone)]
pub struct RhsEvaluator<'g> {
    grid: &'g MomentumGrid,
    spectral: SpectralTable,
    config: KernelConfig,
    rate_scale: OnceLock<f64>,
}

impl<'g> RhsEvaluator<'g> {
    pub fn new(grid: &'g MomentumGrid, config: KernelConfig) -> Result<Self> {
        config.validate(grid)?;
        Ok(Self {
            grid,
            spectral: SpectralTable::strong(grid),
            config,
            rate_scale: OnceLock::new(),
        })
    }

    pub fn with_spectral(
        grid: &'g MomentumGrid,
        spectral: SpectralTable,
        config: KernelConfig,
    ) -> Result<Self> {
        config.validate(grid)?;
        if spectral.len() != grid.len() {
            return Err(Error::InvalidKernel(
                "spectral table does not match grid".into(),
            ));
        }
        Ok(Self {
            grid,
            spectral,
            config,
            rate_scale: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &MomentumGrid {
        self.grid
    }

    pub fn spectral(&self) -> &SpectralTable {
        &self.spectral
    }

    pub fn config(&self) -> &KernelConfig {
        &self.config
    }

    pub fn evaluate(&self, state: &DistributionState) -> Result<RhsField> {
        rhs(state, self.grid, Some(&self.spectral), &self.config)
    }

    /// Reference rate `2 pi J^2 <delta>` over all `(k, p, q)`.
    pub fn rate_scale(&self) -> f64 {
        *self
            .rate_scale
            .get_or_init(|| rate_scale(self.grid, &self.spectral, &self.config))
    }

    /// `sup |∂t f|` in units of [`RhsEvaluator::rate_scale`].
    pub fn residual_of(&self, rhs: &RhsField) -> f64 {
        rhs.sup_norm() / self.rate_scale()
    }
}

/// Energy mismatch of the elastic reference process for each regime.
pub(crate) fn reference_mismatch(
    regime: Regime,
    grid: &MomentumGrid,
    spectral: &SpectralTable,
    k: usize,
    p: usize,
    q: usize,
    k3: usize,
) -> f64 {
    match regime {
        Regime::Strong => 0.5 * (grid.j(k3) + grid.j(q) - grid.j(k) - grid.j(p)),
        Regime::Weak => grid.j(k) + grid.j(p) - grid.j(k3) - grid.j(q),
        Regime::General => {
            let e = |i: usize| spectral.point(i).e(Band::Minus);
            e(k3) - e(p) + e(q) - e(k)
        }
    }
}

/// `2 pi J^2` times the mean broadened delta of the reference process.
pub fn rate_scale(grid: &MomentumGrid, spectral: &SpectralTable, config: &KernelConfig) -> f64 {
    let n = grid.len();
    let mut sum = 0.0;
    for k in 0..n {
        for p in 0..n {
            let kp = grid.add(k, p);
            for q in 0..n {
                let k3 = grid.sub(kp, q);
                sum += delta_broadened(
                    reference_mismatch(config.regime, grid, spectral, k, p, q, k3),
                    config.eta,
                );
            }
        }
    }
    let j = grid.params().j;
    2.0 * PI * j * j * sum / (n * n * n) as f64
}
