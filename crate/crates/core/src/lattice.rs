//! Periodic hypercubic momentum grids and the nearest-neighbour dispersion.
//!
//! Hopping enters the Hamiltonian scaled by the coordination number `Z = 2d`,
//! so the tabulated dispersion is
//!
//! ```text
//! J_k = (J / d) * sum_i cos(k_i)
//! ```
//!
//! which keeps `|J_k| <= J` independent of the dimension. Momentum sums are
//! normalised as `(1/N) sum_k` with `N = prod_i n_i`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hubbard model parameters. Energies are in units of the hopping scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// On-site repulsion.
    pub u: f64,
    /// Hopping energy scale.
    pub j: f64,
    /// Spatial dimension, at least 2.
    pub dim: usize,
}

impl ModelParams {
    pub fn new(u: f64, j: f64, dim: usize) -> Result<Self> {
        let params = Self { u, j, dim };
        params.validate()?;
        Ok(params)
    }

    /// Hubbard model with `J = 1`.
    pub fn with_u(u: f64, dim: usize) -> Result<Self> {
        Self::new(u, 1.0, dim)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u.is_finite() && self.u >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "U must be finite and >= 0, got {}",
                self.u
            )));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(Error::InvalidModel(format!(
                "J must be finite and > 0, got {}",
                self.j
            )));
        }
        if self.dim < 2 {
            return Err(Error::InvalidModel(format!(
                "dimension must be >= 2, got {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// Coordination number of the hypercubic lattice.
    pub fn coordination(&self) -> usize {
        2 * self.dim
    }
}

/// Nearest-neighbour dispersion `J_k = (J/d) sum_i cos k_i`.
pub fn dispersion(params: &ModelParams, k: &[f64]) -> f64 {
    let sum: f64 = k.iter().map(|ki| ki.cos()).sum();
    params.j * sum / params.dim as f64
}

/// A `d`-dimensional periodic momentum grid with `k_i = 2 pi m_i / n_i`.
///
/// Points are stored in row-major order (last axis fastest). Addition and
/// negation tables make momentum arithmetic exact index arithmetic.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    params: ModelParams,
    sizes: Vec<usize>,
    strides: Vec<usize>,
    dispersion: Vec<f64>,
    add: Vec<u32>,
    neg: Vec<u32>,
}

impl MomentumGrid {
    pub fn new(params: ModelParams, sizes: &[usize]) -> Result<Self> {
        params.validate()?;
        if sizes.len() != params.dim {
            return Err(Error::DimensionMismatch {
                dims: sizes.len(),
                dim: params.dim,
            });
        }
        if let Some((axis, &size)) = sizes.iter().enumerate().find(|(_, &n)| n < 2) {
            return Err(Error::GridTooSmall { axis, size });
        }
        let n: usize = sizes.iter().product();
        if n > u32::MAX as usize {
            return Err(Error::InvalidModel(format!(
                "grid with {n} points is too large"
            )));
        }

        let mut strides = vec![1; sizes.len()];
        for axis in (0..sizes.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * sizes[axis + 1];
        }

        let mut grid = Self {
            params,
            sizes: sizes.to_vec(),
            strides,
            dispersion: Vec::with_capacity(n),
            add: Vec::new(),
            neg: Vec::with_capacity(n),
        };

        let mut k = vec![0.0; sizes.len()];
        for idx in 0..n {
            grid.momentum_into(idx, &mut k);
            grid.dispersion.push(dispersion(&params, &k));
        }

        let mut m = vec![0usize; sizes.len()];
        let mut other = vec![0usize; sizes.len()];
        for idx in 0..n {
            grid.coords_into(idx, &mut m);
            let negated: Vec<usize> = m
                .iter()
                .zip(&grid.sizes)
                .map(|(&mi, &ni)| (ni - mi) % ni)
                .collect();
            grid.neg.push(grid.index_of(&negated) as u32);
        }

        grid.add = vec![0; n * n];
        for a in 0..n {
            grid.coords_into(a, &mut m);
            for b in 0..n {
                grid.coords_into(b, &mut other);
                let mut idx = 0;
                for axis in 0..m.len() {
                    idx += ((m[axis] + other[axis]) % grid.sizes[axis]) * grid.strides[axis];
                }
                grid.add[a * n + b] = idx as u32;
            }
        }
        Ok(grid)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    /// Total number of grid points `N`.
    pub fn len(&self) -> usize {
        self.dispersion.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dispersion.is_empty()
    }

    /// Tabulated `J_k` in point order.
    pub fn dispersion(&self) -> &[f64] {
        &self.dispersion
    }

    #[inline]
    pub fn j(&self, idx: usize) -> f64 {
        self.dispersion[idx]
    }

    /// Integer coordinates `m` of point `idx`.
    pub fn coords(&self, idx: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim()];
        self.coords_into(idx, &mut m);
        m
    }

    fn coords_into(&self, mut idx: usize, out: &mut [usize]) {
        for (c, &stride) in out.iter_mut().zip(&self.strides) {
            *c = idx / stride;
            idx %= stride;
        }
    }

    /// Momentum vector of point `idx`, components in `[0, 2 pi)`.
    pub fn momentum(&self, idx: usize) -> Vec<f64> {
        let mut k = vec![0.0; self.dim()];
        self.momentum_into(idx, &mut k);
        k
    }

    fn momentum_into(&self, idx: usize, out: &mut [f64]) {
        let mut rest = idx;
        for ((k, &stride), &size) in out.iter_mut().zip(&self.strides).zip(&self.sizes) {
            let m = rest / stride;
            rest %= stride;
            *k = 2.0 * PI * m as f64 / size as f64;
        }
    }

    /// Flat index of integer coordinates, reduced modulo the grid.
    pub fn index_of(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.sizes)
            .zip(&self.strides)
            .map(|((&m, &n), &s)| (m % n) * s)
            .sum()
    }

    /// Index of `k + q` modulo the grid.
    #[inline]
    pub fn add(&self, k: usize, q: usize) -> usize {
        self.add[k * self.len() + q] as usize
    }

    /// Index of `-k` modulo the grid.
    #[inline]
    pub fn neg(&self, k: usize) -> usize {
        self.neg[k] as usize
    }

    /// Index of `k - q` modulo the grid.
    #[inline]
    pub fn sub(&self, k: usize, q: usize) -> usize {
        self.add(k, self.neg(q))
    }

    /// Mean spacing between distinct dispersion values.
    pub fn mean_energy_spacing(&self) -> f64 {
        let mut values = self.dispersion.clone();
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * self.params.j);
        if values.len() < 2 {
            return self.params.j;
        }
        (values[values.len() - 1] - values[0]) / (values.len() - 1) as f64
    }

    /// Indices of points where `J_k` vanishes to round-off.
    pub fn zero_dispersion_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.dispersion[i].abs() <= 1e-12 * self.params.j)
            .collect()
    }
}

/// Build a grid from model parameters and per-axis sizes.
pub fn build_grid(params: ModelParams, sizes: &[usize]) -> Result<MomentumGrid> {
    MomentumGrid::new(params, sizes)
}
