//! The evolved distribution functions `f^a_{k,s}`.
//!
//! Storage is one flat vector of four planes in the order
//! `(+, up), (+, down), (-, up), (-, down)`, each plane holding the grid
//! points in row-major order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::MomentumGrid;
use crate::spectrum::Band;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    #[inline]
    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// Number of `(band, spin)` planes.
pub const PLANES: usize = 4;

/// Plane index of `(band, spin)` in storage order.
#[inline]
pub fn plane(band: Band, spin: Spin) -> usize {
    let b = match band {
        Band::Plus => 0,
        Band::Minus => 1,
    };
    2 * b + spin.index()
}

/// `(band, spin)` of a plane index.
pub fn plane_labels(p: usize) -> (Band, Spin) {
    let band = if p < 2 { Band::Plus } else { Band::Minus };
    let spin = if p.is_multiple_of(2) {
        Spin::Up
    } else {
        Spin::Down
    };
    (band, spin)
}

/// Occupations over `(band, spin, k)` at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionState {
    points: usize,
    f: Vec<f64>,
    pub t: f64,
}

impl DistributionState {
    /// All planes filled with `value`.
    pub fn uniform(points: usize, value: f64) -> Self {
        Self {
            points,
            f: vec![value; PLANES * points],
            t: 0.0,
        }
    }

    /// The insulating ground state: `f^+ = 0`, `f^- = 1`.
    pub fn ground(points: usize) -> Self {
        let mut s = Self::uniform(points, 0.0);
        for spin in Spin::ALL {
            s.plane_mut(Band::Minus, spin).fill(1.0);
        }
        s
    }

    pub fn from_vec(points: usize, f: Vec<f64>, t: f64) -> Result<Self> {
        if f.len() != PLANES * points {
            return Err(Error::StateShape {
                expected: PLANES * points,
                got: f.len(),
            });
        }
        Ok(Self { points, f, t })
    }

    /// Builds a state by evaluating `value(band, spin, k)` everywhere.
    pub fn from_fn(points: usize, mut value: impl FnMut(Band, Spin, usize) -> f64) -> Self {
        let mut f = Vec::with_capacity(PLANES * points);
        for p in 0..PLANES {
            let (band, spin) = plane_labels(p);
            f.extend((0..points).map(|k| value(band, spin, k)));
        }
        Self { points, f, t: 0.0 }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.f
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.f
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.f
    }

    #[inline]
    pub fn get(&self, band: Band, spin: Spin, k: usize) -> f64 {
        self.f[plane(band, spin) * self.points + k]
    }

    #[inline]
    pub fn set(&mut self, band: Band, spin: Spin, k: usize, value: f64) {
        let n = self.points;
        self.f[plane(band, spin) * n + k] = value;
    }

    pub fn plane(&self, band: Band, spin: Spin) -> &[f64] {
        let start = plane(band, spin) * self.points;
        &self.f[start..start + self.points]
    }

    pub fn plane_mut(&mut self, band: Band, spin: Spin) -> &mut [f64] {
        let start = plane(band, spin) * self.points;
        &mut self.f[start..start + self.points]
    }

    pub fn check_grid(&self, grid: &MomentumGrid) -> Result<()> {
        if self.points != grid.len() {
            return Err(Error::StateShape {
                expected: PLANES * grid.len(),
                got: self.f.len(),
            });
        }
        Ok(())
    }

    pub fn min(&self) -> f64 {
        self.f.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.f.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.f.iter().all(|v| v.is_finite())
    }

    /// Largest distance of any entry outside `[0, 1]`.
    pub fn overshoot(&self) -> f64 {
        self.f
            .iter()
            .map(|&v| (-v).max(v - 1.0).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Clamps into `[0, 1]`, returning the largest correction applied.
    pub fn clamp_physical(&mut self) -> f64 {
        let mut worst = 0.0f64;
        for v in &mut self.f {
            let c = v.clamp(0.0, 1.0);
            worst = worst.max((c - *v).abs());
            *v = c;
        }
        worst
    }

    /// Sup-norm distance to another state of the same shape.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.f
            .iter()
            .zip(&other.f)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Copy with spin labels exchanged.
    pub fn spin_swapped(&self) -> Self {
        let mut out = self.clone();
        for band in Band::ALL {
            out.plane_mut(band, Spin::Up)
                .copy_from_slice(self.plane(band, Spin::Down));
            out.plane_mut(band, Spin::Down)
                .copy_from_slice(self.plane(band, Spin::Up));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_order_matches_documentation() {
        assert_eq!(plane(Band::Plus, Spin::Up), 0);
        assert_eq!(plane(Band::Plus, Spin::Down), 1);
        assert_eq!(plane(Band::Minus, Spin::Up), 2);
        assert_eq!(plane(Band::Minus, Spin::Down), 3);
        for p in 0..PLANES {
            let (b, s) = plane_labels(p);
            assert_eq!(plane(b, s), p);
        }
    }

    #[test]
    fn ground_state_layout() {
        let s = DistributionState::ground(3);
        assert_eq!(
            s.as_slice(),
            &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn clamp_reports_largest_correction() {
        let mut s = DistributionState::from_vec(1, vec![-1e-4, 0.5, 1.0 + 2e-4, 1.0], 0.0).unwrap();
        assert!((s.overshoot() - 2e-4).abs() < 1e-15);
        let c = s.clamp_physical();
        assert!((c - 2e-4).abs() < 1e-15);
        assert_eq!(s.as_slice(), &[0.0, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(DistributionState::from_vec(2, vec![0.0; 7], 0.0).is_err());
    }

    #[test]
    fn spin_swap_is_involution() {
        let s = DistributionState::from_fn(2, |b, sp, k| {
            (b.index() * 4 + sp.index() * 2 + k) as f64 / 10.0
        });
        assert_ne!(s.spin_swapped(), s);
        assert_eq!(s.spin_swapped().spin_swapped(), s);
    }
}
