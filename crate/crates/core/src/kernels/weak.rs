//! Weak-coupling kernel for a general spin-dependent two-body potential.
//! Only the hole planes carry the occupation `n_{k,s}`; the particle planes
//! are left untouched.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{bracket, delta_broadened, physical_input, KernelConfig, RhsField};
use crate::error::Result;
use crate::lattice::MomentumGrid;
use crate::spectrum::Band;
use crate::state::{plane, DistributionState, Spin, PLANES};

/// `∂t n_{k,s}` with the direct and same-spin exchange terms; the pair
/// `(k, p)` scatters into `(k - q, p + q)`.
pub fn weak_rhs(
    state: &DistributionState,
    grid: &MomentumGrid,
    config: &KernelConfig,
) -> Result<RhsField> {
    state.check_grid(grid)?;
    config.validate(grid)?;
    let state = physical_input(state);
    let potential = config.potential_or_default(grid);
    let n = grid.len();
    let prefactor = -2.0 * PI / (n * n) as f64;
    let occ = |s: Spin, k: usize| state.get(Band::Minus, s, k);

    let per_point: Vec<[f64; PLANES]> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = [0.0; PLANES];
            let jk = grid.j(k);
            for p in 0..n {
                let jp = grid.j(p);
                let kp = grid.sub(k, p);
                for q in 0..n {
                    let k1 = grid.sub(k, q);
                    let p1 = grid.add(p, q);
                    let w = delta_broadened(jk + jp - grid.j(k1) - grid.j(p1), config.eta);
                    if w == 0.0 {
                        continue;
                    }
                    let exchange_q = grid.sub(kp, q);
                    let same = potential.same[q];
                    let opposite = potential.opposite[q];
                    for s in Spin::ALL {
                        let nk = occ(s, k);
                        let nk1 = occ(s, k1);
                        let mut sum = 0.0;
                        for s2 in [s, s.flip()] {
                            let v = if s2 == s { same } else { opposite };
                            let coef = (same + opposite) * v;
                            if coef != 0.0 {
                                sum += coef * bracket(nk, occ(s2, p), nk1, occ(s2, p1));
                            }
                        }
                        let exchange = same * potential.same[exchange_q];
                        if exchange != 0.0 {
                            sum -= exchange * bracket(nk, occ(s, p), nk1, occ(s, p1));
                        }
                        acc[plane(Band::Minus, s)] += w * sum;
                    }
                }
            }
            acc.map(|v| prefactor * v)
        })
        .collect();
    Ok(RhsField::from_points(per_point))
}
