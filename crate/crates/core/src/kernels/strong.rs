//! Strong-coupling kernel: the rotation is the identity and every channel
//! is elastic, so the weights depend only on the dispersion.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{delta_broadened, physical_input, Channel, KernelConfig, PointOccupations, RhsField};
use crate::error::Result;
use crate::lattice::MomentumGrid;
use crate::spectrum::Band;
use crate::state::{plane, DistributionState, Spin, PLANES};

/// Elastic channels for an outgoing band `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrongChannel {
    /// Same band in all four slots.
    Pp,
    /// `k` and `q` keep band `d`, the partner pair is in the other band.
    Ph,
    /// `k` and `k3` keep band `d`, the partner pair is in the other band.
    Ph2,
}

impl StrongChannel {
    pub const ALL: [StrongChannel; 3] = [StrongChannel::Pp, StrongChannel::Ph, StrongChannel::Ph2];

    /// Band assignment for outgoing band `d`.
    pub fn channel(self, d: Band) -> Channel {
        let e = d.flip();
        match self {
            StrongChannel::Pp => Channel::new(d, d, d, d),
            StrongChannel::Ph => Channel::new(e, e, d, d),
            StrongChannel::Ph2 => Channel::new(d, e, e, d),
        }
    }
}

/// Squared amplitude of a strong channel. On the energy shell
/// `J_k + J_p = J_k3 + J_q` these equal `(J_q + J_k3)^2`, `(J_q - J_p)^2`
/// and `(J_k3 - J_p)^2`.
#[inline]
pub fn cross_section_strong(
    channel: StrongChannel,
    j_k: f64,
    j_p: f64,
    j_q: f64,
    j_k3: f64,
) -> f64 {
    let amp = match channel {
        StrongChannel::Pp => 0.5 * (j_k + j_p + j_k3 + j_q),
        StrongChannel::Ph => 0.5 * (j_k3 + j_p - j_k - j_q),
        StrongChannel::Ph2 => 0.5 * (j_k + j_k3 - j_p - j_q),
    };
    amp * amp
}

/// Strong-coupling right-hand side for both bands.
pub fn strong_rhs(
    state: &DistributionState,
    grid: &MomentumGrid,
    config: &KernelConfig,
) -> Result<RhsField> {
    state.check_grid(grid)?;
    config.validate(grid)?;
    let state = physical_input(state);
    let n = grid.len();
    let prefactor = -2.0 * PI / (n * n) as f64;

    let mut enabled = [[false; 3]; 2];
    for d in Band::ALL {
        for (i, ch) in StrongChannel::ALL.iter().enumerate() {
            enabled[d.index()][i] = config.channels.contains(ch.channel(d));
        }
    }

    let occ = PointOccupations::new(&state);
    let (f, g) = (&occ.f, &occ.g);
    let pair =
        |d: usize,
         b: usize,
         a: usize,
         c: usize,
         fk: &[f64; 4],
         gk: &[f64; 4],
         fp: &[f64; 4],
         gp: &[f64; 4],
         f3: &[f64; 4],
         g3: &[f64; 4],
         fq: &[f64; 4],
         gq: &[f64; 4]| { fk[d] * fp[b] * g3[a] * gq[c] - f3[a] * fq[c] * gk[d] * gp[b] };

    let per_point: Vec<[f64; PLANES]> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = [0.0; PLANES];
            let jk = grid.j(k);
            let (fk, gk) = (&f[k], &g[k]);
            for p in 0..n {
                let kp = grid.add(k, p);
                let jp = grid.j(p);
                let (fp, gp) = (&f[p], &g[p]);
                for q in 0..n {
                    let k3 = grid.sub(kp, q);
                    let (jq, j3) = (grid.j(q), grid.j(k3));
                    let w = delta_broadened(0.5 * (j3 + jq - jk - jp), config.eta);
                    if w == 0.0 {
                        continue;
                    }
                    let xs = StrongChannel::ALL.map(|ch| cross_section_strong(ch, jk, jp, jq, j3));
                    let (f3, g3, fq, gq) = (&f[k3], &g[k3], &f[q], &g[q]);
                    for d in Band::ALL {
                        let on = enabled[d.index()];
                        let e = d.flip();
                        for s in Spin::ALL {
                            let sb = s.flip();
                            let (ds, dsb, es, esb) =
                                (plane(d, s), plane(d, sb), plane(e, s), plane(e, sb));
                            let mut sum = 0.0;
                            if on[0] {
                                sum +=
                                    xs[0] * pair(ds, dsb, ds, dsb, fk, gk, fp, gp, f3, g3, fq, gq);
                            }
                            if on[1] {
                                sum +=
                                    xs[1] * pair(ds, esb, es, dsb, fk, gk, fp, gp, f3, g3, fq, gq);
                            }
                            if on[2] {
                                sum +=
                                    xs[2] * pair(ds, esb, ds, esb, fk, gk, fp, gp, f3, g3, fq, gq);
                            }
                            acc[ds] += w * sum;
                        }
                    }
                }
            }
            acc.map(|v| prefactor * v)
        })
        .collect();
    Ok(RhsField::from_points(per_point))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_section_examples() {
        // on-shell pp with J_q = -J_k3 requires J_k = -J_p
        assert_eq!(
            cross_section_strong(StrongChannel::Pp, 0.4, -0.4, -0.7, 0.7),
            0.0
        );
        // on-shell ph with J_q = J_p requires J_k3 = J_k
        assert_eq!(
            cross_section_strong(StrongChannel::Ph, 0.3, 0.5, 0.5, 0.3),
            0.0
        );
        assert_eq!(
            cross_section_strong(StrongChannel::Pp, 1.0, 1.0, 1.0, 1.0),
            4.0
        );
    }

    #[test]
    fn on_shell_matches_printed_forms() {
        let (jk, jp, jq) = (0.7, -0.2, 0.35);
        let j3 = jk + jp - jq;
        let close = |a: f64, b: f64| (a - b).abs() < 1e-15;
        assert!(close(
            cross_section_strong(StrongChannel::Pp, jk, jp, jq, j3),
            (jq + j3).powi(2)
        ));
        assert!(close(
            cross_section_strong(StrongChannel::Ph, jk, jp, jq, j3),
            (jq - jp).powi(2)
        ));
        assert!(close(
            cross_section_strong(StrongChannel::Ph2, jk, jp, jq, j3),
            (j3 - jp).powi(2)
        ));
    }

    #[test]
    fn channels_are_elastic() {
        for d in Band::ALL {
            for ch in StrongChannel::ALL {
                assert!(ch.channel(d).is_elastic());
            }
        }
    }
}
