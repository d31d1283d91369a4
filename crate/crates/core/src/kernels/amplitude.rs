//! Four-slot scattering amplitude built from rotation rows.
//!
//! Slots are ordered `(a at k3, d at k, c at q, b at p)`. The amplitude is
//! the signed sum over the on-site labels `X, Y, V` of the hopping-weighted
//! triple products; the collision weight is `(T/4)^2`.

/// Rotation row and dispersion value for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRow {
    pub row: [f64; 2],
    pub j: f64,
}

/// Literal triple loop over `X, Y, V`.
pub fn amplitude_sum_literal(slots: &[SlotRow; 4]) -> f64 {
    let [o1, o2, o3, o4] = slots.map(|s| s.row);
    let [j1, j2, j3, j4] = slots.map(|s| s.j);
    let mut total = 0.0;
    for x in 0..2 {
        let sign = if x == 0 { 1.0 } else { -1.0 };
        for y in 0..2 {
            for v in 0..2 {
                let w = 1 - v;
                let t = j1
                    * o1[y]
                    * (o2[x] * o3[v] * o4[v] - o2[v] * o3[x] * o4[w] + o2[v] * o3[v] * o4[x])
                    + j2 * o2[y]
                        * (o1[x] * o3[v] * o4[v] - o1[v] * o3[w] * o4[x] + o1[v] * o3[x] * o4[v])
                    + j3 * o3[y]
                        * (o1[v] * o2[v] * o4[x] - o1[x] * o2[v] * o4[w] + o1[v] * o2[x] * o4[v])
                    + j4 * o4[y]
                        * (o1[v] * o2[v] * o3[x] - o1[v] * o2[x] * o3[w] + o1[x] * o2[v] * o3[v]);
                total += sign * t;
            }
        }
    }
    total
}

/// Same sum with the `X, Y, V` loops carried out in closed form.
#[inline]
pub fn amplitude_sum(slots: &[SlotRow; 4]) -> f64 {
    let o = slots.map(|s| s.row);
    let s = o.map(|r| r[0] - r[1]);
    let t = o.map(|r| r[0] + r[1]);
    let dot = |i: usize, j: usize| o[i][0] * o[j][0] + o[i][1] * o[j][1];
    let xdot = |i: usize, j: usize| o[i][0] * o[j][1] + o[i][1] * o[j][0];
    let (d12, d14, d23, d34) = (dot(0, 1), dot(0, 3), dot(1, 2), dot(2, 3));
    let (x13, x24) = (xdot(0, 2), xdot(1, 3));

    slots[0].j * t[0] * (s[1] * d34 - s[2] * x24 + s[3] * d23)
        + slots[1].j * t[1] * (s[0] * d34 - s[3] * x13 + s[2] * d14)
        + slots[2].j * t[2] * (s[3] * d12 - s[0] * x24 + s[1] * d14)
        + slots[3].j * t[3] * (s[2] * d12 - s[1] * x13 + s[0] * d23)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn slot(theta: f64, j: f64, plus: bool) -> SlotRow {
        let (s, c) = theta.sin_cos();
        SlotRow {
            row: if plus { [-s, c] } else { [c, s] },
            j,
        }
    }

    #[test]
    fn identity_rows_reduce_to_hopping_combinations() {
        // all-hole rows: T / 4 = (J1 + J2 + J3 + J4) / 2
        let minus = |j| SlotRow { row: [1.0, 0.0], j };
        let t = amplitude_sum_literal(&[minus(0.3), minus(-0.2), minus(0.5), minus(0.1)]);
        assert!((t / 4.0 - 0.5 * (0.3 - 0.2 + 0.5 + 0.1)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn closed_form_matches_loops(
            th in proptest::array::uniform4(-1.5f64..1.5),
            js in proptest::array::uniform4(-1.0f64..1.0),
            bands in proptest::array::uniform4(any::<bool>()),
        ) {
            let slots: [SlotRow; 4] = std::array::from_fn(|i| slot(th[i], js[i], bands[i]));
            let a = amplitude_sum(&slots);
            let b = amplitude_sum_literal(&slots);
            prop_assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()));
        }

        #[test]
        fn invariant_under_partner_and_reversal_swaps(
            th in proptest::array::uniform4(-1.5f64..1.5),
            js in proptest::array::uniform4(-1.0f64..1.0),
            bands in proptest::array::uniform4(any::<bool>()),
        ) {
            let s: [SlotRow; 4] = std::array::from_fn(|i| slot(th[i], js[i], bands[i]));
            let base = amplitude_sum(&s);
            let partner = amplitude_sum(&[s[2], s[3], s[0], s[1]]);
            let reversed = amplitude_sum(&[s[1], s[0], s[3], s[2]]);
            prop_assert!((partner - base).abs() <= 1e-13 * (1.0 + base.abs()));
            prop_assert!((reversed - base).abs() <= 1e-13 * (1.0 + base.abs()));
        }
    }
}
