use serde::Serialize;

use num_traits::{Signed, Zero};

use super::{CurveError, IVec, QVec, TropicalCurve};
use crate::exactmath::{fmt_rational, Int, Rational};

/// Which family of walls an edge crosses: `B1` walls are the translates of
/// the `λ₂`-side (crossed when `s` passes an integer), `B2` walls the
/// translates of the `λ₁`-side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    B1,
    B2,
}

/// All crossings of one edge with one wall family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub edge: usize,
    pub side: Side,
    /// Number of walls crossed.
    pub count: u64,
    /// Net count, positive when crossing in the increasing coordinate direction.
    pub signed_count: i64,
    /// Weight vector oriented from the inside to the outside of the domain.
    pub outward: IVec,
}

/// Crossings of the lifted edge segments with the walls of the tiling by
/// translates of `Δ = {s·λ₁ + t·λ₂ : (s, t) ∈ offset + [0,1)²}`.
///
/// `offset` is given in lattice coordinates. Every crossing is counted as
/// leaving a translate of `Δ` through its far side (`s = 1` or `t = 1`).
pub fn crossings(curve: &TropicalCurve, offset: &QVec) -> Result<Vec<Crossing>, CurveError> {
    let lat = &curve.lattice;
    let local: Vec<QVec> = curve
        .vertices
        .iter()
        .map(|v| {
            let st = lat.coords(&v.pos);
            [&st[0] - &offset[0], &st[1] - &offset[1]]
        })
        .collect();
    for (v, st) in curve.vertices.iter().zip(&local) {
        if st[0].is_integer() || st[1].is_integer() {
            return Err(CurveError::DegenerateOffset(format!("vertex {} lies on a wall", v.id)));
        }
    }

    let mut out = Vec::new();
    for (i, e) in curve.edges.iter().enumerate() {
        let step = [0, 1].map(|k| &e.length * Int::from(e.m[k]));
        let d = lat.coords(&step);
        let a = &local[e.tail];
        let b = [&a[0] + &d[0], &a[1] + &d[1]];
        for (axis, side) in [(0usize, Side::B1), (1, Side::B2)] {
            if d[axis].is_zero() {
                continue;
            }
            let other = 1 - axis;
            let (lo, hi) = if d[axis].is_positive() { (&a[axis], &b[axis]) } else { (&b[axis], &a[axis]) };
            let first: Int = lo.floor().to_integer() + 1;
            let last = hi.ceil().to_integer() - 1;
            let mut k = first.clone();
            let mut count = 0u64;
            while k <= last {
                let tau = (Rational::from_integer(k.clone()) - &a[axis]) / &d[axis];
                let cross = &a[other] + &tau * &d[other];
                if cross.is_integer() {
                    return Err(CurveError::DegenerateOffset(format!(
                        "edge {} passes through a corner at parameter {}",
                        e.id,
                        fmt_rational(&tau)
                    )));
                }
                count += 1;
                k += 1;
            }
            if count == 0 {
                continue;
            }
            let sign = if d[axis].is_positive() { 1 } else { -1 };
            out.push(Crossing {
                edge: i,
                side,
                count,
                signed_count: sign * count as i64,
                outward: [sign * e.m[0], sign * e.m[1]],
            });
        }
    }
    Ok(out)
}

/// Offsets tried in turn when one is degenerate: `(1/p, 1/p²)` for the
/// first `n` primes.
pub fn offset_sequence(n: usize) -> Vec<QVec> {
    let mut out = Vec::with_capacity(n);
    let mut p = 2i64;
    while out.len() < n {
        if (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            out.push([
                Rational::new(Int::from(1), Int::from(p)),
                Rational::new(Int::from(1), Int::from(p * p)),
            ]);
        }
        p += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exactmath::rat;

    fn generic() -> QVec {
        [rat(-1, 5), rat(-1, 7)]
    }

    #[test]
    fn theta_straight_edge_crosses_nothing() {
        let c = catalog::theta();
        let xs = crossings(&c, &generic()).unwrap();
        assert!(xs.iter().all(|x| x.edge != 0));
    }

    #[test]
    fn theta_second_edge_crosses_b1_once() {
        let c = catalog::theta();
        let xs = crossings(&c, &generic()).unwrap();
        let e2: Vec<_> = xs.iter().filter(|x| x.edge == 1).collect();
        assert_eq!(e2.len(), 1);
        assert_eq!(e2[0].side, Side::B1);
        assert_eq!(e2[0].count, 1);
        // s decreases along (0,1) because s = (2x - y)/3
        assert_eq!(e2[0].signed_count, -1);
        assert_eq!(e2[0].outward, [0, -1]);
    }

    #[test]
    fn net_counts_match_shifts_when_lifts_lie_in_domain() {
        let c = catalog::theta();
        let xs = crossings(&c, &generic()).unwrap();
        for (i, e) in c.edges.iter().enumerate() {
            for (axis, side) in [(0, Side::B1), (1, Side::B2)] {
                let net: i64 = xs.iter().filter(|x| x.edge == i && x.side == side).map(|x| x.signed_count).sum();
                assert_eq!(net, -e.shift[axis], "edge {} side {side:?}", e.id);
            }
        }
    }

    #[test]
    fn vertex_on_wall_is_degenerate() {
        let c = catalog::theta();
        assert!(matches!(crossings(&c, &[rat(0, 1), rat(1, 3)]), Err(CurveError::DegenerateOffset(_))));
    }

    #[test]
    fn offsets_use_primes() {
        let o = offset_sequence(3);
        assert_eq!(o[0], [rat(1, 2), rat(1, 4)]);
        assert_eq!(o[2], [rat(1, 5), rat(1, 25)]);
    }
}
