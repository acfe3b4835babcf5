use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::{CurveError, Edge, IVec, MarkedPoint, Multiplier, TropicalCurve, Vertex};
use crate::exactmath::{fmt_rational, Int, Rational};
use crate::valuegroup::{Alpha, MulValue};

impl TropicalCurve {
    /// Inserts a 2-valent vertex at every marked point.
    ///
    /// Children of edge `e` are named `e[0]`, `e[1]`, ...; the vertex at
    /// fraction `t` is named `e:t`. The first child keeps the tail lift, the
    /// last child carries the whole deck shift. Returns the new vertex indices
    /// in the order of `points`.
    pub fn subdivide(&self, points: &[MarkedPoint]) -> Result<(TropicalCurve, Vec<usize>), CurveError> {
        let mut per_edge: BTreeMap<usize, Vec<(Rational, usize)>> = BTreeMap::new();
        for (k, p) in points.iter().enumerate() {
            let id = &self.edges[p.edge].id;
            if !p.t.is_positive() || p.t >= Rational::one() {
                return Err(CurveError::MarkOutOfRange { edge: id.clone(), t: fmt_rational(&p.t) });
            }
            let list = per_edge.entry(p.edge).or_default();
            if list.iter().any(|(t, _)| *t == p.t) {
                return Err(CurveError::DuplicateMark { edge: id.clone(), t: fmt_rational(&p.t) });
            }
            list.push((p.t.clone(), k));
        }
        if per_edge.is_empty() {
            return Ok((self.clone(), Vec::new()));
        }

        let mut vertices = self.vertices.clone();
        let mut edges = Vec::new();
        let mut new_ids = vec![0; points.len()];
        for (i, e) in self.edges.iter().enumerate() {
            let Some(list) = per_edge.get_mut(&i) else {
                edges.push(e.clone());
                continue;
            };
            list.sort();
            let tail_pos = &self.vertices[e.tail].pos;
            let mut prev_vertex = e.tail;
            let mut prev_t = Rational::zero();
            for (child, (t, k)) in list.iter().enumerate() {
                let pos = [0, 1].map(|c| &tail_pos[c] + t * &e.length * Int::from(e.m[c]));
                vertices.push(Vertex { id: format!("{}:{}", e.id, fmt_rational(t)), pos });
                let v = vertices.len() - 1;
                new_ids[*k] = v;
                edges.push(Edge {
                    id: format!("{}[{child}]", e.id),
                    tail: prev_vertex,
                    head: v,
                    m: e.m,
                    length: (t - &prev_t) * &e.length,
                    shift: [0, 0],
                });
                prev_vertex = v;
                prev_t = t.clone();
            }
            edges.push(Edge {
                id: format!("{}[{}]", e.id, list.len()),
                tail: prev_vertex,
                head: e.head,
                m: e.m,
                length: (Rational::one() - prev_t) * &e.length,
                shift: e.shift,
            });
        }
        Ok((TropicalCurve { lattice: self.lattice.clone(), vertices, edges }, new_ids))
    }

    /// Moves each vertex lift by a lattice vector, given in lattice
    /// coordinates per vertex, and adjusts the deck shifts to match.
    pub fn relift(&self, moves: &[IVec]) -> TropicalCurve {
        assert_eq!(moves.len(), self.vertices.len(), "one move per vertex");
        let mut out = self.clone();
        for (v, mv) in out.vertices.iter_mut().zip(moves) {
            let d = self.lattice.point(&super::qvec(mv[0], mv[1]));
            v.pos = [0, 1].map(|k| &v.pos[k] + &d[k]);
        }
        for e in &mut out.edges {
            let (t, h) = (moves[e.tail], moves[e.head]);
            e.shift = [e.shift[0] + h[0] - t[0], e.shift[1] + h[1] - t[1]];
        }
        out
    }

    /// Relifts every vertex into the fundamental parallelogram with corner
    /// at lattice coordinates `offset`.
    pub fn relift_into_domain(&self, offset: &[Rational; 2]) -> TropicalCurve {
        let moves: Vec<IVec> = self
            .vertices
            .iter()
            .map(|v| {
                let st = self.lattice.coords(&v.pos);
                [0, 1].map(|k| -i64::try_from((&st[k] - &offset[k]).floor().to_integer()).expect("lift too large"))
            })
            .collect();
        self.relift(&moves)
    }

    /// Applies a unimodular change of coordinates `x ↦ A·x` to the torus.
    ///
    /// Multipliers become `α'_{ik} = ∏_j α_{ij}^{A_kj}`.
    pub fn transform(&self, a: [[i64; 2]; 2]) -> Result<TropicalCurve, CurveError> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.abs() != 1 {
            return Err(CurveError::NotUnimodular(a));
        }
        let apply_i = |x: IVec| -> IVec { [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]] };
        let apply_q = |x: &[Rational; 2]| -> [Rational; 2] {
            [0, 1].map(|r| &x[0] * Int::from(a[r][0]) + &x[1] * Int::from(a[r][1]))
        };
        let lambda = self.lattice.lambda.map(apply_i);
        let old = |i: usize, j: usize| self.lattice.multiplier(Alpha::at(i, j)).clone();
        let new_multiplier = |i: usize, k: usize| -> Multiplier {
            match old(i, 0) {
                Multiplier::Formal(_) | Multiplier::Polar(_) => {
                    let mut acc = MulValue::one();
                    for j in 0..2 {
                        let (Multiplier::Formal(v) | Multiplier::Polar(v)) = old(i, j) else { unreachable!() };
                        acc = acc.mul(&v.pow_int(a[k][j]));
                    }
                    if matches!(old(i, 0), Multiplier::Formal(_)) {
                        Multiplier::Formal(acc)
                    } else {
                        Multiplier::Polar(acc)
                    }
                }
                Multiplier::Numeric(_) => {
                    let mut acc = Complex64::new(1.0, 0.0);
                    for j in 0..2 {
                        let Multiplier::Numeric(z) = old(i, j) else { unreachable!() };
                        acc *= z.powi(a[k][j] as i32);
                    }
                    Multiplier::Numeric(acc)
                }
            }
        };
        let multipliers = Alpha::ALL.map(|al| {
            let (i, k) = al.index();
            new_multiplier(i, k)
        });
        let lattice = super::PeriodLattice::new(lambda, multipliers)?;
        Ok(TropicalCurve {
            lattice,
            vertices: self.vertices.iter().map(|v| Vertex { id: v.id.clone(), pos: apply_q(&v.pos) }).collect(),
            edges: self.edges.iter().map(|e| Edge { m: apply_i(e.m), ..e.clone() }).collect(),
        })
    }

    /// Reverses the orientation of one edge.
    pub fn reverse_edge(&self, e: usize) -> TropicalCurve {
        let mut out = self.clone();
        let edge = &mut out.edges[e];
        std::mem::swap(&mut edge.tail, &mut edge.head);
        edge.m = [-edge.m[0], -edge.m[1]];
        edge.shift = [-edge.shift[0], -edge.shift[1]];
        out
    }

    /// Same curve with every weight vector scaled by `k` and every length divided by `k`.
    pub fn scale_weights(&self, k: i64) -> TropicalCurve {
        assert!(k >= 1);
        let mut out = self.clone();
        for e in &mut out.edges {
            e.m = [e.m[0] * k, e.m[1] * k];
            e.length = &e.length / Int::from(k);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::curve::validate;
    use crate::exactmath::rat;

    #[test]
    fn subdivide_theta_once() {
        let c = catalog::theta();
        let (s, ids) = c.subdivide(&[MarkedPoint { edge: 0, t: rat(1, 3) }]).unwrap();
        assert_eq!(s.vertices.len(), 3);
        assert_eq!(s.edges.len(), 4);
        assert_eq!(s.genus(), 2);
        assert_eq!(validate(&s), vec![]);
        assert_eq!(s.vertices[ids[0]].id, "e1:1/3");
        assert_eq!(s.vertices[ids[0]].pos, [rat(1, 3), rat(0, 1)]);
    }

    #[test]
    fn subdivide_nothing_is_identity() {
        let c = catalog::theta();
        assert_eq!(c.subdivide(&[]).unwrap().0, c);
    }

    #[test]
    fn subdivide_rejects_bad_marks() {
        let c = catalog::theta();
        assert!(c.subdivide(&[MarkedPoint { edge: 0, t: rat(1, 1) }]).is_err());
        assert!(c
            .subdivide(&[MarkedPoint { edge: 0, t: rat(1, 2) }, MarkedPoint { edge: 0, t: rat(1, 2) }])
            .is_err());
    }

    #[test]
    fn subdivide_shifted_edge_keeps_lift_relation() {
        let c = catalog::theta();
        let (s, _) = c
            .subdivide(&[MarkedPoint { edge: 2, t: rat(1, 4) }, MarkedPoint { edge: 2, t: rat(2, 3) }])
            .unwrap();
        assert_eq!(validate(&s), vec![]);
        assert_eq!(s.edges.len(), 5);
    }

    #[test]
    fn relift_theta_head_vertex() {
        let c = catalog::theta();
        let r = c.relift(&[[0, 0], [1, 0]]);
        assert_eq!(validate(&r), vec![]);
        let shifts: Vec<IVec> = r.edges.iter().map(|e| e.shift).collect();
        assert_eq!(shifts, vec![[1, 0], [2, 0], [2, 1]]);
        let back = r.relift(&[[0, 0], [-1, 0]]);
        assert_eq!(back, c);
    }

    #[test]
    fn relift_zero_is_identity() {
        let c = catalog::theta();
        assert_eq!(c.relift(&[[0, 0], [0, 0]]), c);
    }

    #[test]
    fn transform_roundtrip_and_invariants() {
        let c = catalog::theta();
        assert_eq!(c.transform([[1, 0], [0, 1]]).unwrap(), c);
        let t = c.transform([[1, 1], [0, 1]]).unwrap();
        assert_eq!(validate(&t), vec![]);
        assert_eq!(t.genus(), 2);
        assert_eq!(t.delta(), 1);
        assert_eq!(t.vertex_weight(0).unwrap(), 1);
        let back = t.transform([[1, -1], [0, 1]]).unwrap();
        assert_eq!(back.vertices, c.vertices);
        assert_eq!(back.edges, c.edges);
        assert_eq!(back.lattice.lambda, c.lattice.lambda);
        assert!(c.transform([[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn relift_into_domain_lands_in_domain() {
        let c = catalog::theta().relift(&[[3, -2], [-1, 5]]);
        let off = [rat(-1, 5), rat(-1, 7)];
        let r = c.relift_into_domain(&off);
        for v in &r.vertices {
            let st = r.lattice.coords(&v.pos);
            for k in 0..2 {
                let x = &st[k] - &off[k];
                assert!(x >= rat(0, 1) && x < rat(1, 1));
            }
        }
        assert_eq!(validate(&r), vec![]);
    }
}
