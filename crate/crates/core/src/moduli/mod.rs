//! Deformation ranks, the dual flag space, rigidity, and curve counts.
//!
//! The vertex unknowns are `φ ∈ (ℤ²)^V`, vertex `v` occupying columns
//! `2v, 2v+1`. An edge imposes its primitive normal character on
//! `φ(head) - φ(tail)`; the torsion part of `N/N_e` disappears after
//! tensoring with `ℂ*`, so only the primitive normal matters.
//!
//! A 2-valent vertex can slide along its edge direction without changing
//! the map to the torus. Sliding modes are excluded from the kernel rank,
//! and in the counting matrix every unmarked 2-valent vertex gets one gauge
//! row pinning its coordinate along the edge.

mod bruteforce;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

pub use bruteforce::{
    count_solutions_mod, kernel_order_bruteforce, kernel_order_of_matrix, smallest_maximal_minor, BruteforceError,
};

use crate::curve::{normal, primitive, CurveError, Flag, IVec, MarkedPoint, TropicalCurve};
use crate::exactmath::{ext_gcd_i64, rank_rational, snf, solve_rational, Int, IntMatrix, Rational};
use crate::realize::{realizability, RealizabilityReport, RealizeError};
use crate::valuegroup::{EqualityMode, Verdict};

fn ivec_row(cols: usize, entries: &[(usize, i64)]) -> Vec<Int> {
    let mut row = vec![Int::zero(); cols];
    for &(c, x) in entries {
        row[c] += Int::from(x);
    }
    row
}

/// One row per edge: the primitive normal of the edge applied to
/// `φ(head) - φ(tail)`.
pub fn build_f(curve: &TropicalCurve) -> IntMatrix {
    let cols = 2 * curve.vertices.len();
    let mut f = IntMatrix::empty(cols);
    for e in &curve.edges {
        let n = normal(e.m);
        let (h, t) = (2 * e.head, 2 * e.tail);
        f.push_row(ivec_row(cols, &[(h, n[0]), (h + 1, n[1]), (t, -n[0]), (t + 1, -n[1])]));
    }
    f
}

/// Covector `n'` with `n'·m̂ = 1` for the primitive direction `m̂` of `m`.
pub fn gauge_covector(m: IVec) -> IVec {
    let ([p, q], _) = primitive(m);
    let (_, x, y) = ext_gcd_i64(p, q);
    [x, y]
}

/// Gauge rows for the 2-valent vertices of `curve` not listed in `skip`.
fn gauge_rows(curve: &TropicalCurve, skip: &[usize]) -> Vec<Vec<Int>> {
    let cols = 2 * curve.vertices.len();
    (0..curve.vertices.len())
        .filter(|v| !skip.contains(v) && curve.valence(*v) == 2)
        .map(|v| {
            let (_, m) = curve.incident(v)[0];
            let g = gauge_covector(m);
            ivec_row(cols, &[(2 * v, g[0]), (2 * v + 1, g[1])])
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ranks {
    pub rank_f: usize,
    /// Rank of the deformation space, sliding modes excluded.
    pub rank_kernel: i64,
    pub rank_cokernel: i64,
}

pub fn deformation_ranks(curve: &TropicalCurve) -> Ranks {
    let rank_f = rank_rational(&build_f(curve));
    Ranks {
        rank_f,
        rank_kernel: 2 * curve.vertices.len() as i64 - rank_f as i64 - curve.two_valent_count() as i64,
        rank_cokernel: curve.edges.len() as i64 - rank_f as i64,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualSpace {
    pub dimension: usize,
    /// `u_{v,e} = c_{v,e}·n_{v,e}` per flag, first nonzero `c` equal to 1.
    #[serde(skip)]
    pub generator: Vec<(Flag, [Rational; 2])>,
    #[serde(skip)]
    pub coefficients: Vec<Rational>,
}

/// Solution space of the flag conditions: `u_{v,e} ⊥ w_{v,e}`,
/// `u_{v,e} + u_{v',e} = 0` along each edge, `Σ_e u_{v,e} = 0` at each vertex.
pub fn dual_flag_space(curve: &TropicalCurve) -> DualSpace {
    let flags = curve.flags();
    let normals: Vec<IVec> = flags.iter().map(|&f| normal(curve.flag_vector(f))).collect();
    let n = flags.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let qi = |x: i64| Rational::from_integer(x.into());
    for e in 0..curve.edges.len() {
        // tail and head flags carry opposite normals, so u_tail + u_head = 0
        // reads c_tail = c_head
        let mut row = vec![Rational::zero(); n];
        row[2 * e] = qi(1);
        row[2 * e + 1] = qi(-1);
        rows.push(row);
    }
    for v in 0..curve.vertices.len() {
        for k in 0..2 {
            let mut row = vec![Rational::zero(); n];
            for (i, f) in flags.iter().enumerate() {
                if f.vertex == v {
                    row[i] = qi(normals[i][k]);
                }
            }
            rows.push(row);
        }
    }
    let zeros = vec![Rational::zero(); rows.len()];
    let (_, kernel) = solve_rational(&rows, &zeros).expect("homogeneous system");
    let mut coefficients = kernel.first().cloned().unwrap_or_default();
    if let Some(lead) = coefficients.iter().find(|c| !c.is_zero()).cloned() {
        for c in &mut coefficients {
            *c /= &lead;
        }
    }
    let generator = if kernel.is_empty() {
        Vec::new()
    } else {
        flags
            .iter()
            .zip(&normals)
            .zip(&coefficients)
            .map(|((&f, nv), c)| (f, [c * Int::from(nv[0]), c * Int::from(nv[1])]))
            .collect()
    };
    DualSpace { dimension: kernel.len(), generator, coefficients }
}

/// Whether the point conditions kill every deformation: the evaluation
/// `φ ↦ (n_{e_i}·φ(tail e_i))_i` is injective on the deformations of the
/// curve (sliding of 2-valent vertices excluded).
pub fn rigidity_check(curve: &TropicalCurve, marks: &[MarkedPoint]) -> bool {
    let cols = 2 * curve.vertices.len();
    let mut m = build_f(curve);
    for row in gauge_rows(curve, &[]) {
        m.push_row(row);
    }
    for p in marks {
        let e = &curve.edges[p.edge];
        let n = normal(e.m);
        m.push_row(ivec_row(cols, &[(2 * e.tail, n[0]), (2 * e.tail + 1, n[1])]));
    }
    rank_rational(&m) == cols
}

/// The counting matrix on the curve subdivided at the marks.
#[derive(Clone, Debug)]
pub struct CountingMatrix {
    pub d: IntMatrix,
    pub subdivided: TropicalCurve,
    pub marked_vertices: Vec<usize>,
}

/// Rows: the edge rows of the subdivided curve, both coordinates of `φ` at
/// each marked vertex, and a gauge row for every other 2-valent vertex.
pub fn build_d(curve: &TropicalCurve, marks: &[MarkedPoint]) -> Result<CountingMatrix, CurveError> {
    let (sub, marked) = curve.subdivide(marks)?;
    let cols = 2 * sub.vertices.len();
    let mut d = build_f(&sub);
    for &v in &marked {
        d.push_row(ivec_row(cols, &[(2 * v, 1)]));
        d.push_row(ivec_row(cols, &[(2 * v + 1, 1)]));
    }
    for row in gauge_rows(&sub, &marked) {
        d.push_row(row);
    }
    Ok(CountingMatrix { d, subdivided: sub, marked_vertices: marked })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelOrder {
    /// `None` when the kernel is infinite.
    #[serde(serialize_with = "ser_opt_int")]
    pub order: Option<Int>,
    #[serde(serialize_with = "ser_ints")]
    pub elementary_divisors: Vec<Int>,
    pub unknowns: usize,
}

/// `|Ker G_{ℂ*}|` as the product of the elementary divisors of the
/// counting matrix, or infinite when it lacks full column rank.
pub fn kernel_order_gcstar(curve: &TropicalCurve, marks: &[MarkedPoint]) -> Result<KernelOrder, CurveError> {
    let cm = build_d(curve, marks)?;
    Ok(kernel_order_of(&cm.d))
}

pub fn kernel_order_of(d: &IntMatrix) -> KernelOrder {
    let f = snf(d);
    let divisors = f.invariant_factors();
    let order = if divisors.len() == d.cols() { Some(divisors.iter().product()) } else { None };
    KernelOrder { order, elementary_divisors: divisors, unknowns: d.cols() }
}

/// Product of edge weights over the edges of the curve with 2-valent
/// vertices smoothed out, so that subdividing an edge leaves it unchanged.
pub fn edge_weight_product(curve: &TropicalCurve) -> Int {
    let ne = curve.edges.len();
    let mut parent: Vec<usize> = (0..ne).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for v in 0..curve.vertices.len() {
        let inc = curve.incident(v);
        if inc.len() == 2 {
            let (a, b) = (find(&mut parent, inc[0].0), find(&mut parent, inc[1].0));
            parent[a] = b;
        }
    }
    let mut product = Int::one();
    for e in 0..ne {
        if find(&mut parent, e) == e {
            product *= Int::from(primitive(curve.edges[e].m).1);
        }
    }
    product
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    #[serde(serialize_with = "ser_opt_int")]
    pub kernel_order: Option<Int>,
    #[serde(serialize_with = "ser_int")]
    pub edge_weight_product: Int,
    #[serde(serialize_with = "ser_opt_int")]
    pub total: Option<Int>,
    #[serde(serialize_with = "ser_ints")]
    pub elementary_divisors: Vec<Int>,
}

#[derive(Debug, Clone, Error)]
pub enum CountError {
    #[error("curve is not realizable in this mode (verdict {})", .0.verdict)]
    NotRealizable(Box<RealizabilityReport>),
    #[error("a genus {genus} curve must pass through {genus} rational points, got {marks} marks")]
    WrongMarkCount { genus: i64, marks: usize },
    #[error("the marked points do not make the curve rigid")]
    NotRigid,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
}

/// Number of curves through the marked points: `|Ker G_{ℂ*}|·∏ w_e`.
pub fn count_curves(
    curve: &TropicalCurve,
    marks: &[MarkedPoint],
    mode: &EqualityMode,
) -> Result<CountReport, CountError> {
    let report = realizability(curve, mode)?;
    if report.verdict != Verdict::Yes {
        return Err(CountError::NotRealizable(Box::new(report)));
    }
    if marks.len() as i64 != curve.genus() {
        return Err(CountError::WrongMarkCount { genus: curve.genus(), marks: marks.len() });
    }
    if !rigidity_check(curve, marks) {
        return Err(CountError::NotRigid);
    }
    let k = kernel_order_gcstar(curve, marks)?;
    let w = edge_weight_product(curve);
    Ok(CountReport {
        total: k.order.as_ref().map(|o| o * &w),
        kernel_order: k.order,
        edge_weight_product: w,
        elementary_divisors: k.elementary_divisors,
    })
}

pub(crate) fn ser_int<S: serde::Serializer>(x: &Int, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn ser_opt_int<S: serde::Serializer>(x: &Option<Int>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_str("INFINITE"),
    }
}

pub(crate) fn ser_ints<S: serde::Serializer>(x: &[Int], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(x.len()))?;
    for v in x {
        seq.serialize_element(&v.to_string())?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::curve::Multiplier;
    use crate::exactmath::{int, rat};
    use crate::valuegroup::{Alpha, MulValue};

    fn theta_marks() -> Vec<MarkedPoint> {
        vec![MarkedPoint { edge: 0, t: rat(1, 3) }, MarkedPoint { edge: 1, t: rat(1, 2) }]
    }

    #[test]
    fn theta_f_matrix() {
        let f = build_f(&catalog::theta());
        assert_eq!(
            f,
            IntMatrix::from_i64(&[vec![0, -1, 0, 1], vec![1, 0, -1, 0], vec![-1, 1, 1, -1]])
        );
    }

    #[test]
    fn theta_ranks() {
        let r = deformation_ranks(&catalog::theta());
        assert_eq!((r.rank_kernel, r.rank_cokernel), (2, 1));
    }

    #[test]
    fn cycle_ranks() {
        let c = catalog::cycle();
        let r = deformation_ranks(&c);
        assert_eq!(r.rank_kernel - r.rank_cokernel, c.genus() - 1);
        assert_eq!(r.rank_kernel, 1);
    }

    #[test]
    fn reversing_an_edge_keeps_its_row() {
        // both the normal and the endpoint difference change sign
        let c = catalog::theta();
        assert_eq!(build_f(&c), build_f(&c.reverse_edge(1)));
        assert_eq!(deformation_ranks(&c), deformation_ranks(&c.reverse_edge(1)));
    }

    #[test]
    fn theta_dual_space_is_the_rotation() {
        let c = catalog::theta();
        let d = dual_flag_space(&c);
        assert_eq!(d.dimension, 1);
        for (f, u) in &d.generator {
            let w = c.flag_vector(*f);
            assert_eq!(u, &[rat(-w[1], 1), rat(w[0], 1)]);
        }
    }

    #[test]
    fn theta_rigidity() {
        let c = catalog::theta();
        assert!(rigidity_check(&c, &theta_marks()));
        assert!(!rigidity_check(&c, &theta_marks()[..1]));
    }

    #[test]
    fn theta_kernel_orders() {
        let k = kernel_order_gcstar(&catalog::theta(), &theta_marks()).unwrap();
        assert_eq!(k.order, Some(int(1)));
        let k = kernel_order_gcstar(&catalog::theta(), &theta_marks()[..1]).unwrap();
        assert_eq!(k.order, None);
    }

    #[test]
    fn counts() {
        let ones = Alpha::ALL.map(|_| Multiplier::Polar(MulValue::one()));
        let c = catalog::with_multipliers(&catalog::theta(), ones.clone());
        let mode = c.lattice.equality_mode(None, 1e-9).unwrap();
        let r = count_curves(&c, &theta_marks(), &mode).unwrap();
        assert_eq!(r.total, Some(int(1)));
        assert!(matches!(
            count_curves(&c, &theta_marks()[..1], &mode),
            Err(CountError::WrongMarkCount { genus: 2, marks: 1 })
        ));
        assert!(matches!(
            count_curves(&catalog::theta(), &theta_marks(), &EqualityMode::Formal),
            Err(CountError::NotRealizable(_))
        ));
    }

    #[test]
    fn edge_weight_product_ignores_subdivision() {
        let c = catalog::theta2();
        assert_eq!(edge_weight_product(&c), int(8));
        let (s, _) = c.subdivide(&theta_marks()).unwrap();
        assert_eq!(edge_weight_product(&s), int(8));
        assert_eq!(edge_weight_product(&catalog::cycle()), int(1));
    }

    #[test]
    fn gauge_covector_pairs_to_one() {
        for m in [[1, 0], [0, 1], [2, 3], [-4, 6], [5, -7]] {
            let g = gauge_covector(m);
            let (p, _) = primitive(m);
            assert_eq!(g[0] * p[0] + g[1] * p[1], 1);
        }
    }
}
