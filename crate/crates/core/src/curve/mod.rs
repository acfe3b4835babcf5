//! Parametrized tropical curves in `S = ℝ²/Λ`.
//!
//! Each edge stores its tail-to-head weight vector `m`, a length `ℓ` and a
//! deck shift `γ`, tied to the vertex lifts by
//!
//! ```text
//! pos(head) - pos(tail) = ℓ·m + γ₁·λ₁ + γ₂·λ₂
//! ```

mod crossings;
mod ops;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactmath::{fmt_rational, Int, Rational};
use crate::valuegroup::{Alpha, EqualityMode, ModeKind, MulValue};

pub use crossings::{crossings, offset_sequence, Crossing, Side};

pub type IVec = [i64; 2];
pub type QVec = [Rational; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("weight vector of edge {0} is zero")]
    ZeroWeightVector(String),
    #[error("vertex {vertex} has valence {valence}; only 2 and 3 are supported")]
    BadValence { vertex: String, valence: usize },
    #[error("marked point on edge {edge} has t = {t}, outside (0, 1)")]
    MarkOutOfRange { edge: String, t: String },
    #[error("two marked points at t = {t} on edge {edge}")]
    DuplicateMark { edge: String, t: String },
    #[error("matrix {0:?} is not unimodular")]
    NotUnimodular([[i64; 2]; 2]),
    #[error("degenerate offset: {0}")]
    DegenerateOffset(String),
    #[error("{0}")]
    Config(String),
}

/// A period multiplier `α_ij`. All four multipliers of a lattice share a kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplier {
    /// A monomial in the formal symbols; a plain lattice uses `α_ij` itself.
    Formal(MulValue),
    /// An α-free exact value `r·exp(2πi·θ)`.
    Polar(MulValue),
    Numeric(Complex64),
}

impl Multiplier {
    pub fn kind(&self) -> ModeKind {
        match self {
            Multiplier::Formal(_) => ModeKind::Formal,
            Multiplier::Polar(_) => ModeKind::Exact,
            Multiplier::Numeric(_) => ModeKind::Numeric,
        }
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            Multiplier::Formal(_) => None,
            Multiplier::Polar(v) => v.eval_numeric(&BTreeMap::new()).ok(),
            Multiplier::Numeric(z) => Some(*z),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodLattice {
    /// Rows `λ₁ = (n₁₁, n₁₂)` and `λ₂ = (n₂₁, n₂₂)`.
    pub lambda: [IVec; 2],
    multipliers: [Multiplier; 4],
}

impl PeriodLattice {
    /// Lattice with the formal symbols as multipliers.
    pub fn formal(lambda1: IVec, lambda2: IVec) -> Self {
        PeriodLattice {
            lambda: [lambda1, lambda2],
            multipliers: Alpha::ALL.map(|a| Multiplier::Formal(MulValue::alpha(a))),
        }
    }

    /// Multipliers in the order `α11, α12, α21, α22`; kinds must agree.
    pub fn new(lambda: [IVec; 2], multipliers: [Multiplier; 4]) -> Result<Self, CurveError> {
        let kind = multipliers[0].kind();
        if multipliers.iter().any(|m| m.kind() != kind) {
            return Err(CurveError::Config("all four multipliers must use the same kind".into()));
        }
        Ok(PeriodLattice { lambda, multipliers })
    }

    pub fn multiplier(&self, a: Alpha) -> &Multiplier {
        &self.multipliers[Alpha::ALL.iter().position(|&b| b == a).unwrap()]
    }

    pub fn multipliers(&self) -> &[Multiplier; 4] {
        &self.multipliers
    }

    pub fn with_multipliers(&self, multipliers: [Multiplier; 4]) -> Result<Self, CurveError> {
        PeriodLattice::new(self.lambda, multipliers)
    }

    pub fn kind(&self) -> ModeKind {
        self.multipliers[0].kind()
    }

    pub fn det(&self) -> i64 {
        let [a, b] = self.lambda;
        a[0] * b[1] - a[1] * b[0]
    }

    /// `s·λ₁ + t·λ₂`.
    pub fn point(&self, st: &QVec) -> QVec {
        let [l1, l2] = self.lambda;
        [0, 1].map(|k| &st[0] * Int::from(l1[k]) + &st[1] * Int::from(l2[k]))
    }

    /// Coordinates `(s, t)` of `x = s·λ₁ + t·λ₂`. Requires a nonzero determinant.
    pub fn coords(&self, x: &QVec) -> QVec {
        let [l1, l2] = self.lambda;
        let d = Rational::from_integer(Int::from(self.det()));
        let s = (&x[0] * Int::from(l2[1]) - &x[1] * Int::from(l2[0])) / &d;
        let t = (&x[1] * Int::from(l1[0]) - &x[0] * Int::from(l1[1])) / &d;
        [s, t]
    }

    /// Equality mode for deciding identities among the abstract symbols of
    /// this lattice. `None` picks the mode matching the multiplier kind.
    pub fn equality_mode(&self, requested: Option<ModeKind>, tol: f64) -> Result<EqualityMode, CurveError> {
        let kind = requested.unwrap_or(self.kind());
        match (kind, self.kind()) {
            (ModeKind::Formal, ModeKind::Formal) => {
                let plain = Alpha::ALL
                    .iter()
                    .all(|&a| *self.multiplier(a) == Multiplier::Formal(MulValue::alpha(a)));
                if plain {
                    Ok(EqualityMode::Formal)
                } else {
                    Ok(EqualityMode::Exact(self.value_map()))
                }
            }
            (ModeKind::Formal, _) => Ok(EqualityMode::Formal),
            (ModeKind::Exact, ModeKind::Exact) => Ok(EqualityMode::Exact(self.value_map())),
            (ModeKind::Numeric, ModeKind::Exact | ModeKind::Numeric) => {
                if tol.is_nan() || tol <= 0.0 {
                    return Err(CurveError::Config(format!("tolerance must be positive, got {tol}")));
                }
                let values = Alpha::ALL
                    .iter()
                    .map(|&a| (a, self.multiplier(a).as_complex().expect("numeric value")))
                    .collect();
                Ok(EqualityMode::Numeric { values, tol })
            }
            (k, have) => Err(CurveError::Config(format!(
                "{k} mode needs {} multipliers, but the curve has {have} multipliers",
                if k == ModeKind::Exact { "exact (modulus/turns)" } else { "exact or numeric" }
            ))),
        }
    }

    fn value_map(&self) -> BTreeMap<Alpha, MulValue> {
        Alpha::ALL
            .iter()
            .filter_map(|&a| match self.multiplier(a) {
                Multiplier::Formal(v) | Multiplier::Polar(v) => Some((a, v.clone())),
                Multiplier::Numeric(_) => None,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub pos: QVec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    /// Weight vector, oriented tail to head.
    pub m: IVec,
    pub length: Rational,
    pub shift: IVec,
}

/// A point on the interior of an edge, at fraction `t` from tail to head.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedPoint {
    pub edge: usize,
    pub t: Rational,
}

/// A (vertex, incident edge) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Flag {
    pub vertex: usize,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TropicalCurve {
    pub lattice: PeriodLattice,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

/// One failed check from [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    LatticeDegenerate,
    MultiplierZero(Alpha),
    Disconnected,
    Loop { edge: String },
    Valence { vertex: String, valence: usize },
    ZeroWeight { edge: String },
    TwoValentNotOpposite { vertex: String },
    Unbalanced { vertex: String, sum: IVec },
    DegenerateVertex { vertex: String },
    LiftMismatch { edge: String, residual: [String; 2] },
    NonPositiveLength { edge: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LatticeDegenerate => write!(f, "period lattice has determinant zero"),
            Violation::MultiplierZero(a) => write!(f, "multiplier {a} is zero"),
            Violation::Disconnected => write!(f, "graph is not connected"),
            Violation::Loop { edge } => write!(f, "edge {edge} is a loop"),
            Violation::Valence { vertex, valence } => {
                write!(f, "vertex {vertex} has valence {valence} (expected 2 or 3)")
            }
            Violation::ZeroWeight { edge } => write!(f, "edge {edge} has zero weight vector"),
            Violation::TwoValentNotOpposite { vertex } => {
                write!(f, "2-valent vertex {vertex}: weight vectors are not opposite")
            }
            Violation::Unbalanced { vertex, sum } => {
                write!(f, "vertex {vertex} is unbalanced: outgoing weights sum to ({}, {})", sum[0], sum[1])
            }
            Violation::DegenerateVertex { vertex } => {
                write!(f, "3-valent vertex {vertex} has collinear weight vectors")
            }
            Violation::LiftMismatch { edge, residual } => write!(
                f,
                "edge {edge}: lift relation fails, head - tail - length*m - shift = ({}, {})",
                residual[0], residual[1]
            ),
            Violation::NonPositiveLength { edge } => write!(f, "edge {edge} has non-positive length"),
        }
    }
}

pub fn det2(a: IVec, b: IVec) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Lattice multiplicity of a weight vector: the gcd of its components.
pub fn edge_weight(m: IVec) -> Result<i64, CurveError> {
    if m == [0, 0] {
        return Err(CurveError::ZeroWeightVector(format!("({}, {})", m[0], m[1])));
    }
    Ok(m[0].gcd(&m[1]))
}

/// Primitive direction and weight of a nonzero vector.
pub fn primitive(m: IVec) -> (IVec, i64) {
    let w = m[0].gcd(&m[1]);
    assert!(w > 0, "primitive direction of the zero vector");
    ([m[0] / w, m[1] / w], w)
}

/// Primitive normal covector `(-q, p)` of `m = w·(p, q)`.
pub fn normal(m: IVec) -> IVec {
    let ([p, q], _) = primitive(m);
    [-q, p]
}

impl TropicalCurve {
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Incident edges of `v` with their weight vectors pointing away from `v`,
    /// in edge order.
    pub fn incident(&self, v: usize) -> Vec<(usize, IVec)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail == v {
                out.push((i, e.m));
            }
            if e.head == v {
                out.push((i, [-e.m[0], -e.m[1]]));
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|e| usize::from(e.tail == v) + usize::from(e.head == v)).sum()
    }

    /// Outgoing weight vector `w_{v,e}`.
    pub fn flag_vector(&self, f: Flag) -> IVec {
        let e = &self.edges[f.edge];
        if e.tail == f.vertex {
            e.m
        } else {
            [-e.m[0], -e.m[1]]
        }
    }

    /// All flags: for each edge, its tail flag then its head flag.
    pub fn flags(&self) -> Vec<Flag> {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(i, e)| [Flag { vertex: e.tail, edge: i }, Flag { vertex: e.head, edge: i }])
            .collect()
    }

    pub fn vertex_weight(&self, v: usize) -> Result<i64, CurveError> {
        let inc = self.incident(v);
        match inc.len() {
            2 => Ok(1),
            3 => Ok(det2(inc[0].1, inc[1].1).abs()),
            n => Err(CurveError::BadValence { vertex: self.vertices[v].id.clone(), valence: n }),
        }
    }

    /// gcd of the weights of the edges at `v`.
    pub fn vertex_gcd(&self, v: usize) -> i64 {
        self.incident(v).iter().fold(0, |g, (_, m)| g.gcd(&m[0].gcd(&m[1])))
    }

    /// gcd of all edge weights.
    pub fn delta(&self) -> i64 {
        self.edges.iter().fold(0, |g, e| g.gcd(&e.m[0].gcd(&e.m[1])))
    }

    pub fn genus(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn is_trivalent(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.valence(v) == 3)
    }

    pub fn two_valent_count(&self) -> usize {
        (0..self.vertices.len()).filter(|&v| self.valence(v) == 2).count()
    }

    /// `pos(head) - pos(tail) - ℓ·m - γ·Λ`, zero for a consistent edge.
    pub fn lift_residual(&self, e: usize) -> QVec {
        let edge = &self.edges[e];
        let shift = [Rational::from_integer(edge.shift[0].into()), Rational::from_integer(edge.shift[1].into())];
        let deck = self.lattice.point(&shift);
        let (t, h) = (&self.vertices[edge.tail].pos, &self.vertices[edge.head].pos);
        [0, 1].map(|k| &h[k] - &t[k] - &edge.length * Int::from(edge.m[k]) - &deck[k])
    }

    /// Deck shift forced by the lift relation, if it is integral.
    pub fn derived_shift(&self, tail: usize, head: usize, m: IVec, length: &Rational) -> Option<IVec> {
        if self.lattice.det() == 0 {
            return None;
        }
        let (t, h) = (&self.vertices[tail].pos, &self.vertices[head].pos);
        let diff = [0, 1].map(|k| &h[k] - &t[k] - length * Int::from(m[k]));
        let st = self.lattice.coords(&diff);
        if st.iter().all(|x| x.is_integer()) {
            Some(st.map(|x| i64::try_from(x.to_integer()).ok()).map(Option::unwrap_or_default))
        } else {
            None
        }
    }

    /// Warnings that do not make the curve invalid.
    pub fn warnings(&self) -> Vec<String> {
        self.edges
            .iter()
            .filter(|e| !e.length.is_integer())
            .map(|e| {
                let w = e.m[0].gcd(&e.m[1]);
                format!(
                    "edge {}: lattice length {} is not an integral multiple of its weight {w}",
                    e.id,
                    fmt_rational(&(&e.length * Int::from(w)))
                )
            })
            .collect()
    }
}

/// All violations of the curve axioms, in a fixed order of checks.
pub fn validate(curve: &TropicalCurve) -> Vec<Violation> {
    let mut out = Vec::new();
    let lattice_ok = curve.lattice.det() != 0;
    if !lattice_ok {
        out.push(Violation::LatticeDegenerate);
    }
    for &a in &Alpha::ALL {
        let zero = match curve.lattice.multiplier(a) {
            Multiplier::Formal(_) => false,
            Multiplier::Polar(_) => false,
            Multiplier::Numeric(z) => z.norm() == 0.0 || !z.norm().is_finite(),
        };
        if zero {
            out.push(Violation::MultiplierZero(a));
        }
    }
    if !connected(curve) {
        out.push(Violation::Disconnected);
    }
    for e in &curve.edges {
        if e.tail == e.head {
            out.push(Violation::Loop { edge: e.id.clone() });
        }
    }
    for (v, vert) in curve.vertices.iter().enumerate() {
        let valence = curve.valence(v);
        if valence != 2 && valence != 3 {
            out.push(Violation::Valence { vertex: vert.id.clone(), valence });
        }
    }
    for e in &curve.edges {
        if e.m == [0, 0] {
            out.push(Violation::ZeroWeight { edge: e.id.clone() });
        }
    }
    for (v, vert) in curve.vertices.iter().enumerate() {
        let inc = curve.incident(v);
        let sum = inc.iter().fold([0, 0], |s, (_, m)| [s[0] + m[0], s[1] + m[1]]);
        if inc.len() == 2 && sum != [0, 0] {
            out.push(Violation::TwoValentNotOpposite { vertex: vert.id.clone() });
        }
    }
    for (v, vert) in curve.vertices.iter().enumerate() {
        let inc = curve.incident(v);
        let sum = inc.iter().fold([0, 0], |s, (_, m)| [s[0] + m[0], s[1] + m[1]]);
        if sum != [0, 0] {
            out.push(Violation::Unbalanced { vertex: vert.id.clone(), sum });
        }
    }
    for (v, vert) in curve.vertices.iter().enumerate() {
        let inc = curve.incident(v);
        if inc.len() == 3 && inc.iter().all(|(_, m)| *m != [0, 0]) && det2(inc[0].1, inc[1].1) == 0 {
            out.push(Violation::DegenerateVertex { vertex: vert.id.clone() });
        }
    }
    if lattice_ok {
        for (i, e) in curve.edges.iter().enumerate() {
            let r = curve.lift_residual(i);
            if !r.iter().all(Zero::is_zero) {
                out.push(Violation::LiftMismatch { edge: e.id.clone(), residual: r.map(|x| fmt_rational(&x)) });
            }
        }
    }
    for e in &curve.edges {
        if !e.length.is_positive() {
            out.push(Violation::NonPositiveLength { edge: e.id.clone() });
        }
    }
    out
}

fn connected(curve: &TropicalCurve) -> bool {
    let n = curve.vertices.len();
    if n == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for e in &curve.edges {
        adj[e.tail].push(e.head);
        adj[e.head].push(e.tail);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub(crate) fn qvec(x: i64, y: i64) -> QVec {
    [Rational::from_integer(x.into()), Rational::from_integer(y.into())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn theta_is_valid() {
        let c = catalog::theta();
        assert_eq!(validate(&c), vec![]);
        assert_eq!(c.genus(), 2);
        assert_eq!(c.delta(), 1);
        assert_eq!(c.vertex_weight(0).unwrap(), 1);
        assert_eq!(c.vertex_weight(1).unwrap(), 1);
    }

    #[test]
    fn theta2_invariants() {
        let c = catalog::theta2();
        assert_eq!(validate(&c), vec![]);
        assert_eq!(c.delta(), 2);
        assert_eq!(c.vertex_weight(1).unwrap(), 4);
    }

    #[test]
    fn broken_balancing_is_reported_at_both_ends() {
        let mut c = catalog::theta();
        c.edges[0].m = [2, 0];
        let v = validate(&c);
        let unbalanced: Vec<_> =
            v.iter().filter(|x| matches!(x, Violation::Unbalanced { .. })).collect();
        assert_eq!(unbalanced.len(), 2);
    }

    #[test]
    fn singular_lattice_is_reported() {
        let mut c = catalog::theta();
        c.lattice.lambda = [[1, 2], [2, 4]];
        assert_eq!(validate(&c)[0], Violation::LatticeDegenerate);
    }

    #[test]
    fn edge_weight_examples() {
        assert_eq!(edge_weight([1, 0]).unwrap(), 1);
        assert_eq!(edge_weight([2, 4]).unwrap(), 2);
        assert_eq!(edge_weight([-6, -9]).unwrap(), 3);
        assert!(edge_weight([0, 0]).is_err());
    }

    #[test]
    fn vertex_weight_examples() {
        let c = catalog::theta_with([[2, 1], [1, 2], [-3, -3]]);
        assert_eq!(c.vertex_weight(0).unwrap(), 3);
        let c = catalog::theta_with([[1, 0], [0, 1], [-1, -1]]);
        assert_eq!(c.vertex_weight(0).unwrap(), 1);
        let cyc = catalog::cycle();
        assert_eq!(cyc.vertex_weight(0).unwrap(), 1);
    }

    #[test]
    fn delta_of_mixed_weights() {
        let c = catalog::theta_with([[2, 0], [0, 4], [-2, -4]]);
        // weights 2, 4, 2
        assert_eq!(c.delta(), 2);
        let c = catalog::theta_with([[2, 4], [4, -8], [-6, 4]]);
        // weights 2, 4, 2
        assert_eq!(c.delta(), 2);
    }

    #[test]
    fn cycle_genus() {
        assert_eq!(catalog::cycle().genus(), 1);
        assert_eq!(validate(&catalog::cycle()), vec![]);
    }

    #[test]
    fn lattice_coordinates_roundtrip() {
        let l = PeriodLattice::formal([1, -1], [1, 2]);
        let x = [Rational::new(3.into(), 7.into()), Rational::new((-2).into(), 5.into())];
        assert_eq!(l.point(&l.coords(&x)), x);
    }

    #[test]
    fn mixed_multiplier_kinds_rejected() {
        let l = PeriodLattice::new(
            [[1, 0], [0, 1]],
            [
                Multiplier::Formal(MulValue::alpha(Alpha::A11)),
                Multiplier::Numeric(Complex64::new(1.0, 0.0)),
                Multiplier::Numeric(Complex64::new(1.0, 0.0)),
                Multiplier::Numeric(Complex64::new(1.0, 0.0)),
            ],
        );
        assert!(l.is_err());
    }
}
