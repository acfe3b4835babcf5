//! The JSON curve file.
//!
//! ```json
//! {
//!   "lattice": {"lambda1": [1, -1], "lambda2": [1, 2]},
//!   "multipliers": {"a11": {"formal": true}, "a12": {"modulus": "2", "turns": "1/4"}, ...},
//!   "vertices": [{"id": "u", "pos": ["0", "0"]}, ...],
//!   "edges": [{"id": "e1", "tail": "u", "head": "v", "weight_vector": [1, 0],
//!              "length": "1", "shift": [0, 0]}, ...],
//!   "marked_points": [{"edge": "e1", "t": "1/3"}]
//! }
//! ```
//!
//! Rationals are strings. `multipliers` may be omitted (all formal); all four
//! entries must be of the same kind. A missing `shift` is derived from the
//! lifts and must be integral.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveError, Edge, MarkedPoint, Multiplier, PeriodLattice, TropicalCurve, Vertex};
use crate::exactmath::{fmt_rational, parse_rational, Int, Rational};
use crate::prelog::FlagAssignment;
use crate::valuegroup::{Alpha, MulValue, ValueError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed curve file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational {0:?}")]
    Rational(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("unknown multiplier {0:?}")]
    UnknownMultiplier(String),
    #[error("edge {0}: the lift relation gives a non-integral shift")]
    NonIntegralShift(String),
    #[error("multiplier {0}: {1}")]
    BadMultiplier(String, String),
    #[error("flag ({vertex}, {edge}) is not part of the curve")]
    UnknownFlag { vertex: String, edge: String },
    #[error("assignment misses flag ({vertex}, {edge})")]
    MissingFlag { vertex: String, edge: String },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Value(#[from] ValueError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub lattice: LatticeSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub multipliers: BTreeMap<String, MultiplierSpec>,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub marked_points: Vec<MarkSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub lambda1: [i64; 2],
    pub lambda2: [i64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MultiplierSpec {
    Formal { formal: bool },
    Polar { modulus: String, turns: String },
    Numeric { re: f64, im: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: String,
    pub pos: [String; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub weight_vector: [i64; 2],
    pub length: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<[i64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkSpec {
    pub edge: String,
    pub t: String,
}

fn rational(s: &str) -> Result<Rational, FormatError> {
    parse_rational(s).ok_or_else(|| FormatError::Rational(s.to_string()))
}

fn multiplier(name: &str, spec: &MultiplierSpec) -> Result<Multiplier, FormatError> {
    let a = Alpha::from_name(name).ok_or_else(|| FormatError::UnknownMultiplier(name.to_string()))?;
    Ok(match spec {
        MultiplierSpec::Formal { formal: true } => Multiplier::Formal(MulValue::alpha(a)),
        MultiplierSpec::Formal { formal: false } => {
            return Err(FormatError::BadMultiplier(name.into(), "\"formal\" must be true".into()))
        }
        MultiplierSpec::Polar { modulus, turns } => {
            let v = MulValue::polar(&rational(modulus)?, &rational(turns)?)
                .map_err(|e| FormatError::BadMultiplier(name.into(), e.to_string()))?;
            Multiplier::Polar(v)
        }
        MultiplierSpec::Numeric { re, im } => Multiplier::Numeric(Complex64::new(*re, *im)),
    })
}

/// Parses a curve file into a curve and its marked points.
pub fn parse_curve(text: &str) -> Result<(TropicalCurve, Vec<MarkedPoint>), FormatError> {
    let file: CurveFile = serde_json::from_str(text)?;
    from_file(&file)
}

pub fn from_file(file: &CurveFile) -> Result<(TropicalCurve, Vec<MarkedPoint>), FormatError> {
    let mut mults: Vec<Multiplier> = Alpha::ALL.iter().map(|&a| Multiplier::Formal(MulValue::alpha(a))).collect();
    for (name, spec) in &file.multipliers {
        let a = Alpha::from_name(name).ok_or_else(|| FormatError::UnknownMultiplier(name.clone()))?;
        mults[Alpha::ALL.iter().position(|&b| b == a).unwrap()] = multiplier(name, spec)?;
    }
    let lattice = PeriodLattice::new(
        [file.lattice.lambda1, file.lattice.lambda2],
        mults.try_into().expect("four multipliers"),
    )?;
    let vertices = file
        .vertices
        .iter()
        .map(|v| Ok(Vertex { id: v.id.clone(), pos: [rational(&v.pos[0])?, rational(&v.pos[1])?] }))
        .collect::<Result<Vec<_>, FormatError>>()?;
    let mut curve = TropicalCurve { lattice, vertices, edges: Vec::new() };
    for e in &file.edges {
        let find = |id: &str| curve.vertex_index(id).ok_or_else(|| FormatError::UnknownVertex(id.to_string()));
        let (tail, head) = (find(&e.tail)?, find(&e.head)?);
        let length = rational(&e.length)?;
        let shift = match e.shift {
            Some(s) => s,
            None => curve
                .derived_shift(tail, head, e.weight_vector, &length)
                .ok_or_else(|| FormatError::NonIntegralShift(e.id.clone()))?,
        };
        curve.edges.push(Edge { id: e.id.clone(), tail, head, m: e.weight_vector, length, shift });
    }
    let marks = file
        .marked_points
        .iter()
        .map(|p| {
            let edge = curve.edge_index(&p.edge).ok_or_else(|| FormatError::UnknownEdge(p.edge.clone()))?;
            Ok(MarkedPoint { edge, t: rational(&p.t)? })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok((curve, marks))
}

fn multiplier_spec(m: &Multiplier) -> MultiplierSpec {
    match m {
        Multiplier::Formal(_) => MultiplierSpec::Formal { formal: true },
        Multiplier::Polar(v) => {
            // only values with a rational modulus are representable
            let modulus = v
                .scalar_exponents()
                .iter()
                .fold(Rational::from_integer(Int::from(1)), |acc, (p, e)| {
                    let k = e.to_integer();
                    let pk = Rational::from_integer(p.clone()).pow(i32::try_from(k).expect("small exponent"));
                    acc * pk
                });
            MultiplierSpec::Polar { modulus: fmt_rational(&modulus), turns: fmt_rational(v.phase_turns()) }
        }
        Multiplier::Numeric(z) => MultiplierSpec::Numeric { re: z.re, im: z.im },
    }
}

/// The file form of a curve. Formal multipliers that are not plain symbols
/// (after a transform) and irrational moduli cannot be written.
pub fn to_file(curve: &TropicalCurve, marks: &[MarkedPoint]) -> CurveFile {
    let formal = curve.lattice.multipliers().iter().all(|m| matches!(m, Multiplier::Formal(_)));
    CurveFile {
        lattice: LatticeSpec { lambda1: curve.lattice.lambda[0], lambda2: curve.lattice.lambda[1] },
        multipliers: if formal {
            BTreeMap::new()
        } else {
            Alpha::ALL.iter().map(|&a| (a.name().to_string(), multiplier_spec(curve.lattice.multiplier(a)))).collect()
        },
        vertices: curve
            .vertices
            .iter()
            .map(|v| VertexSpec { id: v.id.clone(), pos: [fmt_rational(&v.pos[0]), fmt_rational(&v.pos[1])] })
            .collect(),
        edges: curve
            .edges
            .iter()
            .map(|e| EdgeSpec {
                id: e.id.clone(),
                tail: curve.vertices[e.tail].id.clone(),
                head: curve.vertices[e.head].id.clone(),
                weight_vector: e.m,
                length: fmt_rational(&e.length),
                shift: Some(e.shift),
            })
            .collect(),
        marked_points: marks
            .iter()
            .map(|p| MarkSpec { edge: curve.edges[p.edge].id.clone(), t: fmt_rational(&p.t) })
            .collect(),
    }
}

pub fn write_curve(curve: &TropicalCurve, marks: &[MarkedPoint]) -> String {
    serde_json::to_string_pretty(&to_file(curve, marks)).expect("serializable") + "\n"
}

/// Exact value in the same shape as the serialized [`MulValue`]:
/// `{"alpha": [["a11", "1/2"]], "scalar": [["3", "-1"]], "phase": "1/4"}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueSpec {
    #[serde(default)]
    pub alpha: Vec<(String, String)>,
    #[serde(default)]
    pub scalar: Vec<(String, String)>,
    #[serde(default = "zero_turns")]
    pub phase: String,
}

fn zero_turns() -> String {
    "0".to_string()
}

pub fn value_from_spec(spec: &ValueSpec) -> Result<MulValue, FormatError> {
    let mut v = MulValue::phase(&rational(&spec.phase)?);
    for (name, e) in &spec.alpha {
        let a = Alpha::from_name(name).ok_or_else(|| FormatError::UnknownMultiplier(name.clone()))?;
        v = v.mul(&MulValue::alpha_pow(a, rational(e)?));
    }
    for (base, e) in &spec.scalar {
        v = v.mul(&MulValue::scalar_pow(&rational(base)?, &rational(e)?)?);
    }
    Ok(v)
}

pub fn value_to_spec(v: &MulValue) -> ValueSpec {
    ValueSpec {
        alpha: v.alpha_exponents().iter().map(|(a, e)| (a.name().to_string(), fmt_rational(e))).collect(),
        scalar: v.scalar_exponents().iter().map(|(p, e)| (p.to_string(), fmt_rational(e))).collect(),
        phase: fmt_rational(v.phase_turns()),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagValueSpec {
    pub vertex: String,
    pub edge: String,
    pub value: ValueSpec,
}

/// `{"assignment": [{"vertex": "u", "edge": "e1", "value": {...}}, ...]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub assignment: Vec<FlagValueSpec>,
}

pub fn assignment_to_file(curve: &TropicalCurve, a: &FlagAssignment) -> AssignmentFile {
    AssignmentFile {
        assignment: a
            .flags
            .iter()
            .zip(&a.values)
            .map(|(f, v)| FlagValueSpec {
                vertex: curve.vertices[f.vertex].id.clone(),
                edge: curve.edges[f.edge].id.clone(),
                value: value_to_spec(v),
            })
            .collect(),
    }
}

pub fn parse_assignment(curve: &TropicalCurve, text: &str) -> Result<FlagAssignment, FormatError> {
    let file: AssignmentFile = serde_json::from_str(text)?;
    let flags = curve.flags();
    let mut values: Vec<Option<MulValue>> = vec![None; flags.len()];
    for entry in &file.assignment {
        let unknown = || FormatError::UnknownFlag { vertex: entry.vertex.clone(), edge: entry.edge.clone() };
        let v = curve.vertex_index(&entry.vertex).ok_or_else(unknown)?;
        let e = curve.edge_index(&entry.edge).ok_or_else(unknown)?;
        let j = flags.iter().position(|f| f.vertex == v && f.edge == e).ok_or_else(unknown)?;
        values[j] = Some(value_from_spec(&entry.value)?);
    }
    let values = values
        .into_iter()
        .zip(&flags)
        .map(|(v, f)| {
            v.ok_or_else(|| FormatError::MissingFlag {
                vertex: curve.vertices[f.vertex].id.clone(),
                edge: curve.edges[f.edge].id.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FlagAssignment { flags, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exactmath::rat;

    #[test]
    fn theta_roundtrip() {
        let c = catalog::theta();
        let marks = vec![MarkedPoint { edge: 0, t: rat(1, 3) }];
        let text = write_curve(&c, &marks);
        let (c2, m2) = parse_curve(&text).unwrap();
        assert_eq!(c2, c);
        assert_eq!(m2, marks);
    }

    #[test]
    fn polar_multipliers_roundtrip() {
        let mults = Alpha::ALL.map(|_| Multiplier::Polar(MulValue::polar(&rat(3, 2), &rat(1, 6)).unwrap()));
        let c = catalog::with_multipliers(&catalog::theta(), mults);
        let (c2, _) = parse_curve(&write_curve(&c, &[])).unwrap();
        assert_eq!(c2, c);
    }

    #[test]
    fn omitted_shift_is_derived() {
        let text = write_curve(&catalog::theta(), &[]);
        let mut file: CurveFile = serde_json::from_str(&text).unwrap();
        for e in &mut file.edges {
            e.shift = None;
        }
        let (c, _) = from_file(&file).unwrap();
        assert_eq!(c, catalog::theta());
    }

    #[test]
    fn non_integral_shift_is_rejected() {
        let text = write_curve(&catalog::theta(), &[]);
        let mut file: CurveFile = serde_json::from_str(&text).unwrap();
        file.edges[0].shift = None;
        file.edges[0].length = "1/2".into();
        assert!(matches!(from_file(&file), Err(FormatError::NonIntegralShift(_))));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_curve("{"), Err(FormatError::Json(_))));
        let text = write_curve(&catalog::theta(), &[]).replace("\"tail\": \"u\"", "\"tail\": \"nope\"");
        assert!(matches!(parse_curve(&text), Err(FormatError::UnknownVertex(_))));
        let mixed = r#"{"lattice": {"lambda1": [1, 0], "lambda2": [0, 1]},
            "multipliers": {"a11": {"formal": true}, "a12": {"re": 1.0, "im": 0.0}},
            "vertices": [], "edges": []}"#;
        assert!(parse_curve(mixed).is_err());
    }

    #[test]
    fn values_roundtrip() {
        let v = MulValue::alpha_pow(Alpha::A21, rat(-1, 2))
            .mul(&MulValue::scalar(&rat(6, 5)).unwrap())
            .mul(&MulValue::phase(&rat(3, 4)));
        assert_eq!(value_from_spec(&value_to_spec(&v)).unwrap(), v);
        let json = serde_json::to_string(&v).unwrap();
        let spec: ValueSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(value_from_spec(&spec).unwrap(), v);
    }
}
