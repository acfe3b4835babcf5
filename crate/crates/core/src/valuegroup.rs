//! A formal multiplicative abelian group for the gluing data.
//!
//! A [`MulValue`] is a product
//! `α11^a · α12^b · α21^c · α22^d · ∏ p^{e_p} · exp(2πi·θ)`
//! with rational exponents, primes `p`, and a phase `θ ∈ [0, 1)` measured in
//! turns. The α's are formal symbols; everything else is an honest complex
//! number, so an α-free value is decided exactly.
//!
//! Fractional powers follow one convention throughout: the stored phase
//! representative in `[0, 1)` is scaled. Integer powers are group
//! homomorphisms; fractional powers are not, and nothing relies on them being
//! so.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactmath::{fmt_rational, frac, Int, Rational};

/// Default tolerance for numeric equality.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Numeric distances in `(tol, UNDECIDED_FACTOR * tol]` are reported as undecided.
pub const UNDECIDED_FACTOR: f64 = 1e3;

/// The four period multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Alpha {
    A11,
    A12,
    A21,
    A22,
}

impl Alpha {
    pub const ALL: [Alpha; 4] = [Alpha::A11, Alpha::A12, Alpha::A21, Alpha::A22];

    /// `α_{ik}` for `i, k ∈ {0, 1}`.
    pub fn at(i: usize, k: usize) -> Alpha {
        match (i, k) {
            (0, 0) => Alpha::A11,
            (0, 1) => Alpha::A12,
            (1, 0) => Alpha::A21,
            (1, 1) => Alpha::A22,
            _ => panic!("multiplier index out of range: ({i}, {k})"),
        }
    }

    pub fn index(self) -> (usize, usize) {
        match self {
            Alpha::A11 => (0, 0),
            Alpha::A12 => (0, 1),
            Alpha::A21 => (1, 0),
            Alpha::A22 => (1, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Alpha::A11 => "a11",
            Alpha::A12 => "a12",
            Alpha::A21 => "a21",
            Alpha::A22 => "a22",
        }
    }

    pub fn from_name(s: &str) -> Option<Alpha> {
        Alpha::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValueError {
    #[error("no value assigned to multiplier {0}")]
    MissingAssignment(Alpha),
    #[error("multiplier {0} is assigned zero")]
    ZeroValue(Alpha),
    #[error("scalar generator must be a positive rational, got {0}")]
    NonPositiveScalar(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MulValue {
    alpha: BTreeMap<Alpha, Rational>,
    scalar: BTreeMap<Int, Rational>,
    phase: Rational,
}

impl MulValue {
    pub fn one() -> Self {
        MulValue { alpha: BTreeMap::new(), scalar: BTreeMap::new(), phase: Rational::zero() }
    }

    pub fn alpha(a: Alpha) -> Self {
        Self::alpha_pow(a, Rational::one())
    }

    pub fn alpha_pow(a: Alpha, e: Rational) -> Self {
        let mut v = Self::one();
        if !e.is_zero() {
            v.alpha.insert(a, e);
        }
        v
    }

    /// `r^e` for a positive rational `r`, stored over its prime factors.
    pub fn scalar_pow(r: &Rational, e: &Rational) -> Result<Self, ValueError> {
        if !r.is_positive() {
            return Err(ValueError::NonPositiveScalar(fmt_rational(r)));
        }
        let mut v = Self::one();
        for (p, k) in factor(r.numer()) {
            add_exp(&mut v.scalar, p, Rational::from_integer(Int::from(k)) * e);
        }
        for (p, k) in factor(r.denom()) {
            add_exp(&mut v.scalar, p, -Rational::from_integer(Int::from(k)) * e);
        }
        Ok(v)
    }

    pub fn scalar(r: &Rational) -> Result<Self, ValueError> {
        Self::scalar_pow(r, &Rational::one())
    }

    /// `exp(2πi·turns)`.
    pub fn phase(turns: &Rational) -> Self {
        MulValue { phase: frac(turns), ..Self::one() }
    }

    pub fn minus_one() -> Self {
        Self::phase(&Rational::new(Int::from(1), Int::from(2)))
    }

    /// `(-1)^k`.
    pub fn sign(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            Self::one()
        } else {
            Self::minus_one()
        }
    }

    /// `modulus · exp(2πi·turns)`.
    pub fn polar(modulus: &Rational, turns: &Rational) -> Result<Self, ValueError> {
        Ok(Self::scalar(modulus)?.mul(&Self::phase(turns)))
    }

    pub fn alpha_exponents(&self) -> &BTreeMap<Alpha, Rational> {
        &self.alpha
    }

    pub fn alpha_exponent(&self, a: Alpha) -> Rational {
        self.alpha.get(&a).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scalar_exponents(&self) -> &BTreeMap<Int, Rational> {
        &self.scalar
    }

    pub fn phase_turns(&self) -> &Rational {
        &self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.alpha.is_empty() && self.scalar.is_empty() && self.phase.is_zero()
    }

    pub fn is_alpha_free(&self) -> bool {
        self.alpha.is_empty()
    }

    /// A root of unity: no α and no modulus, only a phase.
    pub fn is_pure_phase(&self) -> bool {
        self.alpha.is_empty() && self.scalar.is_empty()
    }

    pub fn mul(&self, other: &MulValue) -> MulValue {
        let mut out = self.clone();
        for (a, e) in &other.alpha {
            add_exp(&mut out.alpha, *a, e.clone());
        }
        for (p, e) in &other.scalar {
            add_exp(&mut out.scalar, p.clone(), e.clone());
        }
        out.phase = frac(&(&out.phase + &other.phase));
        out
    }

    pub fn inv(&self) -> MulValue {
        self.pow_int(-1)
    }

    pub fn div(&self, other: &MulValue) -> MulValue {
        self.mul(&other.inv())
    }

    /// Scales every exponent and the stored phase by `q`.
    pub fn pow(&self, q: &Rational) -> MulValue {
        if q.is_zero() {
            return Self::one();
        }
        MulValue {
            alpha: self.alpha.iter().map(|(a, e)| (*a, e * q)).collect(),
            scalar: self.scalar.iter().map(|(p, e)| (p.clone(), e * q)).collect(),
            phase: frac(&(&self.phase * q)),
        }
    }

    pub fn pow_int(&self, k: i64) -> MulValue {
        self.pow(&Rational::from_integer(Int::from(k)))
    }

    pub fn pow_big(&self, k: &Int) -> MulValue {
        self.pow(&Rational::from_integer(k.clone()))
    }

    /// Principal `k`-th root: the phase of the result lies in `[0, 1/k)`.
    pub fn root(&self, k: u64) -> MulValue {
        assert!(k >= 1, "root index must be positive");
        self.pow(&Rational::new(Int::one(), Int::from(k)))
    }

    /// Replaces each α by its assigned value.
    pub fn substitute(&self, values: &BTreeMap<Alpha, MulValue>) -> Result<MulValue, ValueError> {
        let mut out = MulValue { alpha: BTreeMap::new(), ..self.clone() };
        for (a, e) in &self.alpha {
            let v = values.get(a).ok_or(ValueError::MissingAssignment(*a))?;
            out = out.mul(&v.pow(e));
        }
        Ok(out)
    }

    /// Complex value under a numeric α assignment.
    pub fn eval_numeric(&self, values: &BTreeMap<Alpha, Complex64>) -> Result<Complex64, ValueError> {
        let mut log_mod = 0.0f64;
        let mut arg = 0.0f64;
        for (a, e) in &self.alpha {
            let z = values.get(a).ok_or(ValueError::MissingAssignment(*a))?;
            if z.norm() == 0.0 {
                return Err(ValueError::ZeroValue(*a));
            }
            let e = e.to_f64().unwrap_or(f64::NAN);
            let mut theta = z.arg();
            if theta < 0.0 {
                theta += std::f64::consts::TAU;
            }
            log_mod += e * z.norm().ln();
            arg += e * theta;
        }
        for (p, e) in &self.scalar {
            let p = p.to_f64().unwrap_or(f64::INFINITY);
            log_mod += e.to_f64().unwrap_or(f64::NAN) * p.ln();
        }
        arg += std::f64::consts::TAU * self.phase.to_f64().unwrap_or(0.0);
        Ok(Complex64::from_polar(log_mod.exp(), arg))
    }

    /// Decides whether the value is 1 in the given mode.
    pub fn is_one(&self, mode: &EqualityMode) -> Result<Decision, ValueError> {
        match mode {
            EqualityMode::Formal => Ok(formal_decision(self)),
            EqualityMode::Exact(values) => {
                let v = self.substitute(values)?;
                let mut d = formal_decision(&v);
                d.certificate = if d.verdict == Verdict::Yes {
                    "evaluates exactly to 1".to_string()
                } else {
                    format!("evaluates exactly to {v}")
                };
                Ok(d)
            }
            EqualityMode::Numeric { values, tol } => {
                let z = self.eval_numeric(values)?;
                let margin = (z - Complex64::new(1.0, 0.0)).norm();
                let verdict = if margin <= *tol {
                    Verdict::Yes
                } else if margin <= UNDECIDED_FACTOR * tol {
                    Verdict::Undecided
                } else {
                    Verdict::No
                };
                Ok(Decision {
                    verdict,
                    certificate: format!(
                        "value {:.12}{:+.12}i, |value - 1| = {margin:.3e} (tol {tol:.1e})",
                        z.re, z.im
                    ),
                    margin: Some(margin),
                })
            }
        }
    }
}

fn formal_decision(v: &MulValue) -> Decision {
    if v.is_identity() {
        Decision { verdict: Verdict::Yes, certificate: "identity".to_string(), margin: None }
    } else {
        Decision {
            verdict: Verdict::No,
            certificate: format!("nonzero exponents: {v}"),
            margin: None,
        }
    }
}

fn add_exp<K: Ord>(map: &mut BTreeMap<K, Rational>, key: K, e: Rational) {
    if e.is_zero() {
        return;
    }
    let entry = map.entry(key).or_insert_with(Rational::zero);
    *entry += e;
    if entry.is_zero() {
        map.retain(|_, v| !v.is_zero());
    }
}

/// Prime factorization of a positive integer by trial division.
fn factor(n: &Int) -> Vec<(Int, u64)> {
    let mut out = Vec::new();
    if let Some(mut m) = n.to_u64() {
        let mut p = 2u64;
        while p * p <= m {
            if m % p == 0 {
                let mut k = 0;
                while m % p == 0 {
                    m /= p;
                    k += 1;
                }
                out.push((Int::from(p), k));
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if m > 1 {
            out.push((Int::from(m), 1));
        }
        return out;
    }
    let mut m = n.clone();
    let mut p = Int::from(2);
    while &p * &p <= m {
        if m.is_multiple_of(&p) {
            let mut k = 0;
            while m.is_multiple_of(&p) {
                m /= &p;
                k += 1;
            }
            out.push((p.clone(), k));
        }
        p += 1;
    }
    if m > Int::one() {
        out.push((m, 1));
    }
    out
}

impl std::ops::Mul for &MulValue {
    type Output = MulValue;
    fn mul(self, rhs: &MulValue) -> MulValue {
        MulValue::mul(self, rhs)
    }
}

impl fmt::Display for MulValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        for (a, e) in &self.alpha {
            parts.push(format!("{a}^{}", paren(e)));
        }
        for (p, e) in &self.scalar {
            parts.push(format!("{p}^{}", paren(e)));
        }
        if !self.phase.is_zero() {
            parts.push(format!("exp(2πi·{})", fmt_rational(&self.phase)));
        }
        f.write_str(&parts.join("·"))
    }
}

fn paren(e: &Rational) -> String {
    if e.is_integer() {
        e.numer().to_string()
    } else {
        format!("({})", fmt_rational(e))
    }
}

impl fmt::Debug for MulValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MulValue({self})")
    }
}

impl Serialize for MulValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            alpha: Vec<(String, String)>,
            scalar: Vec<(String, String)>,
            phase: String,
        }
        Repr {
            alpha: self.alpha.iter().map(|(a, e)| (a.name().to_string(), fmt_rational(e))).collect(),
            scalar: self.scalar.iter().map(|(p, e)| (p.to_string(), fmt_rational(e))).collect(),
            phase: fmt_rational(&self.phase),
        }
        .serialize(s)
    }
}

/// How equality with 1 is decided.
#[derive(Clone, Debug, PartialEq)]
pub enum EqualityMode {
    /// α's are multiplicatively independent symbols.
    Formal,
    /// α's are replaced by exact α-free values.
    Exact(BTreeMap<Alpha, MulValue>),
    /// α's are complex floats; equality is up to `tol`.
    Numeric { values: BTreeMap<Alpha, Complex64>, tol: f64 },
}

impl EqualityMode {
    pub fn kind(&self) -> ModeKind {
        match self {
            EqualityMode::Formal => ModeKind::Formal,
            EqualityMode::Exact(_) => ModeKind::Exact,
            EqualityMode::Numeric { .. } => ModeKind::Numeric,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum ModeKind {
    Formal,
    Exact,
    Numeric,
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeKind::Formal => "formal",
            ModeKind::Exact => "exact",
            ModeKind::Numeric => "numeric",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "true",
            Verdict::No => "false",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub certificate: String,
    pub margin: Option<f64>,
}
