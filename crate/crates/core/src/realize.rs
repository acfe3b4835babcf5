//! The invariant σ and the realizability verdict.
//!
//! A curve is realizable iff `σ = (-1)^{Σ w_v/δ}`, the sum running over
//! trivalent vertices. σ is computed twice: from the deck shifts
//! ([`sigma_cocycle`]) and from wall crossings of a fundamental domain
//! ([`sigma_geometric`]). The two must agree exactly.

use serde::Serialize;
use thiserror::Error;

use crate::curve::{crossings, offset_sequence, CurveError, IVec, QVec, Side, TropicalCurve};
use crate::exactmath::{fmt_rational, rat};
use crate::valuegroup::{Alpha, Decision, EqualityMode, MulValue, ValueError, Verdict};

/// Number of offsets tried before giving up on a degenerate configuration.
pub const OFFSET_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizeError {
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Character attached to crossing a wall of the given family with outward
/// weight vector `v = (a, b)`: `α12^{a/δ}·α11^{-b/δ}` for B1 walls and
/// `α22^{a/δ}·α21^{-b/δ}` for B2 walls.
pub fn chi(side: Side, v: IVec, delta: i64) -> MulValue {
    let (x, y) = match side {
        Side::B1 => (Alpha::A12, Alpha::A11),
        Side::B2 => (Alpha::A22, Alpha::A21),
    };
    MulValue::alpha_pow(x, rat(v[0], delta)).mul(&MulValue::alpha_pow(y, rat(-v[1], delta)))
}

/// σ from the deck shifts: `∏_e χ₁(m_e)^{-γ_{e,1}} · χ₂(m_e)^{-γ_{e,2}}`.
pub fn sigma_cocycle(curve: &TropicalCurve) -> MulValue {
    let delta = curve.delta();
    let mut sigma = MulValue::one();
    for e in &curve.edges {
        sigma = sigma
            .mul(&chi(Side::B1, e.m, delta).pow_int(-e.shift[0]))
            .mul(&chi(Side::B2, e.m, delta).pow_int(-e.shift[1]));
    }
    sigma
}

/// σ as the product of crossing characters over the walls of the domain
/// with corner at lattice coordinates `offset`.
pub fn sigma_geometric(curve: &TropicalCurve, offset: &QVec) -> Result<MulValue, CurveError> {
    let delta = curve.delta();
    let mut sigma = MulValue::one();
    for x in crossings(curve, offset)? {
        sigma = sigma.mul(&chi(x.side, x.outward, delta).pow_int(x.count as i64));
    }
    Ok(sigma)
}

/// [`sigma_geometric`] at the first non-degenerate offset of the retry sequence.
pub fn sigma_geometric_auto(curve: &TropicalCurve) -> Result<(MulValue, QVec), CurveError> {
    let mut last = None;
    for off in offset_sequence(OFFSET_ATTEMPTS) {
        match sigma_geometric(curve, &off) {
            Ok(s) => return Ok((s, off)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| CurveError::DegenerateOffset("no offsets tried".into())))
}

/// `Σ w_v/δ mod 2` over trivalent vertices.
pub fn parity(curve: &TropicalCurve) -> u8 {
    let delta = curve.delta();
    let total: i64 = (0..curve.vertices.len())
        .filter(|&v| curve.valence(v) == 3)
        .map(|v| curve.vertex_weight(v).expect("trivalent") / delta)
        .sum();
    total.rem_euclid(2) as u8
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizabilityReport {
    pub sigma: MulValue,
    pub parity: u8,
    /// `(-1)^parity`.
    pub target: MulValue,
    pub verdict: Verdict,
    pub mode: String,
    pub certificate: String,
    pub margin: Option<f64>,
}

impl RealizabilityReport {
    pub fn realizable(&self) -> bool {
        self.verdict == Verdict::Yes
    }
}

/// Decides `σ = (-1)^parity` in the given mode.
pub fn realizability(curve: &TropicalCurve, mode: &EqualityMode) -> Result<RealizabilityReport, RealizeError> {
    let sigma = sigma_cocycle(curve);
    let parity = parity(curve);
    let target = MulValue::sign(parity as i64);
    let Decision { verdict, certificate, margin } = sigma.div(&target).is_one(mode)?;
    Ok(RealizabilityReport {
        sigma,
        parity,
        target,
        verdict,
        mode: mode.kind().to_string(),
        certificate,
        margin,
    })
}

/// Textual offset in lattice coordinates, for reports.
pub fn fmt_offset(off: &QVec) -> String {
    format!("({}, {})", fmt_rational(&off[0]), fmt_rational(&off[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::curve::Multiplier;
    use crate::exactmath::rat_int;
    use std::collections::BTreeMap;

    fn theta_sigma() -> MulValue {
        MulValue::alpha(Alpha::A12).mul(&MulValue::alpha(Alpha::A22)).mul(&MulValue::alpha(Alpha::A21).inv())
    }

    #[test]
    fn theta_sigma_both_ways() {
        let c = catalog::theta();
        assert_eq!(sigma_cocycle(&c), theta_sigma());
        assert_eq!(sigma_geometric(&c, &[rat(-1, 5), rat(-1, 7)]).unwrap(), theta_sigma());
        assert_eq!(sigma_geometric(&c, &[rat(1, 3), rat(1, 9)]).unwrap(), theta_sigma());
    }

    #[test]
    fn first_retry_offset_is_degenerate_for_theta() {
        let c = catalog::theta();
        assert!(sigma_geometric(&c, &offset_sequence(1)[0]).is_err());
        let (s, off) = sigma_geometric_auto(&c).unwrap();
        assert_eq!(s, theta_sigma());
        assert_eq!(off, offset_sequence(2)[1]);
    }

    #[test]
    fn cycle_sigma_is_single_crossing() {
        let c = catalog::cycle();
        assert_eq!(sigma_cocycle(&c), MulValue::alpha(Alpha::A12));
        let (g, _) = sigma_geometric_auto(&c).unwrap();
        assert_eq!(g, MulValue::alpha(Alpha::A12));
    }

    #[test]
    fn sigma_survives_relift() {
        let c = catalog::theta();
        assert_eq!(sigma_cocycle(&c.relift(&[[2, -1], [0, 3]])), theta_sigma());
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity(&catalog::theta()), 0);
        assert_eq!(parity(&catalog::theta2()), 0);
        // w_v = 3 at both vertices
        assert_eq!(parity(&catalog::theta_with([[2, 1], [1, 2], [-3, -3]])), 0);
        assert_eq!(parity(&catalog::cycle()), 0);
    }

    #[test]
    fn verdicts_in_each_mode() {
        let c = catalog::theta();
        let one = catalog::with_multipliers(&c, Alpha::ALL.map(|_| Multiplier::Polar(MulValue::one())));
        let mode = one.lattice.equality_mode(None, 1e-9).unwrap();
        let r = realizability(&one, &mode).unwrap();
        assert!(r.realizable());

        let r = realizability(&c, &EqualityMode::Formal).unwrap();
        assert_eq!(r.verdict, Verdict::No);
        assert!(r.certificate.contains("a21^-1"));

        let two = MulValue::scalar(&rat_int(2)).unwrap();
        let values: BTreeMap<Alpha, MulValue> = [
            (Alpha::A11, MulValue::phase(&rat(1, 3))),
            (Alpha::A12, two.clone()),
            (Alpha::A22, MulValue::phase(&rat(1, 4))),
            (Alpha::A21, two.mul(&MulValue::phase(&rat(1, 4)))),
        ]
        .into_iter()
        .collect();
        assert!(realizability(&c, &EqualityMode::Exact(values)).unwrap().realizable());
    }
}
