//! The local model at a trivalent vertex: a line `β₁x₁ + β₂x₂ = 1` in a
//! torus chart, whose boundary values along the three flags are
//!
//! ```text
//! μ₁ = β₂^{-det L/w₁},   μ₂ = β₁^{det L/w₂},   μ₃ = (-β₂/β₁)^{det L/w₃}
//! ```
//!
//! with `L = (w₁p₁ w₂p₂; w₁q₁ w₂q₂)` built from the first two weight vectors.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::curve::{det2, primitive, IVec};
use crate::exactmath::{ext_gcd_i64, rat, Rational};
use crate::valuegroup::{EqualityMode, MulValue, ValueError, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VertexError {
    #[error("weight vectors do not span a trivalent vertex")]
    Degenerate,
    #[error("boundary values violate the vertex relation; residual {0}")]
    RelationViolated(String),
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// Primitive normal of a flag and, at a trivalent vertex, the exponent of
/// the pullback of its boundary coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FlagCharacter {
    pub normal: IVec,
    pub pullback_exponent: Option<i64>,
}

/// `det L` for the outgoing weight vectors `ms` of a trivalent vertex.
pub fn det_l(ms: &[IVec; 3]) -> i64 {
    det2(ms[0], ms[1])
}

/// Character of flag `i` (0-based) at a trivalent vertex with outgoing
/// weight vectors `ms`.
pub fn flag_character_at(ms: &[IVec; 3], i: usize) -> FlagCharacter {
    let ([p, q], w) = primitive(ms[i]);
    FlagCharacter { normal: [-q, p], pullback_exponent: Some(det_l(ms) / w) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexModel {
    pub l: [[i64; 2]; 2],
    pub weights: [i64; 3],
    pub gamma: i64,
    pub beta1: MulValue,
    pub beta2: MulValue,
    /// `(w_v/w₁)`-th root of unity applied to `β₂`.
    pub zeta1: MulValue,
    /// `(w_v/w₂)`-th root of unity applied to `β₁`.
    pub zeta2: MulValue,
    /// `w'₃`-th root of unity left over by the uncorrected `β`'s.
    pub zeta3: MulValue,
    pub lmn: [i64; 3],
}

fn exponents(ms: &[IVec; 3]) -> Result<([i64; 3], [i64; 3], i64, i64), VertexError> {
    let d = det_l(ms);
    if d == 0 || ms.contains(&[0, 0]) {
        return Err(VertexError::Degenerate);
    }
    let w = ms.map(|m| primitive(m).1);
    let gamma = w[0].gcd(&w[1]).gcd(&w[2]);
    Ok(([d / w[0], d / w[1], d / w[2]], w, gamma, d))
}

/// Boundary values `(μ₁, μ₂, μ₃)` of the line with coefficients `β₁, β₂`.
pub fn mus_from_betas(ms: &[IVec; 3], beta1: &MulValue, beta2: &MulValue) -> Result<[MulValue; 3], VertexError> {
    let (k, _, _, _) = exponents(ms)?;
    Ok([
        beta2.pow_int(-k[0]),
        beta1.pow_int(k[1]),
        MulValue::minus_one().mul(beta2).div(beta1).pow_int(k[2]),
    ])
}

/// The relation `μ₁^{w'₁} μ₂^{w'₂} μ₃^{w'₃} = (-1)^{w_v/γ}` as the quotient
/// of its two sides.
pub fn vertex_residual(ms: &[IVec; 3], mus: &[MulValue; 3]) -> Result<MulValue, VertexError> {
    let (_, w, gamma, d) = exponents(ms)?;
    let lhs = (0..3).fold(MulValue::one(), |acc, i| acc.mul(&mus[i].pow_int(w[i] / gamma)));
    Ok(lhs.div(&MulValue::sign(d.abs() / gamma)))
}

/// Integers `(l, m)` with `l·w₁ - m·w₂ ≡ -sign·n·γ (mod w₃)`, where
/// `γ = gcd(w₁, w₂, w₃)`. Reduced so that `0 ≤ l < w₃/gcd(w₁,w₃)` and
/// `0 ≤ m < w₃/gcd(w₂,w₃)`.
pub fn solve_root_congruence(w1: i64, w2: i64, w3: i64, gamma: i64, sign: i64, n: i64) -> (i64, i64) {
    let (g12, x1, y1) = ext_gcd_i64(w1, w2);
    let (g, x2, _) = ext_gcd_i64(g12, w3);
    debug_assert_eq!(g, gamma, "gamma must be gcd(w1, w2, w3)");
    let c = -sign * n;
    let l = x1 * x2 * c;
    let m = -y1 * x2 * c;
    (l.rem_euclid(w3 / w1.gcd(&w3)), m.rem_euclid(w3 / w2.gcd(&w3)))
}

/// Recovers a line from boundary values satisfying the vertex relation.
pub fn betas_from_mus(
    ms: &[IVec; 3],
    nu: &[MulValue; 3],
    mode: &EqualityMode,
) -> Result<VertexModel, VertexError> {
    let (k, w, gamma, d) = exponents(ms)?;
    let residual = vertex_residual(ms, nu)?;
    if residual.is_one(mode)?.verdict != Verdict::Yes {
        return Err(VertexError::RelationViolated(residual.to_string()));
    }
    let root_signed = |x: &MulValue, e: i64| x.pow_int(e.signum()).root(e.unsigned_abs());
    let beta2 = root_signed(&nu[0], -k[0]);
    let beta1 = root_signed(&nu[1], k[1]);
    let [_, _, mu3] = mus_from_betas(ms, &beta1, &beta2)?;
    let rho = nu[2].div(&mu3);
    let zeta3 = rho.inv();
    let w3p = w[2] / gamma;
    let n_turns = zeta3.phase_turns() * Rational::from_integer(w3p.into());
    if !zeta3.is_pure_phase() || !n_turns.is_integer() {
        return Err(VertexError::RelationViolated(format!(
            "{} is not a {w3p}-th root of unity",
            zeta3
        )));
    }
    let n = i64::try_from(n_turns.to_integer()).expect("small");
    let (l, m) = solve_root_congruence(w[0], w[1], w[2], gamma, d.signum(), n);
    let wv = d.abs();
    let zeta1 = MulValue::phase(&rat(l * w[0], wv));
    let zeta2 = MulValue::phase(&rat(m * w[1], wv));
    Ok(VertexModel {
        l: [[ms[0][0], ms[1][0]], [ms[0][1], ms[1][1]]],
        weights: w,
        gamma,
        beta1: beta1.mul(&zeta2),
        beta2: beta2.mul(&zeta1),
        zeta1,
        zeta2,
        zeta3,
        lmn: [l, m, n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const STD: [IVec; 3] = [[1, 0], [0, 1], [-1, -1]];

    fn scalar(n: i64, d: i64) -> MulValue {
        MulValue::scalar(&rat(n, d)).unwrap()
    }

    #[test]
    fn flag_characters_of_standard_triples() {
        assert_eq!(flag_character_at(&STD, 0), FlagCharacter { normal: [0, 1], pullback_exponent: Some(1) });
        let doubled = [[2, 0], [0, 2], [-2, -2]];
        assert_eq!(flag_character_at(&doubled, 0), FlagCharacter { normal: [0, 1], pullback_exponent: Some(2) });
        let third = flag_character_at(&STD, 2);
        assert_eq!(third.normal, [1, -1]);
        assert_eq!(third.pullback_exponent, Some(1));
    }

    #[test]
    fn congruence_examples() {
        assert_eq!(solve_root_congruence(2, 4, 6, 2, 1, 0), (0, 0));
        assert_eq!(solve_root_congruence(2, 4, 6, 2, 1, 1), (2, 0));
        assert_eq!(solve_root_congruence(1, 1, 1, 1, 1, 5), (0, 0));
    }

    #[test]
    fn standard_vertex_roundtrip() {
        let nu = [scalar(2, 1), scalar(3, 1), MulValue::minus_one().mul(&scalar(1, 6))];
        let vm = betas_from_mus(&STD, &nu, &EqualityMode::Formal).unwrap();
        assert_eq!(vm.beta2, scalar(1, 2));
        assert_eq!(vm.beta1, scalar(3, 1));
        assert!(vm.zeta1.is_identity() && vm.zeta2.is_identity());
        assert_eq!(mus_from_betas(&STD, &vm.beta1, &vm.beta2).unwrap(), nu);
    }

    #[test]
    fn trivial_values_give_trivial_line() {
        let nu = [MulValue::one(), MulValue::one(), MulValue::minus_one()];
        let vm = betas_from_mus(&STD, &nu, &EqualityMode::Formal).unwrap();
        assert!(vm.beta1.is_identity() && vm.beta2.is_identity());
    }

    #[test]
    fn weights_two_four_six_need_a_correction() {
        let ms: [IVec; 3] = [[2, 2], [-8, 4], [6, -6]];
        let (k, w, gamma, d) = exponents(&ms).unwrap();
        assert_eq!((w, gamma, d), ([2, 4, 6], 2, 24));
        assert_eq!(k, [12, 6, 4]);
        let b1 = scalar(3, 1).mul(&MulValue::phase(&rat(1, 7)));
        let b2 = scalar(5, 2);
        let mut nu = mus_from_betas(&ms, &b1, &b2).unwrap();
        assert!(vertex_residual(&ms, &nu).unwrap().is_identity());
        // a cube root of unity on ν₃ keeps the relation but not the β's
        nu[2] = nu[2].mul(&MulValue::phase(&rat(1, 3)));
        assert!(vertex_residual(&ms, &nu).unwrap().is_identity());
        let vm = betas_from_mus(&ms, &nu, &EqualityMode::Formal).unwrap();
        assert!(!vm.zeta3.is_identity());
        assert_eq!(vm.zeta1.div(&vm.zeta2).pow_int(k[2]), vm.zeta3.inv());
        assert!(vm.zeta1.pow_int(k[0]).is_identity() && vm.zeta2.pow_int(k[1]).is_identity());
        assert_eq!(mus_from_betas(&ms, &vm.beta1, &vm.beta2).unwrap(), nu);
    }

    #[test]
    fn negative_orientation_roundtrip() {
        let ms: [IVec; 3] = [[-8, 4], [2, 2], [6, -6]];
        assert!(det_l(&ms) < 0);
        let mut nu = mus_from_betas(&ms, &scalar(2, 3), &scalar(7, 1)).unwrap();
        nu[2] = nu[2].mul(&MulValue::phase(&rat(2, 3)));
        let vm = betas_from_mus(&ms, &nu, &EqualityMode::Formal).unwrap();
        assert_eq!(mus_from_betas(&ms, &vm.beta1, &vm.beta2).unwrap(), nu);
    }

    #[test]
    fn violated_relation_is_rejected() {
        let nu = [MulValue::one(), MulValue::one(), MulValue::one()];
        assert!(matches!(
            betas_from_mus(&STD, &nu, &EqualityMode::Formal),
            Err(VertexError::RelationViolated(_))
        ));
    }
}
