//! Kernel order by exhaustive enumeration, independent of Smith forms.
//!
//! For a full-column-rank `D`, the kernel of `(ℂ*)^n → (ℂ*)^r` is finite and
//! its exponent divides every nonzero maximal minor `M` of `D`. So the kernel
//! sits inside `μ_L^n` for `L = |M|`, and counting `y ∈ (ℤ/L)^n` with
//! `D·y ≡ 0 (mod L)` gives its order.

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::build_d;
use crate::curve::{CurveError, MarkedPoint, TropicalCurve};
use crate::exactmath::{combinations, det, rank_rational, Int, IntMatrix};

/// Row subsets examined when looking for a small maximal minor.
const MINOR_SUBSETS: usize = 20_000;
/// Search nodes visited before giving up.
const NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BruteforceError {
    #[error("matrix does not have full column rank; the kernel is infinite")]
    RankDeficient,
    #[error("enumeration too large (modulus {modulus}, {unknowns} unknowns)")]
    TooLarge { modulus: String, unknowns: usize },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// A nonzero maximal minor of least absolute value among the row subsets
/// examined (all of them when there are few).
pub fn smallest_maximal_minor(d: &IntMatrix) -> Option<Int> {
    let n = d.cols();
    if rank_rational(d) < n {
        return None;
    }
    let cols: Vec<usize> = (0..n).collect();
    let mut best: Option<Int> = None;
    for rows in combinations(d.rows(), n).into_iter().take(MINOR_SUBSETS) {
        let m = det(&d.submatrix(&rows, &cols)).abs();
        if !m.is_zero() && best.as_ref().is_none_or(|b| &m < b) {
            best = Some(m);
        }
    }
    if best.is_none() {
        // greedy independent rows
        let mut chosen: Vec<usize> = Vec::new();
        for r in 0..d.rows() {
            let mut trial = chosen.clone();
            trial.push(r);
            if rank_rational(&d.submatrix(&trial, &cols)) == trial.len() {
                chosen = trial;
            }
            if chosen.len() == n {
                break;
            }
        }
        best = Some(det(&d.submatrix(&chosen, &cols)).abs());
    }
    best
}

/// Number of `y ∈ (ℤ/L)^n` with `D·y ≡ 0 (mod L)`.
pub fn count_solutions_mod(d: &IntMatrix, modulus: i64) -> Result<u64, BruteforceError> {
    let n = d.cols();
    let l = modulus;
    let rows: Vec<Vec<i64>> = (0..d.rows())
        .map(|r| {
            (0..n)
                .map(|c| (&d[(r, c)] % Int::from(l)).to_i64().unwrap().rem_euclid(l))
                .collect()
        })
        .collect();
    // rows grouped by the column after which they are fully assigned
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        if let Some(last) = row.iter().rposition(|&x| x != 0) {
            closes[last].push(i);
        }
    }
    let mut y = vec![0i64; n];
    let mut nodes = 0u64;
    let mut count = 0u64;
    fn rec(
        k: usize,
        y: &mut [i64],
        rows: &[Vec<i64>],
        closes: &[Vec<usize>],
        l: i64,
        nodes: &mut u64,
        count: &mut u64,
    ) -> bool {
        if k == y.len() {
            *count += 1;
            return true;
        }
        for val in 0..l {
            *nodes += 1;
            if *nodes > NODE_BUDGET {
                return false;
            }
            y[k] = val;
            let ok = closes[k].iter().all(|&r| {
                rows[r].iter().zip(y.iter()).take(k + 1).map(|(a, b)| a * b % l).sum::<i64>() % l == 0
            });
            if ok && !rec(k + 1, y, rows, closes, l, nodes, count) {
                return false;
            }
        }
        true
    }
    if !rec(0, &mut y, &rows, &closes, l, &mut nodes, &mut count) {
        return Err(BruteforceError::TooLarge { modulus: l.to_string(), unknowns: n });
    }
    Ok(count)
}

/// Kernel order of a full-column-rank matrix by enumeration.
pub fn kernel_order_of_matrix(d: &IntMatrix) -> Result<Int, BruteforceError> {
    let l = smallest_maximal_minor(d).ok_or(BruteforceError::RankDeficient)?;
    let l64 = l.to_i64().filter(|&x| x <= 1 << 20).ok_or_else(|| BruteforceError::TooLarge {
        modulus: l.to_string(),
        unknowns: d.cols(),
    })?;
    Ok(Int::from(count_solutions_mod(d, l64)?))
}

/// `|Ker G_{ℂ*}|` for the marked curve, by enumeration.
pub fn kernel_order_bruteforce(curve: &TropicalCurve, marks: &[MarkedPoint]) -> Result<Int, BruteforceError> {
    let cm = build_d(curve, marks)?;
    kernel_order_of_matrix(&cm.d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exactmath::{int, rat};

    #[test]
    fn toy_diagonal() {
        let d = IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(kernel_order_of_matrix(&d).unwrap(), int(6));
        assert_eq!(smallest_maximal_minor(&d), Some(int(6)));
    }

    #[test]
    fn rank_deficient_is_an_error() {
        let d = IntMatrix::from_i64(&[vec![1, 1], vec![2, 2]]);
        assert_eq!(kernel_order_of_matrix(&d), Err(BruteforceError::RankDeficient));
    }

    #[test]
    fn theta_and_theta2() {
        let marks = vec![MarkedPoint { edge: 0, t: rat(1, 3) }, MarkedPoint { edge: 1, t: rat(1, 2) }];
        assert_eq!(kernel_order_bruteforce(&catalog::theta(), &marks).unwrap(), int(1));
        assert_eq!(kernel_order_bruteforce(&catalog::theta2(), &marks).unwrap(), int(1));
    }

    #[test]
    fn overdetermined_matrix() {
        // lattice generated by (2,0), (0,2), (1,1) has index 2
        let d = IntMatrix::from_i64(&[vec![2, 0], vec![0, 2], vec![1, 1]]);
        assert_eq!(kernel_order_of_matrix(&d).unwrap(), int(2));
    }
}
