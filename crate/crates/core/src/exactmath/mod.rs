//! Exact integer and rational arithmetic, plus integer lattice normal forms.
//!
//! Everything here works on arbitrary-precision integers. Intermediate
//! entries of Smith and Hermite reductions grow quickly, so no fixed-width
//! integer ever appears in a reduction.

mod hnf;
mod matrix;
mod snf;

pub use hnf::hnf;
pub use matrix::IntMatrix;
pub use snf::{linear_diophantine_solve, snf, DiophantineSolution, SnfResult};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision integer.
pub type Int = BigInt;

/// Canonical rational: reduced, positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(Int::from(n))
}

/// Parses `"p"` or `"p/q"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = n.parse().ok()?;
    let d: Int = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Extended Euclid: returns `(g, x, y)` with `g = gcd(a, b) >= 0` and
/// `a*x + b*y = g`. `(0, 0)` maps to `(0, 0, 0)`.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    if a.is_zero() && b.is_zero() {
        return (Int::zero(), Int::zero(), Int::zero());
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    let (mut old_t, mut t) = (Int::zero(), Int::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn ext_gcd_i64(a: i64, b: i64) -> (i64, i64, i64) {
    let (g, x, y) = ext_gcd(&int(a), &int(b));
    (to_i64(&g), to_i64(&x), to_i64(&y))
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub(crate) fn to_i64(n: &Int) -> i64 {
    i64::try_from(n).expect("integer does not fit in i64")
}

/// Rank over the rationals, by fraction-free (Bareiss) elimination.
pub fn rank_rational(a: &IntMatrix) -> usize {
    let mut m: Vec<Vec<Int>> = a.to_rows();
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut prev = Int::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = (&m[rank][c] * &m[r][k] - &m[r][c] * &m[rank][k]) / &prev;
                m[r][k] = v;
            }
            m[r][c] = Int::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Determinant of a square matrix (Bareiss).
pub fn det(a: &IntMatrix) -> Int {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    let n = a.rows();
    if n == 0 {
        return Int::one();
    }
    let mut m = a.to_rows();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Int::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// The k-th determinantal divisor: gcd of all k-by-k minors, by enumeration.
///
/// Exponential in the matrix size; meant as an oracle for small inputs.
pub fn determinantal_divisor(a: &IntMatrix, k: usize) -> Int {
    if k == 0 {
        return Int::one();
    }
    if k > a.rows() || k > a.cols() {
        return Int::zero();
    }
    let row_sets = combinations(a.rows(), k);
    let col_sets = combinations(a.cols(), k);
    let mut g = Int::zero();
    for rs in &row_sets {
        for cs in &col_sets {
            let minor = a.submatrix(rs, cs);
            g = g.gcd(&det(&minor));
            if g.is_one() {
                return g;
            }
        }
    }
    g
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=n.saturating_sub(need) {
            if i >= n {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Solves a rational linear system `A x = b` (dense, row-major), returning a
/// particular solution (free variables set to zero) and a nullspace basis.
pub fn solve_rational(
    a: &[Vec<Rational>],
    b: &[Rational],
) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -m[i][f].clone();
            }
            v
        })
        .collect();
    Some((x, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_conventions() {
        assert_eq!(ext_gcd_i64(0, 0), (0, 0, 0));
        assert_eq!(ext_gcd_i64(6, 4), (2, 1, -1));
        assert_eq!(ext_gcd_i64(-6, 4).0, 2);
        assert_eq!(ext_gcd_i64(0, -5), (5, 0, -1));
    }

    #[test]
    fn ext_gcd_bezout_on_a_grid() {
        for a in -30..=30 {
            for b in -30..=30 {
                let (g, x, y) = ext_gcd_i64(a, b);
                assert!(g >= 0);
                assert_eq!(a * x + b * y, g);
                assert_eq!(g, gcd_i64(a, b));
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_rational(&IntMatrix::identity(2)), 2);
        assert_eq!(rank_rational(&IntMatrix::from_i64(&[vec![1, 2], vec![2, 4]])), 1);
        assert_eq!(rank_rational(&IntMatrix::zeros(3, 4)), 0);
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]])), int(-8));
        assert_eq!(
            det(&IntMatrix::from_i64(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 3]])),
            int(-3)
        );
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/3"), Some(rat(1, 3)));
        assert_eq!(parse_rational(" -4/6 "), Some(rat(-2, 3)));
        assert_eq!(parse_rational("5"), Some(rat_int(5)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(fmt_rational(&rat(6, -4)), "-3/2");
    }

    #[test]
    fn rational_solve_with_kernel() {
        let a = vec![
            vec![rat_int(1), rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(1), rat_int(1)],
        ];
        let b = vec![rat_int(2), rat_int(3)];
        let (x, k) = solve_rational(&a, &b).unwrap();
        assert_eq!(k.len(), 1);
        for (row, bi) in a.iter().zip(&b) {
            let lhs: Rational = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            assert_eq!(&lhs, bi);
            let lk: Rational = row.iter().zip(&k[0]).map(|(p, q)| p * q).sum();
            assert!(lk.is_zero());
        }
        let inconsistent = vec![vec![rat_int(1)], vec![rat_int(1)]];
        assert!(solve_rational(&inconsistent, &[rat_int(0), rat_int(1)]).is_none());
    }
}
