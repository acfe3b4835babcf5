use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{Int, IntMatrix};

/// Smith decomposition `U * A * V = S` with unimodular `U`, `V`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries `d_1 | d_2 | ... | d_r`.
    pub fn invariant_factors(&self) -> Vec<Int> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form. Pivots on the entry of least absolute value to keep
/// coefficients small; the diagonal comes out nonnegative.
pub fn snf(a: &IntMatrix) -> SnfResult {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        let Some((pr, pc)) = min_abs_entry(&m, t) else {
            break;
        };
        m.swap_rows(t, pr);
        u.swap_rows(t, pr);
        m.swap_cols(t, pc);
        v.swap_cols(t, pc);

        loop {
            let mut clean = true;
            for r in t + 1..rows {
                if m[(r, t)].is_zero() {
                    continue;
                }
                let q = -(&m[(r, t)] / &m[(t, t)]);
                m.add_row_multiple(r, t, &q);
                u.add_row_multiple(r, t, &q);
                clean &= m[(r, t)].is_zero();
            }
            for c in t + 1..cols {
                if m[(t, c)].is_zero() {
                    continue;
                }
                let q = -(&m[(t, c)] / &m[(t, t)]);
                m.add_col_multiple(c, t, &q);
                v.add_col_multiple(c, t, &q);
                clean &= m[(t, c)].is_zero();
            }
            if !clean {
                // a remainder smaller than the pivot survived; move it into place
                let mut best: Option<(usize, usize)> = None;
                let mut best_abs = m[(t, t)].abs();
                for r in t + 1..rows {
                    let x = m[(r, t)].abs();
                    if !x.is_zero() && x < best_abs {
                        best_abs = x;
                        best = Some((r, t));
                    }
                }
                for c in t + 1..cols {
                    let x = m[(t, c)].abs();
                    if !x.is_zero() && x < best_abs {
                        best_abs = x;
                        best = Some((t, c));
                    }
                }
                if let Some((r, c)) = best {
                    m.swap_rows(t, r);
                    u.swap_rows(t, r);
                    m.swap_cols(t, c);
                    v.swap_cols(t, c);
                }
                continue;
            }
            let offender = (t + 1..rows)
                .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !m[(r, c)].is_multiple_of(&m[(t, t)]));
            match offender {
                Some((r, _)) => {
                    let one = Int::from(1);
                    m.add_row_multiple(t, r, &one);
                    u.add_row_multiple(t, r, &one);
                }
                None => break,
            }
        }
        if m[(t, t)].is_negative() {
            m.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, s: m, v }
}

fn min_abs_entry(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), Int)> = None;
    for r in t..m.rows() {
        for c in t..m.cols() {
            let x = m[(r, c)].abs();
            if x.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| &x < b) {
                best = Some(((r, c), x));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Particular integer solution of `A x = b` with an integer kernel basis.
#[derive(Clone, Debug)]
pub struct DiophantineSolution {
    pub particular: Vec<Int>,
    pub kernel: Vec<Vec<Int>>,
}

/// Solves `A x = b` over the integers; `None` when no integer solution exists.
pub fn linear_diophantine_solve(a: &IntMatrix, b: &[Int]) -> Option<DiophantineSolution> {
    assert_eq!(b.len(), a.rows(), "right-hand side length must equal row count");
    let f = snf(a);
    let c = f.u.mul_vec(b);
    let r = f.rank();
    let mut y = vec![Int::zero(); a.cols()];
    for i in 0..a.rows() {
        if i < r {
            let (q, rem) = c[i].div_rem(&f.s[(i, i)]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    let particular = f.v.mul_vec(&y);
    let kernel = (r..a.cols()).map(|j| f.v.col(j)).collect();
    Some(DiophantineSolution { particular, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{det, int};

    fn check(a: &IntMatrix) -> SnfResult {
        let f = snf(a);
        assert_eq!(f.u.mul(a).mul(&f.v), f.s);
        assert_eq!(det(&f.u).abs(), int(1));
        assert_eq!(det(&f.v).abs(), int(1));
        f
    }

    #[test]
    fn identity_is_fixed() {
        let f = check(&IntMatrix::identity(3));
        assert_eq!(f.s, IntMatrix::identity(3));
    }

    #[test]
    fn two_by_two_example() {
        let f = check(&IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(f.s, IntMatrix::from_i64(&[vec![2, 0], vec![0, 4]]));
    }

    #[test]
    fn rank_deficient_example() {
        let f = check(&IntMatrix::from_i64(&[vec![1, 0], vec![0, 0]]));
        assert_eq!(f.s, IntMatrix::from_i64(&[vec![1, 0], vec![0, 0]]));
        let z = check(&IntMatrix::zeros(2, 3));
        assert!(z.s.is_zero());
    }

    #[test]
    fn divisibility_fixup_needed() {
        // diag(2, 3) is not in Smith form; it must become diag(1, 6)
        let f = check(&IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(f.invariant_factors(), vec![int(1), int(6)]);
    }

    #[test]
    fn diophantine_examples() {
        let id = IntMatrix::identity(3);
        let sol = linear_diophantine_solve(&id, &[int(4), int(-1), int(7)]).unwrap();
        assert_eq!(sol.particular, vec![int(4), int(-1), int(7)]);
        assert!(sol.kernel.is_empty());

        assert!(linear_diophantine_solve(&IntMatrix::from_i64(&[vec![2]]), &[int(3)]).is_none());

        let a = IntMatrix::from_i64(&[vec![2, 4, 6]]);
        let sol = linear_diophantine_solve(&a, &[int(10)]).unwrap();
        assert_eq!(a.mul_vec(&sol.particular), vec![int(10)]);
        assert_eq!(sol.kernel.len(), 2);
        for k in &sol.kernel {
            assert_eq!(a.mul_vec(k), vec![int(0)]);
        }
    }
}
