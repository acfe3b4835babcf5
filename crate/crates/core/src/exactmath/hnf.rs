use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{ext_gcd, IntMatrix};

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and `U * A = H`.
///
/// Pivots are positive, entries above a pivot lie in `[0, pivot)`, and zero
/// rows sit at the bottom.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            let (g, x, y) = ext_gcd(&h[(r, c)], &h[(i, c)]);
            let p = &h[(r, c)] / &g;
            let q = &h[(i, c)] / &g;
            let nq = -q;
            h.combine_rows(r, i, &x, &y, &nq, &p);
            u.combine_rows(r, i, &x, &y, &nq, &p);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h[(i, c)].div_floor(&h[(r, c)]);
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}
