//! Smith normal form over the integers.
//!
//! Pivoting is by least absolute value: each elimination pass either clears
//! the pivot row and column or produces a strictly smaller remainder, which
//! is swapped in as the new pivot. Divisibility `d_i | d_{i+1}` is restored
//! by folding an offending row into the pivot row and repeating.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal, nonnegative,
/// with each nonzero diagonal entry dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// The nonzero diagonal entries of `S`, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = s.min_abs_nonzero(t) else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut residue = false;
            for i in t + 1..m {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&s[(i, t)] / &s[(t, t)]);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                residue |= !s[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&s[(t, j)] / &s[(t, t)]);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                residue |= !s[(t, j)].is_zero();
            }
            if residue {
                // A nonzero remainder is smaller than the pivot; make it the pivot.
                let (bi, bj) = smallest_in_cross(&s, t);
                s.swap_rows(t, bi);
                u.swap_rows(t, bi);
                s.swap_cols(t, bj);
                v.swap_cols(t, bj);
                continue;
            }
            // Row and column are clear; enforce divisibility of the remaining block.
            let offender =
                (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&s[(i, j)] % &s[(t, t)]).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::from(1);
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }

        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }

    SnfResult { u, s, v }
}

/// Least-absolute nonzero entry in row `t` or column `t` (pivot included).
fn smallest_in_cross(s: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut best_abs = s[(t, t)].abs();
    for i in t + 1..s.rows() {
        let a = s[(i, t)].abs();
        if !a.is_zero() && a < best_abs {
            best = (i, t);
            best_abs = a;
        }
    }
    for j in t + 1..s.cols() {
        let a = s[(t, j)].abs();
        if !a.is_zero() && a < best_abs {
            best = (t, j);
            best_abs = a;
        }
    }
    best
}
