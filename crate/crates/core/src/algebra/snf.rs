//! Smith normal form over the integers.
//!
//! `smith_normal_form(M)` returns unimodular `U`, `V` and diagonal `D` with
//! `U * M * V = D` and `d_1 | d_2 | ...`. All kernel, quotient and saturation
//! computations in this crate go through it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// row_i -= q * row_t
    fn row_axpy(&mut self, i: usize, t: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let (src, dst) = pick(m, t, i);
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d -= q * s;
            }
        }
    }

    /// col_j -= q * col_t
    fn col_axpy(&mut self, j: usize, t: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for row in m.iter_mut() {
                let delta = q * &row[t];
                row[j] -= delta;
            }
        }
    }
}

fn pick(m: &mut [Vec<BigInt>], src: usize, dst: usize) -> (&Vec<BigInt>, &mut Vec<BigInt>) {
    assert_ne!(src, dst);
    if src < dst {
        let (lo, hi) = m.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    }
}

/// Nearest-integer quotient, so the remainder is at most half the divisor.
fn balanced_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(p);
    // r has the sign of p, so stepping q up moves r toward zero
    if r.abs() * 2 > p.abs() {
        q + 1
    } else {
        q
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.to_rows(),
        u: IntMatrix::identity(rows).to_rows(),
        v: IntMatrix::identity(cols).to_rows(),
    };

    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !w.a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(pi, t);
        w.swap_cols(pj, t);

        loop {
            // smallest entry of row t and column t becomes the pivot
            let mut pos = (t, t);
            let mut min: Option<BigInt> = None;
            for i in t..rows {
                if !w.a[i][t].is_zero() && min.as_ref().is_none_or(|m| w.a[i][t].abs() < *m) {
                    min = Some(w.a[i][t].abs());
                    pos = (i, t);
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() && min.as_ref().is_none_or(|m| w.a[t][j].abs() < *m) {
                    min = Some(w.a[t][j].abs());
                    pos = (t, j);
                }
            }
            debug_assert!(min.is_some(), "pivot row and column vanished");
            if pos.0 != t {
                w.swap_rows(pos.0, t);
            }
            if pos.1 != t {
                w.swap_cols(pos.1, t);
            }

            let mut clean = true;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let q = balanced_quotient(&w.a[i][t], &w.a[t][t]);
                    w.row_axpy(i, t, &q);
                    clean &= w.a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let q = balanced_quotient(&w.a[t][j], &w.a[t][t]);
                    w.col_axpy(j, t, &q);
                    clean &= w.a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and go again
            let pivot = w.a[t][t].clone();
            let offending = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !w.a[i][j].is_multiple_of(&pivot)));
            match offending {
                Some(i) => w.row_axpy(t, i, &-BigInt::one()),
                None => break,
            }
        }

        if w.a[t][t].is_negative() {
            for m in [&mut w.a, &mut w.u] {
                for x in m[t].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
    }

    Smith {
        u: IntMatrix::from_rows(&w.u),
        d: IntMatrix::from_rows(&w.a),
        v: IntMatrix::from_rows(&w.v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(m: &IntMatrix) -> Smith {
        let s = smith_normal_form(m);
        assert_eq!(&(&s.u * m) * &s.v, s.d);
        assert!(s.u.det().unwrap().abs().is_one());
        assert!(s.v.det().unwrap().abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn identity_is_fixed() {
        let i = IntMatrix::identity(2);
        let s = check(&i);
        assert_eq!(s.u, i);
        assert_eq!(s.d, i);
        assert_eq!(s.v, i);
    }

    #[test]
    fn coprime_diagonal() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn two_four_six_eight() {
        // gcd of entries is 2 and |det| = 8, so D = diag(2, 4)
        let s = check(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn rectangular_and_zero() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2), BigInt::from(6)]);
        assert_eq!(check(&IntMatrix::zeros(3, 2)).rank(), 0);
    }

    proptest! {
        #[test]
        fn snf_identities(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(-9i64..10, 36)) {
            let m = IntMatrix::from_fn(rows, cols, |i, j| BigInt::from(seed[i * 6 + j]));
            let s = check(&m);
            prop_assert_eq!(s.rank(), m.rank());
        }
    }
}
