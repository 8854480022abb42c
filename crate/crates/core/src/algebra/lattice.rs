//! Free abelian groups with an endomorphism: kernels, saturation, quotients
//! and direct limits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::matrix::{clear_denominators, rational_solve, IntMatrix};
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// `Z^rank` with an integer endomorphism.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulePresentation {
    pub rank: usize,
    #[serde(serialize_with = "serialize_matrix")]
    pub endo: IntMatrix,
    pub label: String,
}

fn serialize_matrix<S: serde::Serializer>(m: &IntMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.rows()))?;
    for r in m.to_rows() {
        let row: Vec<String> = r.iter().map(ToString::to_string).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

impl ModulePresentation {
    pub fn new(endo: IntMatrix, label: impl Into<String>) -> Result<Self> {
        endo.require_square()?;
        Ok(ModulePresentation { rank: endo.rows(), endo, label: label.into() })
    }
}

/// Free quotient `G / K` with the induced endomorphism.
///
/// `projection` maps `Z^rank(G)` onto the quotient coordinates, `lift` is a
/// section of it, and `projection * lift = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quotient {
    pub presentation: ModulePresentation,
    pub projection: IntMatrix,
    pub lift: IntMatrix,
}

/// Basis of `{v in Z^k : M v = 0}`. The result is saturated.
pub fn saturated_kernel(m: &[Vec<BigRational>], k: usize) -> Vec<Vec<BigInt>> {
    let rows: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| {
            assert_eq!(r.len(), k, "row length must match the ambient rank");
            clear_denominators(r)
        })
        .collect();
    if rows.is_empty() {
        return IntMatrix::identity(k).columns();
    }
    integer_kernel(&IntMatrix::from_rows(&rows))
}

/// Saturated basis of the integer kernel of an integer matrix.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(m);
    let r = s.rank();
    (r..m.cols()).map(|j| s.v.column(j)).collect()
}

/// Basis of `span_Q(vectors) ∩ Z^k`.
pub fn saturate(vectors: &[Vec<BigInt>], k: usize) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let n = IntMatrix::from_columns(k, vectors);
    let s = smith_normal_form(&n);
    let r = s.rank();
    let uinv = s.u.inverse_unimodular().expect("SNF transform is unimodular");
    (0..r).map(|j| uinv.column(j)).collect()
}

/// True when the vectors span a saturated sublattice with no redundancy:
/// every invariant factor of the inclusion matrix is 1.
pub fn is_saturated_basis(vectors: &[Vec<BigInt>], k: usize) -> bool {
    if vectors.is_empty() {
        return true;
    }
    let s = smith_normal_form(&IntMatrix::from_columns(k, vectors));
    let f = s.invariant_factors();
    f.len() == vectors.len() && f.iter().all(One::is_one)
}

/// Quotient of `g` by the submodule spanned by `kernel`, modulo torsion.
///
/// Fails with `InvarianceViolation` unless `g.endo` maps the span of `kernel`
/// into itself.
pub fn quotient_with_induced_map(g: &ModulePresentation, kernel: &[Vec<BigInt>]) -> Result<Quotient> {
    let k = g.rank;
    if kernel.iter().any(|v| v.len() != k) {
        return Err(Error::DimensionMismatch("kernel vector length differs from module rank".into()));
    }
    if kernel.is_empty() {
        return Ok(Quotient {
            presentation: g.clone(),
            projection: IntMatrix::identity(k),
            lift: IntMatrix::identity(k),
        });
    }
    let kmat = IntMatrix::from_columns(k, kernel);
    let s = smith_normal_form(&kmat);
    let r = s.rank();

    // invariance: U * endo * v must lie in the lattice U K = D Z^s
    for v in kernel {
        let y = s.u.mul_vec(&g.endo.mul_vec(v));
        for (i, yi) in y.iter().enumerate() {
            let ok = if i < r { yi.is_multiple_of(s.d.get(i, i)) } else { yi.is_zero() };
            if !ok {
                return Err(Error::InvarianceViolation);
            }
        }
    }

    let projection = s.u.submatrix(r..k, 0..k);
    let uinv = s.u.inverse_unimodular().expect("SNF transform is unimodular");
    let lift = uinv.submatrix(0..k, r..k);
    let endo = &(&projection * &g.endo) * &lift;
    Ok(Quotient {
        presentation: ModulePresentation {
            rank: k - r,
            endo,
            label: format!("{} / K", g.label),
        },
        projection,
        lift,
    })
}

/// Eventual rank of the powers of `m`, with the action of `m` on the
/// saturation of its eventual image in the basis returned alongside.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectLimit {
    pub rank: usize,
    pub action: IntMatrix,
    /// Columns span the saturated eventual image.
    pub basis: IntMatrix,
}

pub fn direct_limit(m: &IntMatrix) -> Result<DirectLimit> {
    m.require_square()?;
    let n = m.rows();
    let stable = m.pow(n as u32);
    let basis_vecs = saturate(&stable.columns(), n);
    let r = basis_vecs.len();
    let basis = IntMatrix::from_columns(n, &basis_vecs);
    let b_rat = basis.to_rational_rows();
    let mut cols = Vec::with_capacity(r);
    for v in &basis_vecs {
        let image: Vec<BigRational> = m.mul_vec(v).into_iter().map(BigRational::from_integer).collect();
        let x = rational_solve(&b_rat, &image)
            .ok_or_else(|| Error::Internal("eventual image is not invariant".into()))?;
        if x.iter().any(|q| !q.is_integer()) {
            return Err(Error::Internal("non-integral action on a saturated invariant lattice".into()));
        }
        cols.push(x.into_iter().map(|q| q.to_integer()).collect::<Vec<_>>());
    }
    Ok(DirectLimit { rank: r, action: IntMatrix::from_columns(r, &cols), basis })
}

pub fn direct_limit_rank(m: &IntMatrix) -> Result<(usize, IntMatrix)> {
    let d = direct_limit(m)?;
    Ok((d.rank, d.action))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{char_poly, IntPolynomial};
    use proptest::prelude::*;

    fn q(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect()
    }

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Independent oracle: the kernel vectors span the same Q-space as a
    /// rational nullspace and have integer entries with no common divisor
    /// in the 1-dimensional case.
    fn assert_kernel(m: &[Vec<BigRational>], k: usize, basis: &[Vec<BigInt>]) {
        let mq = IntMatrix::from_columns(k, basis);
        for v in basis {
            for row in m {
                let dot: BigRational = row
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * BigRational::from_integer(b.clone()))
                    .sum();
                assert!(dot.is_zero());
            }
        }
        assert_eq!(mq.rank() + crate::algebra::matrix::rational_rank(m), k);
        assert!(is_saturated_basis(basis, k));
    }

    #[test]
    fn kernel_examples() {
        let m = q(&[vec![1, 1]]);
        let b = saturated_kernel(&m, 2);
        assert_kernel(&m, 2, &b);
        assert!(b == vec![iv(&[1, -1])] || b == vec![iv(&[-1, 1])]);

        let m = q(&[vec![2, 4]]);
        let b = saturated_kernel(&m, 2);
        assert_kernel(&m, 2, &b);
        assert!(b == vec![iv(&[2, -1])] || b == vec![iv(&[-2, 1])]);

        let m = q(&[vec![0, 0, 0]]);
        assert_eq!(saturated_kernel(&m, 3).len(), 3);
        assert_eq!(saturated_kernel(&[], 3).len(), 3);
    }

    #[test]
    fn quotient_examples() {
        let g = ModulePresentation::new(IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]), "G").unwrap();
        let same = quotient_with_induced_map(&g, &[]).unwrap();
        assert_eq!(same.presentation.endo, g.endo);

        let quot = quotient_with_induced_map(&g, &[iv(&[1, 0])]).unwrap();
        assert_eq!(quot.presentation.rank, 1);
        assert_eq!(quot.presentation.endo, IntMatrix::from_rows(&[vec![3]]));
        assert_eq!(&quot.projection * &quot.lift, IntMatrix::identity(1));

        assert_eq!(quotient_with_induced_map(&g, &[iv(&[1, 1])]), Err(Error::InvarianceViolation));
    }

    #[test]
    fn direct_limit_examples() {
        let (r, a) = direct_limit_rank(&IntMatrix::identity(3)).unwrap();
        assert_eq!((r, a), (3, IntMatrix::identity(3)));

        let (r, a) = direct_limit_rank(&IntMatrix::from_rows(&[vec![1, 1], vec![0, 0]])).unwrap();
        assert_eq!((r, a), (1, IntMatrix::from_rows(&[vec![1]])));

        let m = IntMatrix::from_rows(&[vec![5, 3], vec![3, 2]]);
        let (r, a) = direct_limit_rank(&m).unwrap();
        assert_eq!(r, 2);
        assert_eq!(char_poly(&a).unwrap(), IntPolynomial::from_i64(&[1, -7, 1]));
    }

    proptest! {
        #[test]
        fn kernel_is_saturated(rows in 1usize..4, cols in 1usize..6, seed in proptest::collection::vec(-6i64..7, 24)) {
            let m: Vec<Vec<BigRational>> = (0..rows)
                .map(|i| (0..cols).map(|j| BigRational::new(seed[i * 6 + j].into(), BigInt::from(1 + (i + j) % 3))).collect())
                .collect();
            let b = saturated_kernel(&m, cols);
            assert_kernel(&m, cols, &b);
        }

        #[test]
        fn direct_limit_cofinal(seed in proptest::collection::vec(-2i64..3, 16), n in 1usize..5) {
            let m = IntMatrix::from_fn(n, n, |i, j| BigInt::from(seed[i * 4 + j]));
            let (r1, _) = direct_limit_rank(&m).unwrap();
            let (r2, _) = direct_limit_rank(&(&m * &m)).unwrap();
            prop_assert_eq!(r1, r2);
        }
    }
}
