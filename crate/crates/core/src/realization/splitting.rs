//! Numeric stable/unstable splitting of a hyperbolic integer matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;

use crate::algebra::{char_poly, complex_roots, factor_over_integers, IntMatrix, IntPolynomial};
use crate::error::{Error, Result};

/// `R^D = E^u ⊕ E^s` for `A`, with contraction constants.
#[derive(Clone, Debug)]
pub struct HyperbolicSplitting {
    pub a: IntMatrix,
    pub a_f64: DMatrix<f64>,
    pub a_inv_f64: DMatrix<f64>,
    pub p_u: DMatrix<f64>,
    pub p_s: DMatrix<f64>,
    /// Columns span `E^u`.
    pub basis_u: DMatrix<f64>,
    pub c: f64,
    pub eta: f64,
    pub diagonalizable: bool,
}

const FIT_STEPS: i32 = 30;
const ROUNDING_ULPS: f64 = 64.0;

fn to_f64(m: &IntMatrix) -> DMatrix<f64> {
    let rows = m.to_f64_rows();
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| rows[i][j])
}

/// Real coefficients of `prod (t - root)`, lowest degree first.
fn real_poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::zero(); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

fn eval_matrix_poly(coeffs: &[f64], a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    coeffs.iter().rev().fold(DMatrix::zeros(n, n), |acc, &c| &acc * a + DMatrix::identity(n, n) * c)
}

/// Orthonormal basis of the numeric kernel of `m`, of known dimension.
fn kernel_basis(m: &DMatrix<f64>, dim: usize) -> Result<DMatrix<f64>> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Splitting("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut out = DMatrix::zeros(n, dim);
    for (col, &i) in order.iter().take(dim).enumerate() {
        out.set_column(col, &vt.row(i).transpose());
    }
    Ok(out)
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

impl HyperbolicSplitting {
    pub fn new(a: &IntMatrix, tol: f64) -> Result<Self> {
        a.require_square()?;
        let n = a.rows();
        let inv = a
            .inverse_unimodular()
            .ok_or_else(|| Error::NotUnimodular(format!("det {} is not a unit", a.det().unwrap_or_default())))?;
        let cp = char_poly(a)?;
        let mut unstable = Vec::new();
        let mut stable = Vec::new();
        let mut squarefree = IntPolynomial::one();
        for (f, mult) in factor_over_integers(&cp)? {
            squarefree = &squarefree * &f;
            for r in complex_roots(&f) {
                if (r.norm() - 1.0).abs() <= tol.max(1e-12) {
                    return Err(Error::NotHyperbolic(format!("{f} has a root of modulus {:.12}", r.norm())));
                }
                for _ in 0..mult {
                    if r.norm() > 1.0 { unstable.push(r) } else { stable.push(r) }
                }
            }
        }
        if unstable.len() + stable.len() != n {
            return Err(Error::Splitting("root count differs from dimension".into()));
        }
        let diagonalizable = squarefree.eval_matrix(a)?.is_zero();

        let a_f64 = to_f64(a);
        let a_inv_f64 = to_f64(&inv);
        let (du, ds) = (unstable.len(), stable.len());
        let bu = kernel_basis(&eval_matrix_poly(&real_poly_from_roots(&unstable), &a_f64), du)?;
        let bs = kernel_basis(&eval_matrix_poly(&real_poly_from_roots(&stable), &a_f64), ds)?;
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (n, du)).copy_from(&bu);
        m.view_mut((0, du), (n, ds)).copy_from(&bs);
        let minv = m.clone().try_inverse().ok_or_else(|| Error::Splitting("E^u and E^s are not complementary".into()))?;
        let mut sel = DMatrix::zeros(n, n);
        for i in 0..du {
            sel[(i, i)] = 1.0;
        }
        let p_u = &m * sel * &minv;
        let p_s = DMatrix::identity(n, n) - &p_u;

        let comm = (&a_f64 * &p_u - &p_u * &a_f64).norm();
        let scale = a_f64.norm().max(1.0) * p_u.norm().max(1.0);
        if comm > 1e-9 * scale {
            return Err(Error::Splitting(format!("A P_u - P_u A has norm {comm:.3e}")));
        }

        let rho_s = stable.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mu_u = unstable.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let spectral = rho_s.max(if mu_u.is_finite() { 1.0 / mu_u } else { 0.0 });
        let eta = if diagonalizable { spectral } else { (spectral + 1.0) / 2.0 };

        let mut fitted: f64 = 1.0;
        let mut ps = p_s.clone();
        let mut pu = p_u.clone();
        for k in 0..=FIT_STEPS {
            let g = eta.powi(k);
            fitted = fitted.max(spectral_norm(&ps) / g).max(spectral_norm(&pu) / g);
            ps = &p_s * (&a_f64 * ps);
            pu = &p_u * (&a_inv_f64 * pu);
        }
        Ok(HyperbolicSplitting {
            a: a.clone(),
            a_f64,
            a_inv_f64,
            p_u,
            p_s,
            basis_u: bu,
            c: 2.0 * fitted,
            eta,
            diagonalizable,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn unstable_dim(&self) -> usize {
        self.basis_u.ncols()
    }

    /// Bound on both truncated tails of the realization series at depth `n`,
    /// plus an allowance for floating-point rounding in the `2n` summed terms.
    pub fn error_bound(&self, n: usize, b: f64) -> f64 {
        let truncation = 2.0 * self.c * self.eta.powi(n as i32) * b / (1.0 - self.eta);
        let rounding = ROUNDING_ULPS * f64::EPSILON * (2 * n + 1) as f64 * self.c * b.max(1.0);
        truncation + rounding
    }

    /// `A^{-1}` followed by re-projection onto `E^u`.
    pub(crate) fn step_unstable(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.p_u * (&self.a_inv_f64 * v)
    }

    /// `A` followed by re-projection onto `E^s`.
    pub(crate) fn step_stable(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.p_s * (&self.a_f64 * v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_splitting() {
        let a = IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]);
        let s = HyperbolicSplitting::new(&a, 1e-9).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((s.eta - 1.0 / phi).abs() < 1e-12);
        assert!(s.diagonalizable);
        assert!((&s.p_u * &s.p_u - &s.p_u).norm() < 1e-12);
        assert!((s.p_u.trace() - 1.0).abs() < 1e-12);
        let u = s.basis_u.column(0).into_owned();
        assert!((&s.a_f64 * &u - &u * phi).norm() < 1e-12);
        assert!(s.c >= 2.0);
    }

    #[test]
    fn contraction_holds_on_samples() {
        let a = IntMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]);
        let s = HyperbolicSplitting::new(&a, 1e-9).unwrap();
        let z = &s.p_s * DVector::from_vec(vec![0.3, -1.2, 0.7]);
        let mut v = z.clone();
        for k in 1..=40 {
            v = s.step_stable(&v);
            assert!(v.norm() <= s.c * s.eta.powi(k) * z.norm() + 1e-12);
        }
    }

    #[test]
    fn rejects_non_hyperbolic_and_non_unimodular() {
        let rot = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]);
        assert!(matches!(HyperbolicSplitting::new(&rot, 1e-9), Err(Error::NotHyperbolic(_))));
        let two = IntMatrix::from_rows(&[vec![2]]);
        assert!(matches!(HyperbolicSplitting::new(&two, 1e-9), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn repeated_eigenvalues() {
        // two copies of the golden block
        let a = IntMatrix::from_rows(&[
            vec![1, 1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 1, 1],
            vec![0, 0, 1, 0],
        ]);
        let s = HyperbolicSplitting::new(&a, 1e-9).unwrap();
        assert_eq!(s.unstable_dim(), 2);
        assert!(s.diagonalizable);
    }
}
