use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::factor::factor_over_integers;
use super::poly::IntPolynomial;
use super::roots::complex_roots;
use crate::error::{Error, Result};

/// Whether an irreducible polynomial has roots on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitCircle {
    /// Certified: no root of modulus one.
    Absent,
    /// Certified: roots of unity.
    Present,
    /// Some root modulus is within ten tolerances of one.
    Uncertified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraicProfile {
    pub is_unit: bool,
    pub is_pisot: bool,
    /// Root moduli in decreasing order.
    pub root_moduli: Vec<f64>,
    pub unit_circle: UnitCircle,
}

impl AlgebraicProfile {
    /// True when the flags do not rest on an uncertified numeric comparison.
    pub fn certified(&self) -> bool {
        self.unit_circle != UnitCircle::Uncertified
    }
}

/// Profile of a monic irreducible integer polynomial.
pub fn algebraic_profile(p: &IntPolynomial, tol: f64) -> Result<AlgebraicProfile> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Err(Error::Reducible(p.to_string()));
    }
    if !p.is_monic() {
        return Err(Error::NotMonic(p.to_string()));
    }
    let factors = factor_over_integers(p)?;
    if factors.len() != 1 || factors[0].1 != 1 {
        return Err(Error::Reducible(p.to_string()));
    }

    let roots = complex_roots(p);
    let mut root_moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    root_moduli.sort_by(|a, b| b.total_cmp(a));

    let is_unit = p.coeff(0).abs().is_one();
    let outside = root_moduli.iter().filter(|&&r| r > 1.0).count();
    let unit_circle = unit_circle_status(p, tol);
    let is_pisot = unit_circle == UnitCircle::Absent
        && outside == 1
        && root_moduli[1..].iter().all(|&r| r < 1.0);

    Ok(AlgebraicProfile { is_unit, is_pisot, root_moduli, unit_circle })
}

/// Stage one is exact: a root on the unit circle has its inverse (its
/// conjugate) as a root too, so it must divide `gcd(p, reverse(p))`.
/// Stage two certifies roots of unity exactly and otherwise compares
/// moduli against one.
fn unit_circle_status(p: &IntPolynomial, tol: f64) -> UnitCircle {
    if p.coeff(0).is_zero() {
        // the root 0 and, p being irreducible, p = t
        return UnitCircle::Absent;
    }
    let g = p.gcd(&p.reverse());
    if g.degree().unwrap_or(0) == 0 {
        return UnitCircle::Absent;
    }
    if is_cyclotomic_factor(&g) {
        return UnitCircle::Present;
    }
    let near = complex_roots(&g).iter().any(|z| (z.norm() - 1.0).abs() <= 10.0 * tol);
    if near {
        UnitCircle::Uncertified
    } else {
        UnitCircle::Absent
    }
}

/// `g` divides `t^k - 1` for some `k` up to the largest order a root of unity
/// of degree `deg g` can have.
fn is_cyclotomic_factor(g: &IntPolynomial) -> bool {
    let d = g.degree().unwrap_or(0);
    if !g.is_monic() || !g.coeff(0).abs().is_one() {
        return false;
    }
    // phi(k) >= sqrt(k / 2), so k <= 2 d^2 suffices
    let bound = 2 * d * d + 10;
    (1..=bound).any(|k| {
        let mut c = vec![BigInt::zero(); k + 1];
        c[0] = -BigInt::one();
        c[k] = BigInt::one();
        IntPolynomial::new(c).div_exact(g).is_some()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn golden_mean() {
        let pr = algebraic_profile(&p(&[-1, -1, 1]), 1e-9).unwrap();
        assert!(pr.is_unit && pr.is_pisot);
        assert_eq!(pr.unit_circle, UnitCircle::Absent);
        assert!((pr.root_moduli[1] - 0.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn sqrt_two_and_two() {
        let pr = algebraic_profile(&p(&[-2, 0, 1]), 1e-9).unwrap();
        assert!(!pr.is_unit && !pr.is_pisot);
        let pr = algebraic_profile(&p(&[-2, 1]), 1e-9).unwrap();
        assert!(!pr.is_unit);
    }

    #[test]
    fn reciprocal_pisot_unit() {
        let pr = algebraic_profile(&p(&[1, -7, 1]), 1e-9).unwrap();
        assert!(pr.is_unit && pr.is_pisot);
        assert_eq!(pr.unit_circle, UnitCircle::Absent);
        assert!((pr.root_moduli[0] - 6.854_101_966_249_685).abs() < 1e-12);
        assert!((pr.root_moduli[1] - 0.145_898_033_750_315_4).abs() < 1e-12);
    }

    #[test]
    fn roots_of_unity_certified() {
        assert_eq!(algebraic_profile(&p(&[1, 1, 1]), 1e-9).unwrap().unit_circle, UnitCircle::Present);
        assert_eq!(algebraic_profile(&p(&[1, 0, 1]), 1e-9).unwrap().unit_circle, UnitCircle::Present);
    }

    #[test]
    fn salem_polynomial_is_uncertified() {
        // Lehmer's polynomial: one real root > 1, one < 1, eight on the circle
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let pr = algebraic_profile(&lehmer, 1e-9).unwrap();
        assert_eq!(pr.unit_circle, UnitCircle::Uncertified);
        assert!(!pr.is_pisot);
    }

    #[test]
    fn rejects_reducible_and_non_monic() {
        assert!(matches!(algebraic_profile(&p(&[-1, 0, 1]), 1e-9), Err(Error::Reducible(_))));
        assert!(matches!(algebraic_profile(&p(&[-1, 2]), 1e-9), Err(Error::NotMonic(_))));
    }
}
