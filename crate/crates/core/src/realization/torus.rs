//! Points of `T^D = R^D / Z^D`, toral automorphisms and their periodic points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::matrix::rational_solve;
use crate::algebra::{smith_normal_form, IntMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToralPoint {
    pub coords: Vec<f64>,
}

fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 { 0.0 } else { r }
}

fn wrap_centered(x: f64) -> f64 {
    x - x.round()
}

impl ToralPoint {
    pub fn new(coords: impl IntoIterator<Item = f64>) -> Self {
        ToralPoint { coords: coords.into_iter().map(wrap_unit).collect() }
    }

    pub fn zero(d: usize) -> Self {
        ToralPoint { coords: vec![0.0; d] }
    }

    pub fn from_rational(x: &[BigRational]) -> Self {
        Self::new(x.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)))
    }

    /// Euclidean length of the shortest representative of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| wrap_centered(a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// `x + Z^D ↦ A x + Z^D`.
pub fn apply_f(a: &IntMatrix, x: &ToralPoint) -> ToralPoint {
    let rows = a.to_f64_rows();
    ToralPoint::new(rows.iter().map(|r| r.iter().zip(&x.coords).map(|(m, v)| m * v).sum::<f64>()))
}

fn periodic_system(a: &IntMatrix, m: usize) -> Result<IntMatrix> {
    a.require_square()?;
    let b = &a.pow(m as u32) - &IntMatrix::identity(a.rows());
    if b.det()?.is_zero() {
        return Err(Error::SingularFixedPointSystem(m));
    }
    Ok(b)
}

fn reduce_mod_one(q: &BigRational) -> BigRational {
    q - BigRational::from_integer(q.floor().to_integer())
}

/// `|det(A^m - I)|`, the number of points fixed by `F_A^m`.
pub fn fixed_point_count(a: &IntMatrix, m: usize) -> Result<BigInt> {
    Ok(periodic_system(a, m)?.det()?.abs())
}

/// Every `x ∈ Q^D / Z^D` with `A^m x ≡ x`, coordinates in `[0, 1)`, sorted.
pub fn fixed_points_torus(a: &IntMatrix, m: usize) -> Result<Vec<Vec<BigRational>>> {
    let b = periodic_system(a, m)?;
    let d = b.rows();
    let s = smith_normal_form(&b);
    let diag: Vec<BigInt> = (0..d).map(|i| s.d.get(i, i).clone()).collect();
    // x = V D^{-1} k for k in the box prod [0, d_i)
    let mut out = Vec::new();
    let mut k = vec![BigInt::zero(); d];
    loop {
        let scaled: Vec<BigRational> = (0..d).map(|i| BigRational::new(k[i].clone(), diag[i].clone())).collect();
        let x: Vec<BigRational> = (0..d)
            .map(|r| {
                let sum: BigRational = (0..d).map(|c| BigRational::from_integer(s.v.get(r, c).clone()) * &scaled[c]).sum();
                reduce_mod_one(&sum)
            })
            .collect();
        out.push(x);
        let mut i = 0;
        loop {
            if i == d {
                out.sort();
                return Ok(out);
            }
            k[i] += 1;
            if k[i] < diag[i] {
                break;
            }
            k[i] = BigInt::zero();
            i += 1;
        }
    }
}

/// Nearest exact `F_A^m`-fixed point to `x`, with its torus distance.
pub fn snap_to_fixed_point(a: &IntMatrix, m: usize, x: &ToralPoint) -> Result<(Vec<BigRational>, f64)> {
    let b = periodic_system(a, m)?;
    let rows = b.to_f64_rows();
    let y: Vec<BigRational> = rows
        .iter()
        .map(|r| {
            let v: f64 = r.iter().zip(&x.coords).map(|(p, q)| p * q).sum();
            BigRational::from_integer(BigInt::from(v.round() as i64))
        })
        .collect();
    let exact = rational_solve(&b.to_rational_rows(), &y).ok_or(Error::SingularFixedPointSystem(m))?;
    let exact: Vec<BigRational> = exact.iter().map(reduce_mod_one).collect();
    let dist = ToralPoint::from_rational(&exact).distance(x);
    Ok((exact, dist))
}

/// Lower bound on the coordinate gap between distinct `F_A^m`-fixed points.
pub fn fixed_point_spacing(a: &IntMatrix, m: usize) -> Result<BigRational> {
    let s = smith_normal_form(&periodic_system(a, m)?);
    let largest = s.invariant_factors().into_iter().max().unwrap_or_else(BigInt::one);
    Ok(BigRational::new(BigInt::one(), largest))
}
