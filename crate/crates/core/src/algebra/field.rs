use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use num_integer::Integer;

use super::factor::{factor_over_integers, is_irreducible};
use super::matrix::IntMatrix;
use super::poly::char_poly;
use super::matrix::rational_solve;
use super::poly::IntPolynomial;
use super::roots::complex_roots;
use crate::error::{Error, Result};

/// `Q(lambda)` for a root `lambda` of a monic irreducible integer polynomial,
/// together with one chosen complex embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberField {
    minpoly: IntPolynomial,
    embedding_index: usize,
    roots: Vec<Complex64>,
}

impl NumberField {
    /// `embedding_index` indexes the roots sorted by real part, then imaginary
    /// part, descending.
    pub fn new(minpoly: IntPolynomial, embedding_index: usize) -> Result<Self> {
        if !minpoly.is_monic() {
            return Err(Error::NotMonic(minpoly.to_string()));
        }
        if !is_irreducible(&minpoly)? {
            return Err(Error::Reducible(minpoly.to_string()));
        }
        let roots = complex_roots(&minpoly);
        if embedding_index >= roots.len() {
            return Err(Error::DimensionMismatch(format!(
                "embedding {embedding_index} of a degree {} field",
                roots.len()
            )));
        }
        Ok(NumberField { minpoly, embedding_index, roots })
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn embedding_index(&self) -> usize {
        self.embedding_index
    }

    pub fn embedding(&self) -> Complex64 {
        self.roots[self.embedding_index]
    }

    /// All conjugates of the generator, in embedding order.
    pub fn conjugates(&self) -> &[Complex64] {
        &self.roots
    }
}

/// Element of a number field in power-basis coordinates.
#[derive(Clone, PartialEq)]
pub struct AlgebraicNumber {
    field: Arc<NumberField>,
    coords: Vec<BigRational>,
}

impl AlgebraicNumber {
    pub fn new(field: Arc<NumberField>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != field.degree() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a degree {} field",
                coords.len(),
                field.degree()
            )));
        }
        Ok(AlgebraicNumber { field, coords })
    }

    pub fn from_integer(field: &Arc<NumberField>, n: impl Into<BigInt>) -> Self {
        Self::from_rational(field, BigRational::from_integer(n.into()))
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> Self {
        let mut coords = vec![BigRational::zero(); field.degree()];
        coords[0] = q;
        AlgebraicNumber { field: field.clone(), coords }
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_integer(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_integer(field, 1)
    }

    /// The generator `lambda`.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        let d = field.degree();
        if d == 1 {
            return Self::from_integer(field, -field.minpoly.coeff(0));
        }
        let mut coords = vec![BigRational::zero(); d];
        coords[1] = BigRational::one();
        AlgebraicNumber { field: field.clone(), coords }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect();
        AlgebraicNumber { field: self.field.clone(), coords }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let coords = self.coords.iter().map(|a| -a).collect();
        AlgebraicNumber { field: self.field.clone(), coords }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let coords = self.coords.iter().map(|a| a * k).collect();
        AlgebraicNumber { field: self.field.clone(), coords }
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        let d = self.field.degree();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        // reduce with t^d = -sum c_i t^i
        let mp: Vec<BigRational> = self
            .field
            .minpoly
            .coeffs()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        for k in (d..prod.len()).rev() {
            let top = std::mem::take(&mut prod[k]);
            if top.is_zero() {
                continue;
            }
            for i in 0..d {
                prod[k - d + i] -= &top * &mp[i];
            }
        }
        prod.truncate(d);
        AlgebraicNumber { field: self.field.clone(), coords: prod }
    }

    /// Matrix of multiplication by `self` on the power basis (columns are images).
    pub fn multiplication_matrix(&self) -> Vec<Vec<BigRational>> {
        let d = self.field.degree();
        let cols: Vec<Vec<BigRational>> = (0..d)
            .map(|j| {
                let mut e = vec![BigRational::zero(); d];
                e[j] = BigRational::one();
                self.mul(&AlgebraicNumber { field: self.field.clone(), coords: e }).coords
            })
            .collect();
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.field.degree();
        let mut e = vec![BigRational::zero(); d];
        e[0] = BigRational::one();
        let x = rational_solve(&self.multiplication_matrix(), &e).ok_or(Error::DivisionByZero)?;
        Ok(AlgebraicNumber { field: self.field.clone(), coords: x })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inverse()?))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(&self.field), |acc, _| acc.mul(self))
    }

    /// Primitive integer minimal polynomial, positive leading coefficient.
    pub fn minimal_polynomial(&self) -> Result<IntPolynomial> {
        let m = self.multiplication_matrix();
        let d = m.len();
        let den = m.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let n = IntMatrix::from_fn(d, d, |i, j| (&m[i][j] * BigRational::from_integer(den.clone())).to_integer());
        let cp = char_poly(&n)?;
        // den^d * charpoly(M)(t) has coefficients c_i * den^i
        let scaled: Vec<BigInt> = cp.coeffs().iter().enumerate().map(|(i, c)| c * den.pow(i as u32)).collect();
        let value = self.to_complex();
        let mut best: Option<(f64, IntPolynomial)> = None;
        for (f, _) in factor_over_integers(&IntPolynomial::new(scaled))? {
            if f.degree().unwrap_or(0) == 0 {
                continue;
            }
            let scale: f64 = f.coeffs_f64().iter().enumerate().map(|(i, c)| c.abs() * value.norm().powi(i as i32)).sum();
            let err = f.eval_complex(value).norm() / scale.max(1.0);
            if best.as_ref().is_none_or(|(e, _)| err < *e) {
                best = Some((err, f));
            }
        }
        best.map(|(_, f)| f.primitive_part()).ok_or_else(|| Error::Internal("no minimal polynomial factor".into()))
    }

    /// Value under the given conjugate of the generator.
    pub fn eval_at(&self, root: Complex64) -> Complex64 {
        self.coords.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * root + c.to_f64().unwrap_or(f64::NAN)
        })
    }

    pub fn to_complex(&self) -> Complex64 {
        self.eval_at(self.field.embedding())
    }

    /// Real part in the chosen embedding.
    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }

    fn same_field(&self, rhs: &Self) {
        assert!(
            Arc::ptr_eq(&self.field, &rhs.field) || self.field == rhs.field,
            "arithmetic across different number fields"
        );
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "l".to_string(),
                _ => format!("l^{i}"),
            };
            let coef = if c.is_one() && i > 0 {
                String::new()
            } else if (-c).is_one() && i > 0 {
                "-".to_string()
            } else if i > 0 {
                format!("({c})")
            } else {
                c.to_string()
            };
            terms.push(format!("{coef}{mono}"));
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (~{:.12})", self.to_f64())
    }
}
