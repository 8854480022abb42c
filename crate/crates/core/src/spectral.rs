//! Conjugacy families of an expansion and the derived degree and flags.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::algebra::{algebraic_profile, AlgebraicNumber, IntPolynomial, NumberField, UnitCircle};
use crate::error::{Error, Result};

/// Eigenvalues of the expansion with their multiplicities.
#[derive(Clone, Debug)]
pub struct ExpansionSpec {
    pub eigenvalues: Vec<(AlgebraicNumber, usize)>,
    pub dimension: usize,
}

impl ExpansionSpec {
    pub fn new(eigenvalues: Vec<(AlgebraicNumber, usize)>, dimension: usize) -> Result<Self> {
        let total: usize = eigenvalues.iter().map(|(_, m)| m).sum();
        if total != dimension || eigenvalues.iter().any(|(_, m)| *m == 0) {
            return Err(Error::DimensionMismatch(format!(
                "multiplicities sum to {total}, dimension is {dimension}"
            )));
        }
        Ok(ExpansionSpec { eigenvalues, dimension })
    }

    /// One-dimensional inflation by `λ`.
    pub fn scalar(lambda: AlgebraicNumber) -> Self {
        ExpansionSpec { eigenvalues: vec![(lambda, 1)], dimension: 1 }
    }

    /// Parses the body of an `[expansion]` section:
    ///
    /// ```text
    /// dimension 2
    /// eigenvalue -1 -1 1 root 0 mult 2
    /// ```
    ///
    /// Coefficients are listed from the constant term up; `root` indexes the
    /// roots sorted by real part, then imaginary part, descending.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dimension = None;
        let mut eigenvalues = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse { line: lineno + 1, message };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "dimension" => {
                    let n = toks
                        .get(1)
                        .and_then(|t| t.parse::<usize>().ok())
                        .filter(|_| toks.len() == 2)
                        .ok_or_else(|| perr("expected `dimension <n>`".into()))?;
                    dimension = Some(n);
                }
                "eigenvalue" => {
                    let root_at = toks.iter().position(|t| *t == "root").ok_or_else(|| perr("missing `root`".into()))?;
                    let mult_at = toks.iter().position(|t| *t == "mult").ok_or_else(|| perr("missing `mult`".into()))?;
                    if !(root_at > 1 && mult_at == root_at + 2 && toks.len() == mult_at + 2) {
                        return Err(perr("expected `eigenvalue <c0> .. <cd> root <k> mult <m>`".into()));
                    }
                    let coeffs = toks[1..root_at]
                        .iter()
                        .map(|t| t.parse::<BigInt>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| perr(format!("bad coefficient: {e}")))?;
                    let root = toks[root_at + 1].parse::<usize>().map_err(|e| perr(format!("bad root index: {e}")))?;
                    let mult = toks[mult_at + 1].parse::<usize>().map_err(|e| perr(format!("bad multiplicity: {e}")))?;
                    let poly = IntPolynomial::new(coeffs);
                    let deg = poly.degree().unwrap_or(0);
                    if root >= deg {
                        return Err(perr(format!("root index {root} out of range for degree {deg}")));
                    }
                    let field = Arc::new(NumberField::new(poly, root)?);
                    eigenvalues.push((AlgebraicNumber::generator(&field), mult));
                }
                other => return Err(perr(format!("unknown directive `{other}`"))),
            }
        }
        let dimension = dimension.ok_or(Error::Parse { line: 0, message: "missing `dimension`".into() })?;
        Self::new(eigenvalues, dimension)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Family {
    #[serde(serialize_with = "serialize_display")]
    pub minpoly: IntPolynomial,
    /// Members as `(re, im, multiplicity)` in the chosen embeddings.
    pub members: Vec<(f64, f64, usize)>,
    pub degree: usize,
    pub multiplicity: usize,
}

fn serialize_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionFlags {
    pub unimodular: bool,
    pub hyperbolic: bool,
    pub pisot_family: bool,
    pub md_type: Option<(usize, usize)>,
    /// Diagonalizability is not checked; the `(m, d)` type presumes it.
    pub assumed_diagonalizable: bool,
    /// False when some conjugate modulus was within tolerance of 1.
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub families: Vec<Family>,
    pub d_lambda: usize,
    pub flags: Option<ExpansionFlags>,
}

fn member_value(a: &AlgebraicNumber) -> Complex64 {
    a.to_complex()
}

/// Groups eigenvalues by exact minimal polynomial and computes `D(Λ)`.
pub fn family_partition_and_degree(e: &ExpansionSpec, tol: f64) -> Result<DegreeReport> {
    let mut families: Vec<Family> = Vec::new();
    for (value, mult) in &e.eigenvalues {
        let z = member_value(value);
        if z.norm() <= 1.0 + tol {
            return Err(Error::NonExpanding(format!("{z:.6} (modulus {:.6})", z.norm())));
        }
        let minpoly = value.minimal_polynomial()?;
        if !minpoly.is_monic() {
            return Err(Error::NotMonic(minpoly.to_string()));
        }
        match families.iter_mut().find(|f| f.minpoly == minpoly) {
            Some(f) => {
                if let Some(m) = f.members.iter_mut().find(|m| (Complex64::new(m.0, m.1) - z).norm() <= tol * z.norm()) {
                    m.2 += mult;
                } else {
                    f.members.push((z.re, z.im, *mult));
                }
                f.multiplicity = f.members.iter().map(|m| m.2).max().unwrap_or(0);
            }
            None => {
                let degree = minpoly.degree().unwrap_or(0);
                families.push(Family { minpoly, members: vec![(z.re, z.im, *mult)], degree, multiplicity: *mult });
            }
        }
    }
    let d_lambda = families.iter().map(|f| f.degree * f.multiplicity).sum();
    Ok(DegreeReport { families, d_lambda, flags: None })
}

pub fn classify_expansion(e: &ExpansionSpec, tol: f64) -> Result<DegreeReport> {
    let mut report = family_partition_and_degree(e, tol)?;
    let mut unimodular = true;
    let mut hyperbolic = true;
    let mut pisot_family = true;
    let mut certified = true;
    for f in &report.families {
        let profile = algebraic_profile(&f.minpoly, tol)?;
        unimodular &= f.minpoly.coeff(0).abs().is_one();
        match profile.unit_circle {
            UnitCircle::Absent => {}
            UnitCircle::Present => hyperbolic = false,
            UnitCircle::Uncertified => {
                hyperbolic = false;
                certified = false;
            }
        }
        let same_mult = f.members.iter().all(|m| m.2 == f.multiplicity);
        let field = NumberField::new(f.minpoly.clone(), 0)?;
        let mut closed = true;
        for rho in field.conjugates() {
            let r = rho.norm();
            if (r - 1.0).abs() <= tol {
                certified = false;
                closed = false;
            } else if r > 1.0
                && !f.members.iter().any(|m| (Complex64::new(m.0, m.1) - rho).norm() <= 1e-8 * r.max(1.0))
            {
                closed = false;
            }
        }
        pisot_family &= same_mult && closed;
    }
    let md_type = match report.families.as_slice() {
        [f] if pisot_family => Some((f.multiplicity, f.degree)),
        _ => None,
    };
    report.flags = Some(ExpansionFlags {
        unimodular,
        hyperbolic,
        pisot_family,
        md_type,
        assumed_diagonalizable: md_type.is_some(),
        certified,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn gen(coeffs: &[i64], root: usize) -> AlgebraicNumber {
        let k = Arc::new(NumberField::new(IntPolynomial::from_i64(coeffs), root).unwrap());
        AlgebraicNumber::generator(&k)
    }

    fn flags(e: &ExpansionSpec) -> ExpansionFlags {
        classify_expansion(e, TOL).unwrap().flags.unwrap()
    }

    #[test]
    fn golden_mean() {
        let e = ExpansionSpec::scalar(gen(&[-1, -1, 1], 0));
        let r = classify_expansion(&e, TOL).unwrap();
        assert_eq!(r.d_lambda, 2);
        assert_eq!(r.families.len(), 1);
        assert_eq!(
            r.flags.unwrap(),
            ExpansionFlags {
                unimodular: true,
                hyperbolic: true,
                pisot_family: true,
                md_type: Some((1, 2)),
                assumed_diagonalizable: true,
                certified: true,
            }
        );
    }

    #[test]
    fn fourth_power_of_golden_mean() {
        let e = ExpansionSpec::scalar(gen(&[-1, -1, 1], 0).pow(4));
        let r = classify_expansion(&e, TOL).unwrap();
        assert_eq!(r.d_lambda, 2);
        assert_eq!(r.families[0].minpoly, IntPolynomial::from_i64(&[1, -7, 1]));
    }

    #[test]
    fn sqrt_two_is_not_pisot_family() {
        let f = flags(&ExpansionSpec::scalar(gen(&[-2, 0, 1], 0)));
        assert!(!f.unimodular);
        assert!(f.hyperbolic);
        assert!(!f.pisot_family);
        assert_eq!(f.md_type, None);
    }

    #[test]
    fn integer_two() {
        let e = ExpansionSpec::scalar(gen(&[-2, 1], 0));
        let r = classify_expansion(&e, TOL).unwrap();
        assert_eq!(r.d_lambda, 1);
        assert!(!r.flags.unwrap().unimodular);
    }

    #[test]
    fn both_conjugates_of_sqrt_two_form_a_family() {
        let e = ExpansionSpec::new(vec![(gen(&[-2, 0, 1], 0), 1), (gen(&[-2, 0, 1], 1), 1)], 2).unwrap();
        let r = classify_expansion(&e, TOL).unwrap();
        assert_eq!((r.families.len(), r.d_lambda), (1, 2));
        assert!(r.flags.unwrap().pisot_family);
    }

    #[test]
    fn multiplicities_and_families() {
        let e = ExpansionSpec::new(vec![(gen(&[-1, -1, 1], 0), 2), (gen(&[-3, 1], 0), 1)], 3).unwrap();
        let r = classify_expansion(&e, TOL).unwrap();
        assert_eq!(r.d_lambda, 2 * 2 + 1);
        let f = r.flags.unwrap();
        assert!(f.pisot_family);
        assert_eq!(f.md_type, None);
        assert!(!f.unimodular);
    }

    #[test]
    fn non_expanding_and_bad_dimension() {
        let e = ExpansionSpec::scalar(gen(&[-1, -1, 1], 1));
        assert!(matches!(family_partition_and_degree(&e, TOL), Err(Error::NonExpanding(_))));
        assert!(ExpansionSpec::new(vec![(gen(&[-2, 1], 0), 1)], 2).is_err());
    }

    #[test]
    fn salem_number_is_not_hyperbolic() {
        // Lehmer's polynomial has roots on the unit circle
        let f = flags(&ExpansionSpec::scalar(gen(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1], 0)));
        assert!(!f.hyperbolic);
        assert!(!f.pisot_family);
    }

    #[test]
    fn parse_section() {
        let e = ExpansionSpec::parse("# two copies\ndimension 2\neigenvalue -1 -1 1 root 0 mult 2\n").unwrap();
        assert_eq!(e.dimension, 2);
        assert_eq!(flags(&e).md_type, Some((2, 2)));
        assert!(ExpansionSpec::parse("dimension 2\neigenvalue -1 -1 1 root 0 mult 1").is_err());
        assert!(ExpansionSpec::parse("dimension 1\neigenvalue -1 -1 1 root 5 mult 1").is_err());
        assert!(ExpansionSpec::parse("eigenvalue -2 1 root 0 mult 1").is_err());
        assert!(ExpansionSpec::parse("dimension 1\nfoo").is_err());
    }

    #[test]
    fn square_keeps_degree_on_golden_mean() {
        let l = gen(&[-1, -1, 1], 0);
        let d1 = classify_expansion(&ExpansionSpec::scalar(l.clone()), TOL).unwrap().d_lambda;
        let d2 = classify_expansion(&ExpansionSpec::scalar(l.mul(&l)), TOL).unwrap().d_lambda;
        assert_eq!(d1, d2);
    }
}
