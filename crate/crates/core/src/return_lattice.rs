//! Return vectors, the kernels `K_Λ` and `K_hyp`, and the induced quotient maps.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::algebra::{
    algebraic_profile, char_poly, factor_over_integers, integer_kernel, quotient_with_induced_map, saturated_kernel,
    AlgebraicNumber, IntMatrix, IntPolynomial, ModulePresentation, Quotient, UnitCircle,
};
use crate::complex::{ApComplex, HomologyAction};
use crate::error::{Error, Result};
use crate::substitution::PerronData;

/// Displacement of each `H_1` basis cycle, in `Q(λ)`.
#[derive(Clone, Debug)]
pub struct ReturnHom {
    pub lambda: AlgebraicNumber,
    pub values: Vec<AlgebraicNumber>,
}

impl ReturnHom {
    pub fn eval(&self, coords: &[BigInt]) -> AlgebraicNumber {
        self.values
            .iter()
            .zip(coords)
            .fold(AlgebraicNumber::zero(self.lambda.field()), |acc, (v, c)| acc.add(&v.scale_int(c)))
    }

    /// Rows are power-basis coordinates, columns are basis cycles.
    pub fn coordinate_matrix(&self) -> Vec<Vec<BigRational>> {
        let d = self.lambda.field().degree();
        (0..d).map(|i| self.values.iter().map(|v| v.coords()[i].clone()).collect()).collect()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(AlgebraicNumber::to_f64).collect()
    }
}

/// Exact value of `l` on an edge vector.
pub fn cycle_length(x: &ApComplex, perron: &PerronData, z: &[BigInt]) -> AlgebraicNumber {
    z.iter()
        .zip(&x.edges)
        .fold(AlgebraicNumber::zero(perron.field()), |acc, (c, e)| acc.add(&e.length.scale_int(c)))
}

pub fn return_homomorphism(h: &HomologyAction, x: &ApComplex, perron: &PerronData) -> Result<ReturnHom> {
    let values: Vec<AlgebraicNumber> = h.cycle_basis.iter().map(|z| cycle_length(x, perron, z)).collect();
    let rh = ReturnHom { lambda: perron.lambda.clone(), values };
    for j in 0..h.rank() {
        if rh.eval(&h.fstar.column(j)) != rh.lambda.mul(&rh.values[j]) {
            return Err(Error::EigenIdentity(j));
        }
    }
    Ok(rh)
}

pub fn k_lambda_and_a(rh: &ReturnHom, h: &HomologyAction) -> Result<(Vec<Vec<BigInt>>, Quotient)> {
    let kernel = saturated_kernel(&rh.coordinate_matrix(), h.rank());
    let mut gr = quotient_with_induced_map(&h.h1, &kernel)?;
    gr.presentation.label = "GR".into();
    Ok((kernel, gr))
}

/// Splitting `char_poly(f_*) = q·r` and the quotient by `K_hyp = ker r(f_*)`.
#[derive(Clone, Debug)]
pub struct HypRefinement {
    pub q: IntPolynomial,
    pub r: IntPolynomial,
    pub k_hyp: Vec<Vec<BigInt>>,
    pub hyp: Quotient,
    pub warnings: Vec<String>,
}

/// Fails with `NotUnimodular` when the minimal polynomial of `λ` is not a
/// unit factor free of unit-circle roots.
pub fn k_hyp_and_aprime(h: &HomologyAction, lambda_minpoly: &IntPolynomial, tol: f64) -> Result<HypRefinement> {
    let lp = algebraic_profile(lambda_minpoly, tol)?;
    if !(lp.is_unit && lp.unit_circle == UnitCircle::Absent) {
        return Err(Error::NotUnimodular(format!("{lambda_minpoly} has constant term other than ±1")));
    }
    let cp = char_poly(&h.fstar)?;
    let mut q = IntPolynomial::one();
    let mut r = IntPolynomial::one();
    let mut warnings = Vec::new();
    for (factor, mult) in factor_over_integers(&cp)? {
        let p = algebraic_profile(&factor, tol)?;
        let part = factor.pow(mult as u32);
        if p.unit_circle == UnitCircle::Uncertified {
            warnings.push(format!("unit-circle test for {factor} is uncertified; treated as non-hyperbolic"));
        }
        if p.is_unit && p.unit_circle == UnitCircle::Absent {
            q = &q * &part;
        } else {
            r = &r * &part;
        }
    }
    let k_hyp = integer_kernel(&r.eval_matrix(&h.fstar)?);
    let mut hyp = quotient_with_induced_map(&h.h1, &k_hyp)?;
    hyp.presentation.label = "H1_hyp".into();

    if char_poly(&hyp.presentation.endo)? != q {
        return Err(Error::Splitting(format!("A' does not have characteristic polynomial {q}")));
    }
    if hyp.presentation.rank > 0 && !hyp.presentation.endo.det()?.abs().is_one() {
        return Err(Error::Splitting("A' is not unimodular".into()));
    }
    Ok(HypRefinement { q, r, k_hyp, hyp, warnings })
}

/// Saturated `f*`-invariant sublattice of the relative cohomology on which
/// the action has characteristic polynomial a power of `λ`'s minimal polynomial.
pub fn pisot_subgroup(rel: &ModulePresentation, lambda_minpoly: &IntPolynomial) -> Result<Vec<Vec<BigInt>>> {
    let cp = char_poly(&rel.endo)?;
    let factors = factor_over_integers(&cp)?;
    let mult = factors
        .iter()
        .find(|(f, _)| f == lambda_minpoly)
        .map(|(_, m)| *m)
        .ok_or_else(|| Error::MinpolyNotDivisor(format!("{lambda_minpoly} does not divide {cp}")))?;
    let p = integer_kernel(&lambda_minpoly.pow(mult as u32).eval_matrix(&rel.endo)?);
    let expected = lambda_minpoly.degree().unwrap_or(0) * mult;
    if p.len() != expected {
        return Err(Error::Internal(format!("Pisot subgroup has rank {} instead of {expected}", p.len())));
    }
    Ok(p)
}

#[derive(Clone, Debug)]
pub struct ReturnLattice {
    pub hom: ReturnHom,
    pub k_lambda: Vec<Vec<BigInt>>,
    pub gr: Quotient,
    /// `Err` when the refinement is refused, e.g. for a non-unimodular inflation.
    pub hyp: Result<HypRefinement>,
}

impl ReturnLattice {
    pub fn d_gr(&self) -> usize {
        self.gr.presentation.rank
    }

    pub fn a(&self) -> &IntMatrix {
        &self.gr.presentation.endo
    }

    pub fn d_prime(&self) -> Option<usize> {
        self.hyp.as_ref().ok().map(|h| h.hyp.presentation.rank)
    }
}

/// Builds `l`, `K_Λ`, `A` and, when permitted, `K_hyp` and `A′`, with the
/// containment `K_hyp ⊆ K_Λ` checked.
pub fn return_lattice(x: &ApComplex, h: &HomologyAction, perron: &PerronData, tol: f64) -> Result<ReturnLattice> {
    let hom = return_homomorphism(h, x, perron)?;
    let (k_lambda, gr) = k_lambda_and_a(&hom, h)?;
    let hyp = k_hyp_and_aprime(h, perron.field().minpoly(), tol);
    if let Ok(refinement) = &hyp {
        if refinement.k_hyp.iter().any(|v| !hom.eval(v).is_zero()) {
            return Err(Error::Containment);
        }
        // A is a quotient of A'
        let ca = char_poly(&gr.presentation.endo)?;
        if refinement.q.div_exact(&ca).is_none() {
            return Err(Error::Splitting(format!("{ca} does not divide {}", refinement.q)));
        }
    }
    Ok(ReturnLattice { hom, k_lambda, gr, hyp })
}

/// Characteristic polynomial factors of `A` other than `λ`'s minimal polynomial.
pub fn foreign_factors(a: &IntMatrix, lambda_minpoly: &IntPolynomial) -> Result<Vec<IntPolynomial>> {
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    Ok(factor_over_integers(&char_poly(a)?)?
        .into_iter()
        .map(|(f, _)| f)
        .filter(|f| f != lambda_minpoly)
        .collect())
}
