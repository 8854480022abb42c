//! Factorization of integer polynomials into irreducibles over the integers.
//!
//! Square-free parts come from exact gcds. Irreducible factors of a square-free
//! part are found by searching subsets of its numeric roots in increasing
//! degree; a candidate is accepted only after exact division succeeds.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::IntPolynomial;
use super::roots::complex_roots;
use crate::error::{Error, Result};

/// Irreducible factors with multiplicities. The product equals `p` up to sign.
///
/// Integer content is split into prime constants. Polynomial factors are
/// primitive with positive leading coefficient and sorted by degree, then by
/// coefficients.
pub fn factor_over_integers(p: &IntPolynomial) -> Result<Vec<(IntPolynomial, usize)>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (prime, mult) in factor_integer(&p.content().abs()) {
        out.push((IntPolynomial::constant(prime), mult));
    }
    let f = p.primitive_part();
    if f.degree() == Some(0) {
        return Ok(out);
    }

    let g = f.gcd(&f.derivative());
    let squarefree = f
        .div_exact(&g)
        .ok_or_else(|| Error::Internal(format!("gcd {g} does not divide {f}")))?
        .primitive_part();

    let mut factors = split_squarefree(&squarefree)?;
    factors.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs())));

    for h in factors {
        let mut rest = f.clone();
        let mut mult = 0;
        while let Some(q) = rest.div_exact(&h) {
            rest = q;
            mult += 1;
        }
        out.push((h, mult));
    }
    Ok(out)
}

pub fn is_irreducible(p: &IntPolynomial) -> Result<bool> {
    let f = factor_over_integers(p)?;
    Ok(f.len() == 1 && f[0].1 == 1 && f[0].0.degree().unwrap_or(0) > 0)
}

/// Multiplies factors back together, for round-trip checks.
pub fn expand(factors: &[(IntPolynomial, usize)]) -> IntPolynomial {
    factors
        .iter()
        .fold(IntPolynomial::one(), |acc, (f, m)| &acc * &f.pow(*m as u32))
}

fn factor_integer(n: &BigInt) -> Vec<(BigInt, usize)> {
    let mut out = Vec::new();
    let mut n = n.clone();
    if n.is_zero() || n.is_one() {
        return out;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        let mut k = 0;
        while n.is_multiple_of(&d) {
            n /= &d;
            k += 1;
        }
        if k > 0 {
            out.push((d.clone(), k));
        }
        d += 1;
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// A real root or a conjugate pair: the smallest real factor of a root set.
#[derive(Clone, Debug)]
struct RootUnit {
    roots: Vec<Complex64>,
}

impl RootUnit {
    fn degree(&self) -> usize {
        self.roots.len()
    }
}

fn root_units(p: &IntPolynomial) -> Result<Vec<RootUnit>> {
    let roots = complex_roots(p);
    let scale = roots.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let tol = 1e-7 * scale;
    let mut units = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in roots {
        if z.im.abs() <= tol {
            units.push(RootUnit { roots: vec![Complex64::new(z.re, 0.0)] });
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::Internal(format!("unpaired complex roots of {p}")));
    }
    for z in upper {
        let (k, _) = lower
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (**a - z.conj()).norm().total_cmp(&(**b - z.conj()).norm()))
            .expect("paired roots");
        let w = lower.swap_remove(k);
        let mid = (z + w.conj()) * 0.5;
        units.push(RootUnit { roots: vec![mid, mid.conj()] });
    }
    Ok(units)
}

/// Real coefficients of `prod (t - r)`, lowest degree first.
fn real_product(units: &[&RootUnit]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for u in units {
        for r in &u.roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
    }
    c.into_iter().map(|z| z.re).collect()
}

fn round_candidate(real: &[f64], scale: &BigInt) -> Option<IntPolynomial> {
    let s = scale.to_f64()?;
    let mut coeffs = Vec::with_capacity(real.len());
    for &x in real {
        let y = x * s;
        let r = y.round();
        if !r.is_finite() || (y - r).abs() > 1e-4 * (1.0 + y.abs()).sqrt() {
            return None;
        }
        coeffs.push(BigInt::from(r as i128));
    }
    Some(IntPolynomial::new(coeffs))
}

fn split_squarefree(p: &IntPolynomial) -> Result<Vec<IntPolynomial>> {
    let mut remaining = p.clone();
    let mut units = root_units(p)?;
    let mut found = Vec::new();
    let mut d = 1;
    loop {
        let deg = remaining.degree().unwrap_or(0);
        if deg <= 1 || d > deg / 2 {
            if deg >= 1 {
                found.push(remaining.primitive_part());
            }
            return Ok(found);
        }
        match search_degree(&remaining, &units, d) {
            Some((g, used)) => {
                remaining = remaining
                    .div_exact(&g)
                    .ok_or_else(|| Error::Internal("accepted factor stopped dividing".into()))?;
                let mut idx = used;
                idx.sort_unstable_by(|a, b| b.cmp(a));
                for i in idx {
                    units.remove(i);
                }
                found.push(g.primitive_part());
            }
            None => d += 1,
        }
    }
}

/// First subset of units of total degree `d` whose product rounds to an exact
/// integer divisor of `p`.
fn search_degree(p: &IntPolynomial, units: &[RootUnit], d: usize) -> Option<(IntPolynomial, Vec<usize>)> {
    let divisors = positive_divisors(&p.leading());
    let mut chosen = Vec::new();
    search_rec(p, units, d, 0, &mut chosen, &divisors)
}

fn search_rec(
    p: &IntPolynomial,
    units: &[RootUnit],
    left: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    divisors: &[BigInt],
) -> Option<(IntPolynomial, Vec<usize>)> {
    if left == 0 {
        let sel: Vec<&RootUnit> = chosen.iter().map(|&i| &units[i]).collect();
        let real = real_product(&sel);
        // trace filter: c * (sum of roots) must be close to an integer for some divisor c
        let trace: f64 = -real[real.len() - 2];
        for c in divisors {
            let cf = c.to_f64()?;
            let t = trace * cf;
            if (t - t.round()).abs() > 1e-4 * (1.0 + t.abs()).sqrt() {
                continue;
            }
            if let Some(g) = round_candidate(&real, c) {
                if p.div_exact(&g).is_some() {
                    return Some((g, chosen.clone()));
                }
            }
        }
        return None;
    }
    for i in start..units.len() {
        let deg = units[i].degree();
        if deg > left {
            continue;
        }
        chosen.push(i);
        if let Some(hit) = search_rec(p, units, left - deg, i + 1, chosen, divisors) {
            return Some(hit);
        }
        chosen.pop();
    }
    None
}
