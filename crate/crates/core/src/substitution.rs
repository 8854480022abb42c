//! One-dimensional symbolic substitutions.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::matrix::{rational_solve, IntMatrix};
use crate::algebra::{char_poly, complex_roots, factor_over_integers, AlgebraicNumber, NumberField};
use crate::error::{Error, Result};

pub type Word = Vec<usize>;

/// Alphabet plus a rule sending each letter to a nonempty word.
///
/// Letters are stored by index; the alphabet is ordered by the rule lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    letters: Vec<String>,
    rules: Vec<Word>,
}

/// Inflation factor and natural tile lengths.
#[derive(Clone, Debug)]
pub struct PerronData {
    pub lambda: AlgebraicNumber,
    /// Indexed like the alphabet; the first letter has length 1.
    pub lengths: Vec<AlgebraicNumber>,
}

impl PerronData {
    pub fn field(&self) -> &Arc<NumberField> {
        self.lambda.field()
    }

    pub fn lengths_f64(&self) -> Vec<f64> {
        self.lengths.iter().map(AlgebraicNumber::to_f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PeriodicSeed {
    pub period: usize,
    pub left: usize,
    pub right: usize,
}

fn is_letter_token(tok: &str) -> bool {
    let mut chars = tok.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '\'')
}

impl Substitution {
    /// Parses `LETTER -> LETTER LETTER ...` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut heads: Vec<(usize, String, Vec<String>)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 2 || toks[1] != "->" {
                return Err(Error::Parse { line: line_no, message: "expected `LETTER -> LETTER ...`".into() });
            }
            for t in toks.iter().enumerate().filter(|(i, _)| *i != 1).map(|(_, t)| t) {
                if !is_letter_token(t) {
                    return Err(Error::Parse { line: line_no, message: format!("invalid letter `{t}`") });
                }
            }
            let head = toks[0].to_string();
            if heads.iter().any(|(_, h, _)| *h == head) {
                return Err(Error::DuplicateRule { letter: head });
            }
            if toks.len() == 2 {
                return Err(Error::EmptyImage { letter: head });
            }
            heads.push((line_no, head, toks[2..].iter().map(|s| s.to_string()).collect()));
        }
        if heads.is_empty() {
            return Err(Error::Parse { line: 0, message: "no rules".into() });
        }
        let letters: Vec<String> = heads.iter().map(|(_, h, _)| h.clone()).collect();
        let index: HashMap<&str, usize> = letters.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut rules = Vec::with_capacity(letters.len());
        for (_, _, image) in &heads {
            let mut word = Vec::with_capacity(image.len());
            for l in image {
                match index.get(l.as_str()) {
                    Some(&i) => word.push(i),
                    None => return Err(Error::UnknownLetter { letter: l.clone() }),
                }
            }
            rules.push(word);
        }
        Ok(Substitution { letters, rules })
    }

    pub fn from_rules(letters: Vec<String>, rules: Vec<Word>) -> Result<Self> {
        if letters.len() != rules.len() {
            return Err(Error::DimensionMismatch("one rule per letter".into()));
        }
        for (l, r) in letters.iter().zip(&rules) {
            if r.is_empty() {
                return Err(Error::EmptyImage { letter: l.clone() });
            }
            if let Some(&bad) = r.iter().find(|&&x| x >= letters.len()) {
                return Err(Error::UnknownLetter { letter: format!("#{bad}") });
            }
        }
        Ok(Substitution { letters, rules })
    }

    pub fn size(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn letter(&self, i: usize) -> &str {
        &self.letters[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == name)
    }

    pub fn rule(&self, i: usize) -> &[usize] {
        &self.rules[i]
    }

    pub fn rules(&self) -> &[Word] {
        &self.rules
    }

    pub fn word_string(&self, w: &[usize]) -> String {
        w.iter().map(|&i| self.letters[i].as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn apply(&self, w: &[usize]) -> Word {
        w.iter().flat_map(|&x| self.rules[x].iter().copied()).collect()
    }

    /// `self ∘ other`, sending `x` to `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.letters != other.letters {
            return Err(Error::DimensionMismatch("composition needs a shared alphabet".into()));
        }
        let rules = other.rules.iter().map(|w| self.apply(w)).collect();
        Ok(Substitution { letters: self.letters.clone(), rules })
    }

    pub fn power(&self, k: usize) -> Self {
        assert!(k >= 1, "substitution power must be positive");
        let mut out = self.clone();
        for _ in 1..k {
            out.rules = out.rules.iter().map(|w| self.apply(w)).collect();
        }
        out
    }

    /// `M[i][j]` counts letter `i` in `rule(j)`.
    pub fn incidence_matrix(&self) -> IntMatrix {
        let n = self.size();
        let mut m = IntMatrix::zeros(n, n);
        for (j, w) in self.rules.iter().enumerate() {
            for &i in w {
                let v = m.get(i, j) + 1;
                m.set(i, j, v);
            }
        }
        m
    }

    /// Some power `M^k` with `k <= (n-1)^2 + 1` is entrywise positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.size();
        let base: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| self.rules[j].contains(&i)).collect())
            .collect();
        let mut pow = base.clone();
        for _ in 0..(n - 1) * (n - 1) + 1 {
            if pow.iter().all(|r| r.iter().all(|&x| x)) {
                return true;
            }
            pow = (0..n)
                .map(|i| (0..n).map(|j| (0..n).any(|k| pow[i][k] && base[k][j])).collect())
                .collect();
        }
        false
    }

    pub fn require_primitive(&self) -> Result<()> {
        if self.is_primitive() {
            Ok(())
        } else {
            Err(Error::NotPrimitive)
        }
    }

    /// Dominant eigenvalue and left Perron eigenvector, exactly in `Q(lambda)`.
    pub fn perron_data(&self) -> Result<PerronData> {
        self.require_primitive()?;
        let m = self.incidence_matrix();
        let n = self.size();
        let cp = char_poly(&m)?;

        // the irreducible factor carrying the largest real root
        let mut best: Option<(f64, crate::algebra::IntPolynomial)> = None;
        for (g, _) in factor_over_integers(&cp)? {
            if g.degree().unwrap_or(0) == 0 {
                continue;
            }
            let top = complex_roots(&g)
                .into_iter()
                .filter(|z| z.im == 0.0)
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            if best.as_ref().is_none_or(|(r, _)| top > *r) {
                best = Some((top, g));
            }
        }
        let (_, minpoly) = best.ok_or_else(|| Error::Internal("no real eigenvalue".into()))?;
        let field = Arc::new(NumberField::new(minpoly, 0)?);
        let d = field.degree();
        let lambda = AlgebraicNumber::generator(&field);
        let lmat = lambda.multiplication_matrix();

        // unknowns w[y][c]; equation (x, c): sum_y M[y][x] w[y][c] - (lambda w[x])_c = 0
        let nd = n * d;
        let mut sys: Vec<Vec<BigRational>> = Vec::with_capacity(nd + d);
        for x in 0..n {
            for c in 0..d {
                let mut row = vec![BigRational::zero(); nd];
                for y in 0..n {
                    row[y * d + c] += BigRational::from_integer(m.get(y, x).clone());
                }
                for k in 0..d {
                    row[x * d + k] -= &lmat[c][k];
                }
                sys.push(row);
            }
        }
        let mut rhs = vec![BigRational::zero(); nd];
        for c in 0..d {
            let mut row = vec![BigRational::zero(); nd];
            row[c] = BigRational::one();
            sys.push(row);
            rhs.push(if c == 0 { BigRational::one() } else { BigRational::zero() });
        }
        let w = rational_solve(&sys, &rhs)
            .ok_or_else(|| Error::Internal("Perron eigen-system is inconsistent".into()))?;
        let lengths: Vec<AlgebraicNumber> = (0..n)
            .map(|x| AlgebraicNumber::new(field.clone(), w[x * d..(x + 1) * d].to_vec()))
            .collect::<Result<_>>()?;

        for (x, lx) in lengths.iter().enumerate() {
            if lx.to_f64() <= 0.0 {
                return Err(Error::Internal(format!("non-positive length for `{}`", self.letters[x])));
            }
            let sum = self.rules[x]
                .iter()
                .fold(AlgebraicNumber::zero(&field), |acc, &y| acc.add(&lengths[y]));
            if sum != lambda.mul(lx) {
                return Err(Error::Internal(format!("Perron identity fails for `{}`", self.letters[x])));
            }
        }
        Ok(PerronData { lambda, lengths })
    }

    /// Allowed words of length `1..=max_len`.
    ///
    /// Starts from the letters and closes under "factors of the image", which
    /// stabilizes because a window of length `L` in `rule(w)` lies inside the
    /// image of at most `L` consecutive letters of `w`.
    pub fn language(&self, max_len: usize) -> Result<Language> {
        self.require_primitive()?;
        let mut words: HashSet<Word> = (0..self.size()).map(|x| vec![x]).collect();
        let mut queue: Vec<Word> = words.iter().cloned().collect();
        while let Some(w) = queue.pop() {
            let image = self.apply(&w);
            for len in 1..=max_len.min(image.len()) {
                for start in 0..=image.len() - len {
                    let f = image[start..start + len].to_vec();
                    if words.insert(f.clone()) {
                        queue.push(f);
                    }
                }
            }
        }
        Ok(Language { max_len, words: words.into_iter().collect() })
    }

    /// Pairs `(l, r)` with `rule^m(r)` starting with `r`, `rule^m(l)` ending with
    /// `l`, and `l r` allowed.
    pub fn periodic_seeds(&self, m: usize) -> Result<Vec<PeriodicSeed>> {
        let lang = self.language(2)?;
        let pm = self.power(m);
        let rights: Vec<usize> = (0..self.size()).filter(|&r| pm.rules[r][0] == r).collect();
        let lefts: Vec<usize> = (0..self.size()).filter(|&l| *pm.rules[l].last().unwrap() == l).collect();
        let mut out = Vec::new();
        for &left in &lefts {
            for &right in &rights {
                if lang.contains(&[left, right]) {
                    out.push(PeriodicSeed { period: m, left, right });
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.rules.iter().enumerate() {
            writeln!(f, "{} -> {}", self.letters[i], self.word_string(w))?;
        }
        Ok(())
    }
}

/// Allowed words up to a fixed length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    pub max_len: usize,
    pub words: BTreeSet<Word>,
}

impl Language {
    pub fn contains(&self, w: &[usize]) -> bool {
        self.words.contains(w)
    }

    pub fn of_length(&self, len: usize) -> impl Iterator<Item = &Word> {
        self.words.iter().filter(move |w| w.len() == len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::IntPolynomial;
    use proptest::prelude::*;

    fn fib() -> Substitution {
        Substitution::parse("a -> a b\nb -> a").unwrap()
    }

    fn names(s: &Substitution, words: impl Iterator<Item = Word>) -> BTreeSet<String> {
        words.map(|w| w.iter().map(|&i| s.letter(i)).collect::<String>()).collect()
    }

    #[test]
    fn parse_and_validate() {
        let s = fib();
        assert_eq!(s.letters(), ["a", "b"]);
        let e = Substitution::parse("a -> a b'\nb -> a\na' -> a' b\nb' -> a'").unwrap();
        assert_eq!(e.letters(), ["a", "b", "a'", "b'"]);
        assert_eq!(e.rule(0), [0, 3]);

        assert_eq!(Substitution::parse("a -> b c\nb -> a"), Err(Error::UnknownLetter { letter: "c".into() }));
        assert_eq!(Substitution::parse("a ->\nb -> a"), Err(Error::EmptyImage { letter: "a".into() }));
        assert_eq!(
            Substitution::parse("a -> a b\nb -> a\na -> b"),
            Err(Error::DuplicateRule { letter: "a".into() })
        );
        assert!(matches!(Substitution::parse("a => b"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Substitution::parse("# c\na -> 1b"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn incidence_examples() {
        assert_eq!(fib().incidence_matrix(), IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]));
        let f = Substitution::parse("1 -> 1 2 2 2 1 1 1 1\n2 -> 2 1 1 1 2").unwrap_err();
        // digits are not letters in this input format
        assert!(matches!(f, Error::Parse { .. }));
        let s = Substitution::parse("x1 -> x1 x2 x2 x2 x1 x1 x1 x1\nx2 -> x2 x1 x1 x1 x2").unwrap();
        assert_eq!(s.incidence_matrix(), IntMatrix::from_rows(&[vec![5, 3], vec![3, 2]]));
        let e = Substitution::parse("a -> a b a'\nb -> a b\na' -> a' b' a\nb' -> a' b'").unwrap();
        // columns count letters in each image, by hand
        assert_eq!(
            e.incidence_matrix(),
            IntMatrix::from_rows(&[vec![1, 1, 1, 0], vec![1, 1, 0, 0], vec![1, 0, 1, 1], vec![0, 0, 1, 1]])
        );
    }

    #[test]
    fn primitivity() {
        assert!(fib().is_primitive());
        assert!(!Substitution::parse("a -> a b\nb -> b").unwrap().is_primitive());
        assert!(Substitution::parse("a -> a b'\nb -> a\na' -> a' b\nb' -> a'").unwrap().is_primitive());
    }

    #[test]
    fn perron_fibonacci() {
        let p = fib().perron_data().unwrap();
        assert_eq!(p.field().minpoly(), &IntPolynomial::from_i64(&[-1, -1, 1]));
        let one = AlgebraicNumber::one(p.field());
        assert_eq!(p.lengths[0], one);
        assert_eq!(p.lengths[1], p.lambda.sub(&one));
    }

    #[test]
    fn perron_final_example_and_rational() {
        let s = Substitution::parse("x1 -> x1 x2 x2 x2 x1 x1 x1 x1\nx2 -> x2 x1 x1 x1 x2").unwrap();
        let p = s.perron_data().unwrap();
        assert_eq!(p.field().minpoly(), &IntPolynomial::from_i64(&[1, -7, 1]));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.lambda.to_f64() - phi.powi(4)).abs() < 1e-12);

        let s = Substitution::parse("a -> a b\nb -> a b").unwrap();
        let p = s.perron_data().unwrap();
        assert_eq!(p.field().minpoly(), &IntPolynomial::from_i64(&[-2, 1]));
        assert_eq!(p.lengths[1], AlgebraicNumber::one(p.field()));
    }

    #[test]
    fn language_examples() {
        let s = fib();
        let l = s.language(2).unwrap();
        let got = names(&s, l.words.iter().cloned());
        let want: BTreeSet<String> = ["a", "b", "aa", "ab", "ba"].iter().map(|x| x.to_string()).collect();
        assert_eq!(got, want);

        let f = Substitution::parse("x -> x y y y x x x x\ny -> y x x x y").unwrap();
        assert_eq!(f.language(2).unwrap().of_length(2).count(), 4);
        assert_eq!(f.language(1).unwrap().words.len(), 2);
    }

    #[test]
    fn fibonacci_seeds() {
        let s = fib();
        let seeds = s.periodic_seeds(2).unwrap();
        assert_eq!(
            seeds,
            vec![PeriodicSeed { period: 2, left: 0, right: 0 }, PeriodicSeed { period: 2, left: 1, right: 0 }]
        );
        // rule(a) = ab and rule(b) = a: no letter is a suffix of its own image
        assert!(s.periodic_seeds(1).unwrap().is_empty());
    }

    #[test]
    fn seeds_converge() {
        let s = Substitution::parse("a -> a b a'\nb -> a b\na' -> a' b' a\nb' -> a' b'").unwrap();
        for m in 1..=3 {
            for seed in s.periodic_seeds(m).unwrap() {
                let pm = s.power(m);
                let (mut l, mut r) = (vec![seed.left], vec![seed.right]);
                for _ in 0..4 {
                    let (nl, nr) = (pm.apply(&l), pm.apply(&r));
                    assert!(nl.ends_with(&l) && nr.starts_with(&r));
                    (l, r) = (nl, nr);
                }
            }
        }
    }

    fn random_substitution() -> impl Strategy<Value = Substitution> {
        (2usize..4).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(0..n, 1..4), n).prop_map(move |rules| {
                let letters = (0..n).map(|i| format!("c{i}")).collect();
                Substitution::from_rules(letters, rules).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn incidence_is_multiplicative(s in random_substitution()) {
            let ss = s.compose(&s).unwrap();
            let m = s.incidence_matrix();
            prop_assert_eq!(ss.incidence_matrix(), &m * &m);
        }

        #[test]
        fn language_is_factor_closed(s in random_substitution()) {
            prop_assume!(s.is_primitive());
            let l3 = s.language(3).unwrap();
            let l4 = s.language(4).unwrap();
            for w in &l3.words {
                prop_assert!(l4.contains(w));
            }
            for w in l4.of_length(4) {
                prop_assert!(l3.contains(&w[1..]) && l3.contains(&w[..3]));
            }
        }

        #[test]
        fn perron_identity(s in random_substitution()) {
            prop_assume!(s.is_primitive());
            let p = s.perron_data().unwrap();
            for x in 0..s.size() {
                let sum = s.rule(x).iter().fold(AlgebraicNumber::zero(p.field()), |a, &y| a.add(&p.lengths[y]));
                prop_assert_eq!(sum, p.lambda.mul(&p.lengths[x]));
            }
        }
    }
}
