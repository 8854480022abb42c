//! Tilings encoded by a base tile, an exact offset and supertile digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Realizer;
use crate::algebra::AlgebraicNumber;
use crate::complex::Tile;
use crate::error::{Error, Result};
use crate::substitution::{PeriodicSeed, Substitution};

/// The origin lies in edge `base` at distance `offset` from its start;
/// `digits[k - 1] = (e_k, pos_k)` says the level-`k` tile is `e_k` and the
/// level-`(k - 1)` tile is entry `pos_k` of its image.
#[derive(Clone, Debug, PartialEq)]
pub struct TilingPoint {
    pub base: usize,
    pub offset: AlgebraicNumber,
    pub digits: Vec<(usize, usize)>,
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const OFFSET_BITS: u32 = 40;

impl TilingPoint {
    pub fn validate(&self, r: &Realizer) -> Result<()> {
        let n = r.edges.len();
        if self.base >= n {
            return Err(Error::InvalidPoint(format!("edge {} out of range", self.base)));
        }
        let o = self.offset.to_f64();
        if !(0.0..r.edges[self.base].len_f64).contains(&o) {
            return Err(Error::InvalidPoint(format!("offset {o} outside the base tile")));
        }
        let mut below = self.base;
        for (k, &(e, pos)) in self.digits.iter().enumerate() {
            if e >= n || r.edges[e].image.get(pos) != Some(&below) {
                return Err(Error::InvalidPoint(format!("digit at level {} is inconsistent", k + 1)));
            }
            below = e;
        }
        Ok(())
    }

    /// Uniform base edge, dyadic offset fraction, and digits drawn uniformly
    /// among the occurrences of each level's tile.
    pub fn sample(r: &Realizer, depth: usize, rng: &mut impl Rng) -> Self {
        let base = rng.random_range(0..r.edges.len());
        let frac = BigRational::new(BigInt::from(rng.random_range(0..1u64 << OFFSET_BITS)), BigInt::from(1u64 << OFFSET_BITS));
        let offset = r.edges[base].len.scale(&frac);
        let mut digits = Vec::with_capacity(depth);
        let mut below = base;
        for _ in 0..depth {
            let choices = &r.preimages[below];
            let d = choices[rng.random_range(0..choices.len())];
            digits.push(d);
            below = d.0;
        }
        TilingPoint { base, offset, digits }
    }

    /// `Φ(T)`: the origin moves to `λ·offset` inside the image of the base
    /// tile and the old base becomes the first digit.
    pub fn substitute(&self, r: &Realizer) -> Self {
        let (j, rest) = r.locate(self.base, &self.offset);
        let mut digits = Vec::with_capacity(self.digits.len() + 1);
        digits.push((self.base, j));
        digits.extend_from_slice(&self.digits);
        TilingPoint { base: r.edges[self.base].image[j], offset: rest, digits }
    }

    /// `T - v` for `0 ≤ v`: the origin moves forward by `v`, re-expanding
    /// from the first supertile that still contains it.
    pub fn translate(&self, r: &Realizer, v: &AlgebraicNumber) -> Result<Self> {
        // exact offsets and shifts at each level until the shifted point fits
        let mut offset = self.offset.add(v);
        let mut shift = v.clone();
        let mut level = 0;
        let mut edge = self.base;
        let mut own = self.offset.clone();
        while offset.sub(&r.edges[edge].len).to_f64() >= 0.0 {
            let &(up, pos) = self.digits.get(level).ok_or(Error::InsufficientDigits {
                needed: level + 1,
                available: self.digits.len(),
            })?;
            own = r.edges[up].prefix[pos].add(&own).mul(&r.lambda_inv);
            shift = shift.mul(&r.lambda_inv);
            offset = own.add(&shift);
            edge = up;
            level += 1;
        }
        let mut digits = self.digits.clone();
        for k in (0..level).rev() {
            let (j, rest) = r.locate(edge, &offset);
            digits[k] = (edge, j);
            edge = r.edges[edge].image[j];
            offset = rest;
        }
        Ok(TilingPoint { base: edge, offset, digits })
    }

    /// The `Φ^m`-fixed tiling with `left | right` at the origin.
    pub fn periodic(r: &Realizer, s: &Substitution, seed: &PeriodicSeed, depth: usize) -> Result<Self> {
        let m = seed.period;
        let sigma = s.power(m);
        // two letters of the right half
        let mut right = vec![seed.right];
        for _ in 0..s.size() + 2 {
            if right.len() >= 2 {
                break;
            }
            right = sigma.apply(&right);
        }
        if right.len() < 2 {
            return Err(Error::InvalidPoint("right half of the seed does not grow".into()));
        }
        right.truncate(2);
        let mut left = seed.left;
        // tile right of the origin in Φ^i(T), i = 0..m
        let mut tiles = Vec::with_capacity(m);
        for _ in 0..m {
            let tile = if r.collared { Tile::collared(left, right[0], right[1]) } else { Tile::bare(right[0]) };
            let e = r
                .complex
                .edge_for(&tile)
                .ok_or_else(|| Error::InvalidPoint(format!("seed tile {} is not allowed", tile.label(s))))?;
            tiles.push(e);
            left = *s.rule(left).last().expect("rules are nonempty");
            let mut next = s.apply(&right);
            next.truncate(2);
            right = next;
        }
        // level j sits in Φ^{(m - j) mod m}(T) and enters its image at position 0
        let digits = (1..=depth).map(|j| (tiles[(m - j % m) % m], 0)).collect();
        let p = TilingPoint { base: tiles[0], offset: AlgebraicNumber::zero(r.lambda.field()), digits };
        p.validate(r)?;
        Ok(p)
    }
}
