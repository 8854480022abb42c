//! The realization map `G: Ω → T^D` evaluated through the shadowing series.

mod points;
mod splitting;
mod torus;

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

pub use points::TilingPoint;

/// Seeded generator used for all sampling.
pub fn sampler(seed: u64) -> rand_chacha::ChaCha8Rng {
    points::rng(seed)
}
pub use splitting::HyperbolicSplitting;
pub use torus::{apply_f, fixed_point_count, fixed_point_spacing, fixed_points_torus, snap_to_fixed_point, ToralPoint};

use crate::algebra::{AlgebraicNumber, IntMatrix, Quotient};
use crate::complex::{ApComplex, EdgeMap, HomologyAction, Tile};
use crate::error::{Error, Result};
use crate::return_lattice::ReturnLattice;
use crate::substitution::{PerronData, Substitution};

/// Which kernel of `H_1` the torus is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kernel {
    Lambda,
    Hyp,
}

/// Integer edge weights realizing the dual basis of `Hom(H_1 / K, Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleBasis {
    /// `weights[e][i]`; zero on spanning-tree edges.
    pub weights: Vec<Vec<BigInt>>,
    pub d: usize,
}

impl CocycleBasis {
    /// `Σ z_e w(e)`.
    pub fn evaluate(&self, z: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.d];
        for (c, w) in z.iter().zip(&self.weights) {
            for (o, wi) in out.iter_mut().zip(w) {
                *o += c * wi;
            }
        }
        out
    }
}

fn quotient_for(lat: &ReturnLattice, which: Kernel) -> Result<&Quotient> {
    match which {
        Kernel::Lambda => Ok(&lat.gr),
        Kernel::Hyp => lat.hyp.as_ref().map(|h| &h.hyp).map_err(Clone::clone),
    }
}

pub fn cocycle_basis(lat: &ReturnLattice, x: &ApComplex, h: &HomologyAction, which: Kernel) -> Result<CocycleBasis> {
    let q = quotient_for(lat, which)?;
    let d = q.presentation.rank;
    if q.projection.cols() != h.rank() {
        return Err(Error::DimensionMismatch("projection does not match H_1".into()));
    }
    let mut weights = vec![vec![BigInt::zero(); d]; x.edges.len()];
    for (j, &e) in h.nontree.iter().enumerate() {
        weights[e] = q.projection.column(j);
    }
    Ok(CocycleBasis { weights, d })
}

#[derive(Clone, Debug)]
struct EdgeData {
    src: usize,
    len: AlgebraicNumber,
    len_f64: f64,
    weight: DVector<f64>,
    image: Vec<usize>,
    prefix: Vec<AlgebraicNumber>,
    prefix_f64: Vec<f64>,
    prefix_weight: Vec<DVector<f64>>,
}

/// Value of the realization at one point.
#[derive(Clone, Debug, Serialize)]
pub struct Realized {
    pub point: ToralPoint,
    pub error_bound: f64,
    pub max_b: f64,
}

/// Forward increments `b_0..b_{N-1}` and backward ones `b_{-1}..b_{-N}`.
pub type Increments = (Vec<DVector<f64>>, Vec<DVector<f64>>);

/// Everything needed to evaluate `G` on tiling points of one complex.
#[derive(Clone, Debug)]
pub struct Realizer {
    pub which: Kernel,
    pub cocycles: CocycleBasis,
    pub split: HyperbolicSplitting,
    /// `L`: quotient basis vector `i ↦` its return length.
    pub l_functional: Vec<f64>,
    pub b_digits: f64,
    pub collared: bool,
    lambda: AlgebraicNumber,
    lambda_inv: AlgebraicNumber,
    lambda_f64: f64,
    edges: Vec<EdgeData>,
    vertex_potential: Vec<DVector<f64>>,
    preimages: Vec<Vec<(usize, usize)>>,
    tiles: Vec<Tile>,
    complex: ApComplex,
}

fn bigint_vec_f64(v: &[BigInt]) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)))
}

impl Realizer {
    pub fn new(
        x: &ApComplex,
        f: &EdgeMap,
        h: &HomologyAction,
        lat: &ReturnLattice,
        perron: &PerronData,
        which: Kernel,
        tol: f64,
    ) -> Result<Self> {
        let q = quotient_for(lat, which)?;
        let cocycles = cocycle_basis(lat, x, h, which)?;
        let d = cocycles.d;
        if d == 0 {
            return Err(Error::DimensionMismatch("the quotient has rank 0".into()));
        }
        let split = HyperbolicSplitting::new(&q.presentation.endo, tol)?;
        let lambda = perron.lambda.clone();
        let lambda_inv = lambda.inverse()?;
        let lambda_f64 = lambda.to_f64();

        let weights: Vec<DVector<f64>> = cocycles.weights.iter().map(|w| bigint_vec_f64(w)).collect();
        let mut edges = Vec::with_capacity(x.edges.len());
        for (e, edge) in x.edges.iter().enumerate() {
            let image = f.images[e].clone();
            let mut prefix = Vec::with_capacity(image.len());
            let mut prefix_weight = Vec::with_capacity(image.len());
            let mut acc = AlgebraicNumber::zero(perron.field());
            let mut wacc = DVector::zeros(d);
            for &i in &image {
                prefix.push(acc.clone());
                prefix_weight.push(wacc.clone());
                acc = acc.add(&x.edges[i].length);
                wacc += &weights[i];
            }
            edges.push(EdgeData {
                src: edge.src,
                len: edge.length.clone(),
                len_f64: edge.length.to_f64(),
                weight: weights[e].clone(),
                prefix_f64: prefix.iter().map(AlgebraicNumber::to_f64).collect(),
                prefix,
                prefix_weight,
                image,
            });
        }

        // Φ(v): weight of the image of the tree path from the base vertex to v
        let tree = crate::complex::spanning_tree(x)?;
        let paths = tree.root_paths(x);
        let image_weight: Vec<DVector<f64>> = edges
            .iter()
            .map(|ed| ed.image.iter().fold(DVector::zeros(d), |acc, &i| acc + &weights[i]))
            .collect();
        let vertex_potential: Vec<DVector<f64>> = paths
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&image_weight)
                    .fold(DVector::zeros(d), |acc, (c, w)| acc + w * c.to_f64().unwrap_or(f64::NAN))
            })
            .collect();

        let mut preimages = vec![Vec::new(); x.edges.len()];
        for (e, ed) in edges.iter().enumerate() {
            for (pos, &i) in ed.image.iter().enumerate() {
                preimages[i].push((e, pos));
            }
        }

        let l_functional: Vec<f64> = (0..d).map(|i| lat.hom.eval(&q.lift.column(i)).to_f64()).collect();

        let mut r = Realizer {
            which,
            cocycles,
            split,
            l_functional,
            b_digits: 0.0,
            collared: x.collared,
            lambda,
            lambda_inv,
            lambda_f64,
            edges,
            vertex_potential,
            preimages,
            tiles: x.edges.iter().map(|e| e.tile).collect(),
            complex: x.clone(),
        };
        r.b_digits = r.digit_bound();
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.cocycles.d
    }

    pub fn a(&self) -> &IntMatrix {
        &self.split.a
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn complex(&self) -> &ApComplex {
        &self.complex
    }

    pub fn error_bound(&self, depth: usize) -> f64 {
        self.split.error_bound(depth, self.b_digits)
    }

    /// `b` at the point of edge `e` lying in image edge `j` at fraction `tp`.
    fn b_value(&self, e: usize, j: usize, tp: f64) -> DVector<f64> {
        let ed = &self.edges[e];
        let target = &self.edges[ed.image[j]];
        let t = (ed.prefix_f64[j] + tp * target.len_f64) / (self.lambda_f64 * ed.len_f64);
        &self.vertex_potential[ed.src] + &ed.prefix_weight[j] + &target.weight * tp
            - &self.split.a_f64 * (&ed.weight * t)
    }

    /// Max of `‖b‖` over the finite digit alphabet; `b` is affine on each piece.
    fn digit_bound(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (e, ed) in self.edges.iter().enumerate() {
            for j in 0..ed.image.len() {
                best = best.max(self.b_value(e, j, 0.0).norm()).max(self.b_value(e, j, 1.0).norm());
            }
        }
        best
    }

    /// Lifted value at the base point, with its canonical lift.
    fn y0(&self, p: &TilingPoint) -> DVector<f64> {
        let ed = &self.edges[p.base];
        &ed.weight * (p.offset.to_f64() / ed.len_f64)
    }

    /// Image edge index and remaining exact offset for `λ·offset` inside `image(e)`.
    fn locate(&self, e: usize, offset: &AlgebraicNumber) -> (usize, AlgebraicNumber) {
        let ed = &self.edges[e];
        let scaled = self.lambda.mul(offset);
        let mut j = 0;
        for k in (0..ed.image.len()).rev() {
            if scaled.sub(&ed.prefix[k]).to_f64() >= 0.0 {
                j = k;
                break;
            }
        }
        let rest = scaled.sub(&ed.prefix[j]);
        (j, rest)
    }

    /// `b_k` for `k = 0..n` along the forward orbit, exact in position.
    fn forward_bs(&self, p: &TilingPoint, n: usize) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(n);
        let (mut e, mut o) = (p.base, p.offset.clone());
        for _ in 0..n {
            let (j, rest) = self.locate(e, &o);
            let next = self.edges[e].image[j];
            let tp = (rest.to_f64() / self.edges[next].len_f64).clamp(0.0, 1.0);
            out.push(self.b_value(e, j, tp));
            e = next;
            o = rest;
        }
        out
    }

    /// `b_{-j}` for `j = 1..n` from the digits.
    fn backward_bs(&self, p: &TilingPoint, n: usize) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(n);
        let mut below = (p.base, p.offset.to_f64());
        for &(e, pos) in p.digits.iter().take(n) {
            let ed = &self.edges[e];
            let tp = below.1 / self.edges[below.0].len_f64;
            out.push(self.b_value(e, pos, tp));
            below = (e, (ed.prefix_f64[pos] + below.1) / self.lambda_f64);
        }
        out
    }

    fn check_bound(&self, bs: &[DVector<f64>]) -> Result<f64> {
        let mut max_b: f64 = 0.0;
        let limit = self.b_digits * (1.0 + 1e-9) + 1e-12;
        for b in bs {
            let norm = b.norm();
            if !norm.is_finite() {
                return Err(Error::Divergence(norm));
            }
            if norm > limit {
                return Err(Error::DigitBound { norm, bound: self.b_digits });
            }
            max_b = max_b.max(norm);
        }
        Ok(max_b)
    }

    /// `y_k` with `y_{k+1} = A y_k + b_k`; negative `k` uses the digits.
    pub fn lifted_value(&self, p: &TilingPoint, k: i64) -> Result<DVector<f64>> {
        let mut y = self.y0(p);
        if k >= 0 {
            for b in self.forward_bs(p, k as usize) {
                y = &self.split.a_f64 * y + b;
            }
        } else {
            let n = k.unsigned_abs() as usize;
            if n > p.digits.len() {
                return Err(Error::InsufficientDigits { needed: n, available: p.digits.len() });
            }
            for b in self.backward_bs(p, n) {
                y = &self.split.a_inv_f64 * (y - b);
            }
        }
        Ok(y)
    }

    /// `b_k = y_{k+1} - A y_k` for `k` in `-depth..depth`, checked against the digit bound.
    pub fn increments(&self, p: &TilingPoint, depth: usize) -> Result<Increments> {
        if p.digits.len() < depth {
            return Err(Error::InsufficientDigits { needed: depth, available: p.digits.len() });
        }
        let fwd = self.forward_bs(p, depth);
        let bwd = self.backward_bs(p, depth);
        self.check_bound(&fwd)?;
        self.check_bound(&bwd)?;
        Ok((fwd, bwd))
    }

    /// Unreduced `z^u + z^s` with both series truncated at `depth` terms.
    pub fn realize_raw(&self, p: &TilingPoint, depth: usize) -> Result<(DVector<f64>, f64)> {
        let (fwd, bwd) = self.increments(p, depth)?;
        let max_b = self.check_bound(&fwd)?.max(self.check_bound(&bwd)?);
        let y0 = self.y0(p);
        let d = self.dim();

        // Σ_{k=1..N} A^{-k} b_{k-1}^u by Horner, re-projecting each step
        let mut su = DVector::zeros(d);
        for b in fwd.iter().rev() {
            su = self.split.step_unstable(&(su + b));
        }
        // Σ_{j=1..N} A^{j-1} b_{-j}^s
        let mut ss = DVector::zeros(d);
        for b in bwd.iter().rev() {
            ss = &self.split.p_s * b + self.split.step_stable(&ss);
        }
        let z = &y0 + su - ss;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence(f64::NAN));
        }
        Ok((z, max_b))
    }

    pub fn realize(&self, p: &TilingPoint, depth: usize) -> Result<Realized> {
        let (z, max_b) = self.realize_raw(p, depth)?;
        Ok(Realized { point: ToralPoint::new(z.iter().copied()), error_bound: self.error_bound(depth), max_b })
    }

    /// Torus distance between `G(Φ T)` and `F_A G(T)`.
    pub fn semiconjugacy_residual(&self, p: &TilingPoint, depth: usize) -> Result<f64> {
        let g = self.realize(p, depth)?.point;
        let gphi = self.realize(&p.substitute(self), depth)?.point;
        Ok(gphi.distance(&apply_f(self.a(), &g)))
    }

    /// `ι(v) = -(L|E^u)^{-1} v`; needs a one-dimensional unstable space.
    pub fn iota(&self, v: f64) -> Result<DVector<f64>> {
        if self.split.unstable_dim() != 1 {
            return Err(Error::HypothesisNotMet(format!(
                "unstable space has dimension {}",
                self.split.unstable_dim()
            )));
        }
        let u = self.split.basis_u.column(0).into_owned();
        let lu: f64 = self.l_functional.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
        if lu.abs() < 1e-12 {
            return Err(Error::Splitting("L vanishes on E^u".into()));
        }
        Ok(-u * (v / lu))
    }

    pub fn tile_label(&self, e: usize, s: &Substitution) -> String {
        self.tiles[e].label(s)
    }
}

/// Result of comparing `G(T - v)` with `G(T) - ι(v)` over samples.
#[derive(Clone, Debug, Serialize)]
pub struct IotaReport {
    pub samples: usize,
    pub shift: f64,
    pub max_deviation: f64,
    pub max_deviation_opposite_sign: f64,
}

/// Checks `G(T - v) = G(T) - ι(v)` on sampled points, `v` half the shortest tile.
pub fn iota_and_translation_check(
    r: &Realizer,
    lat: &ReturnLattice,
    pisot_family: bool,
    d_lambda: usize,
    samples: usize,
    depth: usize,
    seed: u64,
) -> Result<IotaReport> {
    if r.which != Kernel::Lambda || !pisot_family || lat.d_gr() != d_lambda {
        return Err(Error::HypothesisNotMet(format!(
            "needs a Pisot family with D(GR) = D(Λ); got D(GR) = {}, D(Λ) = {d_lambda}",
            lat.d_gr()
        )));
    }
    let shortest = r
        .edges
        .iter()
        .min_by(|a, b| a.len_f64.total_cmp(&b.len_f64))
        .map(|e| e.len.clone())
        .ok_or_else(|| Error::Internal("complex has no edges".into()))?;
    let v = shortest.scale(&BigRational::new(1.into(), 2.into()));
    let vf = v.to_f64();
    let iota = r.iota(vf)?;
    let mut rng = points::rng(seed);
    let mut worst: f64 = 0.0;
    let mut worst_flip: f64 = 0.0;
    for _ in 0..samples {
        let p = TilingPoint::sample(r, depth + 8, &mut rng);
        let q = p.translate(r, &v)?;
        let g = r.realize_raw(&p, depth)?.0;
        let gv = r.realize_raw(&q, depth)?.0;
        let expect = ToralPoint::new((&g - &iota).iter().copied());
        let flipped = ToralPoint::new((&g + &iota).iter().copied());
        let got = ToralPoint::new(gv.iter().copied());
        worst = worst.max(got.distance(&expect));
        worst_flip = worst_flip.max(got.distance(&flipped));
    }
    Ok(IotaReport { samples, shift: vf, max_deviation: worst, max_deviation_opposite_sign: worst_flip })
}

/// Grouping of `Φ^m`-periodic tilings by their exact image on the torus.
#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub period: usize,
    pub seeds: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Snapped exact points, as `"p/q"` strings.
    pub snapped: Vec<Vec<String>>,
    pub snap_distance: Vec<f64>,
    pub snap_radius: f64,
    pub groups: Vec<Vec<usize>>,
    pub fixed_point_count: String,
    pub asymptotic_pairs_agree: bool,
    /// Periodic points are measure zero; this is a diagnostic, not the a.e. fiber size.
    pub diagnostic: bool,
}

impl FiberReport {
    pub fn max_group(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn periodic_fibers(r: &Realizer, s: &Substitution, m: usize, depth: usize) -> Result<FiberReport> {
    let seeds = s.periodic_seeds(m)?;
    if seeds.is_empty() {
        return Err(Error::HypothesisNotMet(format!("no period-{m} seeds")));
    }
    let radius = 100.0 * r.error_bound(depth);
    let mut values = Vec::new();
    let mut snapped = Vec::new();
    let mut dists = Vec::new();
    for seed in &seeds {
        let p = TilingPoint::periodic(r, s, seed, depth)?;
        let g = r.realize(&p, depth)?.point;
        let (exact, dist) = snap_to_fixed_point(r.a(), m, &g)?;
        if dist > radius {
            return Err(Error::SnapFailure(dist));
        }
        values.push(g.coords);
        snapped.push(exact);
        dists.push(dist);
    }
    let mut by_point: BTreeMap<Vec<BigRational>, Vec<usize>> = BTreeMap::new();
    for (i, x) in snapped.iter().enumerate() {
        by_point.entry(x.clone()).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = by_point.into_values().collect();
    groups.sort();
    let agree = seeds
        .iter()
        .enumerate()
        .all(|(i, a)| seeds.iter().enumerate().all(|(j, b)| a.right != b.right || snapped[i] == snapped[j]));
    Ok(FiberReport {
        period: m,
        seeds: seeds.iter().map(|sd| format!("{}.{}", s.letter(sd.left), s.letter(sd.right))).collect(),
        values,
        snapped: snapped.iter().map(|x| x.iter().map(ToString::to_string).collect()).collect(),
        snap_distance: dists,
        snap_radius: radius,
        groups,
        fixed_point_count: fixed_point_count(r.a(), m)?.to_string(),
        asymptotic_pairs_agree: agree,
        diagnostic: true,
    })
}

/// Smallest period in `1..=max_m` that has seeds.
pub fn first_period_with_seeds(s: &Substitution, max_m: usize) -> Result<Option<usize>> {
    for m in 1..=max_m {
        if !s.periodic_seeds(m)?.is_empty() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_ap_complex, homology_with_action};
    use crate::return_lattice::return_lattice;
    use num_traits::Signed;

    pub(super) const FIB: &str = "a -> a b\nb -> a";
    pub(super) const EX28: &str = "a -> a b'\nb -> a\na' -> a' b\nb' -> a'";
    pub(super) const EX29: &str = "a -> a b a'\nb -> a b\na' -> a' b' a\nb' -> a' b'";

    fn setup(text: &str, which: Kernel) -> (Substitution, ReturnLattice, Realizer) {
        let s = Substitution::parse(text).unwrap();
        let p = s.perron_data().unwrap();
        let (x, f) = build_ap_complex(&s, &p, true).unwrap();
        let h = homology_with_action(&x, &f).unwrap();
        let lat = return_lattice(&x, &h, &p, 1e-9).unwrap();
        let r = Realizer::new(&x, &f, &h, &lat, &p, which, 1e-9).unwrap();
        (s, lat, r)
    }

    fn sample_points(r: &Realizer, n: usize, depth: usize, seed: u64) -> Vec<TilingPoint> {
        let mut g = points::rng(seed);
        (0..n).map(|_| TilingPoint::sample(r, depth, &mut g)).collect()
    }

    #[test]
    fn wedge_cocycles_are_indicators() {
        let s = Substitution::parse(FIB).unwrap();
        let p = s.perron_data().unwrap();
        let (x, f) = build_ap_complex(&s, &p, false).unwrap();
        let h = homology_with_action(&x, &f).unwrap();
        let lat = return_lattice(&x, &h, &p, 1e-9).unwrap();
        let cb = cocycle_basis(&lat, &x, &h, Kernel::Lambda).unwrap();
        let w: Vec<Vec<i64>> = cb.weights.iter().map(|v| v.iter().map(|b| b.to_i64().unwrap()).collect()).collect();
        let proj = lat.gr.projection.to_i64_rows().unwrap();
        // no tree edges: weights are the projection columns of the two loops
        assert_eq!(w, vec![vec![proj[0][0], proj[1][0]], vec![proj[0][1], proj[1][1]]]);
        assert_eq!(lat.gr.projection.det().unwrap().abs(), BigInt::from(1));
    }

    #[test]
    fn cocycles_annihilate_kernel_and_sum_integrally() {
        let s = Substitution::parse(EX28).unwrap();
        let p = s.perron_data().unwrap();
        let (x, f) = build_ap_complex(&s, &p, true).unwrap();
        let h = homology_with_action(&x, &f).unwrap();
        let lat = return_lattice(&x, &h, &p, 1e-9).unwrap();
        let cb = cocycle_basis(&lat, &x, &h, Kernel::Lambda).unwrap();
        assert_eq!(cb.d, 2);
        for k in &lat.k_lambda {
            assert!(cb.evaluate(&h.cycle_of(k)).iter().all(Zero::is_zero));
        }
        let mut g = points::rng(11);
        for _ in 0..20 {
            let coords: Vec<BigInt> = (0..h.rank()).map(|_| BigInt::from(rand::Rng::random_range(&mut g, -5i64..6))).collect();
            assert_eq!(cb.evaluate(&h.cycle_of(&coords)), lat.gr.projection.mul_vec(&coords));
        }
    }

    #[test]
    fn base_vertex_has_zero_lift_and_hand_traced_increment() {
        let (s, lat, r) = setup(FIB, Kernel::Lambda);
        let seed = s.periodic_seeds(2).unwrap().into_iter().find(|sd| s.letter(sd.left) == "b").unwrap();
        let p = TilingPoint::periodic(&r, &s, &seed, 20).unwrap();
        assert!(r.lifted_value(&p, 0).unwrap().iter().all(|v| *v == 0.0));
        // the origin is a vertex, so b_0 is the weight of the image of the tree path to it
        let x = r.complex();
        let tree = crate::complex::spanning_tree(x).unwrap();
        let path = &tree.root_paths(x)[x.edges[p.base].src];
        let count = build_ap_complex(&s, &s.perron_data().unwrap(), true).unwrap().1.count_matrix();
        let expect = r.cocycles.evaluate(&count.mul_vec(path));
        let b0 = r.lifted_value(&p, 1).unwrap() - &r.split.a_f64 * r.lifted_value(&p, 0).unwrap();
        for (got, want) in b0.iter().zip(&expect) {
            assert!((got - want.to_f64().unwrap()).abs() < 1e-12);
        }
        assert_eq!(lat.d_gr(), 2);
        assert!(matches!(r.lifted_value(&p, -21), Err(Error::InsufficientDigits { .. })));
    }

    #[test]
    fn truncation_is_cauchy() {
        for text in [FIB, EX28] {
            let (_, _, r) = setup(text, Kernel::Lambda);
            for p in sample_points(&r, 10, 70, 4) {
                let a = r.realize(&p, 30).unwrap();
                let b = r.realize(&p, 40).unwrap();
                assert!(a.point.distance(&b.point) <= a.error_bound);
            }
        }
    }

    #[test]
    fn semiconjugacy_on_samples() {
        for (text, which) in [(FIB, Kernel::Lambda), (EX28, Kernel::Lambda), (EX29, Kernel::Lambda), (EX29, Kernel::Hyp)] {
            let (_, _, r) = setup(text, which);
            assert!(r.error_bound(50) <= 1e-8);
            for p in sample_points(&r, 10, 55, 9) {
                assert!(r.semiconjugacy_residual(&p, 50).unwrap() <= 2.0 * r.error_bound(50), "{text}");
            }
        }
    }

    #[test]
    fn hyp_realization_has_rank_four_on_example_2_9() {
        let (_, lat, r) = setup(EX29, Kernel::Hyp);
        assert_eq!((r.dim(), lat.d_gr()), (4, 2));
    }

    #[test]
    fn translation_cocycle() {
        let (_, lat, r) = setup(FIB, Kernel::Lambda);
        let rep = iota_and_translation_check(&r, &lat, true, 2, 10, 50, 3).unwrap();
        assert!(rep.max_deviation <= 1e-6);
        assert!(rep.max_deviation_opposite_sign > 1e-3);
        assert!(iota_and_translation_check(&r, &lat, false, 2, 1, 50, 3).is_err());
        assert!(iota_and_translation_check(&r, &lat, true, 3, 1, 50, 3).is_err());
    }

    #[test]
    fn return_vector_translation_is_a_lattice_shift() {
        let (_, lat, r) = setup(FIB, Kernel::Lambda);
        let v = lat.hom.values.iter().find(|v| v.to_f64() > 0.0).unwrap().clone();
        let iota = r.iota(v.to_f64()).unwrap();
        for p in sample_points(&r, 5, 70, 8) {
            let q = p.translate(&r, &v).unwrap();
            let g = r.realize_raw(&p, 50).unwrap().0;
            let gv = r.realize_raw(&q, 50).unwrap().0;
            let d = ToralPoint::new((&gv - &g + &iota).iter().copied());
            assert!(d.distance(&ToralPoint::zero(2)) <= 1e-6);
        }
    }

    #[test]
    fn fibonacci_fibers() {
        let (s, _, r) = setup(FIB, Kernel::Lambda);
        let rep = periodic_fibers(&r, &s, 2, 50).unwrap();
        assert_eq!(rep.seeds, vec!["a.a", "b.a"]);
        assert_eq!(rep.groups, vec![vec![0, 1]]);
        assert!(rep.asymptotic_pairs_agree);
        assert!(s.periodic_seeds(1).unwrap().is_empty());
        assert_eq!(fixed_point_count(r.a(), 1).unwrap(), BigInt::from(1));
        assert!(matches!(periodic_fibers(&r, &s, 1, 50), Err(Error::HypothesisNotMet(_))));
    }

    #[test]
    fn example_2_8_fibers_collapse() {
        let (s, _, r) = setup(EX28, Kernel::Lambda);
        let m = first_period_with_seeds(&s, 6).unwrap().unwrap();
        let rep = periodic_fibers(&r, &s, m, 50).unwrap();
        assert!(rep.max_group() >= 2);
        assert!(rep.asymptotic_pairs_agree);
        assert!(rep.groups.len() <= rep.seeds.len());
    }

    #[test]
    fn non_unimodular_quotient_is_refused() {
        let s = Substitution::parse("a -> a b\nb -> b a").unwrap();
        let p = s.perron_data().unwrap();
        let (x, f) = build_ap_complex(&s, &p, true).unwrap();
        let h = homology_with_action(&x, &f).unwrap();
        let lat = return_lattice(&x, &h, &p, 1e-9).unwrap();
        assert!(matches!(Realizer::new(&x, &f, &h, &lat, &p, Kernel::Hyp, 1e-9), Err(Error::NotUnimodular(_))));
    }
}
