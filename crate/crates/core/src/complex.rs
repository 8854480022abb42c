//! Anderson-Putnam graph complexes, the induced map and (co)homology actions.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{direct_limit, AlgebraicNumber, IntMatrix, ModulePresentation};
use crate::error::{Error, Result};
use crate::substitution::{PerronData, Substitution};

/// A letter, with its neighbors when collared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    pub left: Option<usize>,
    pub letter: usize,
    pub right: Option<usize>,
}

impl Tile {
    pub fn bare(letter: usize) -> Self {
        Tile { left: None, letter, right: None }
    }

    pub fn collared(left: usize, letter: usize, right: usize) -> Self {
        Tile { left: Some(left), letter, right: Some(right) }
    }

    pub fn label(&self, s: &Substitution) -> String {
        match (self.left, self.right) {
            (Some(l), Some(r)) => format!("{}[{}]{}", s.letter(l), s.letter(self.letter), s.letter(r)),
            _ => s.letter(self.letter).to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub src: usize,
    pub tgt: usize,
    pub tile: Tile,
    pub length: AlgebraicNumber,
}

#[derive(Clone, Debug)]
pub struct ApComplex {
    pub vertices: usize,
    pub edges: Vec<Edge>,
    pub collared: bool,
    index: HashMap<Tile, usize>,
}

/// Image of each edge under the induced map, as a forward edge path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMap {
    pub images: Vec<Vec<usize>>,
}

impl EdgeMap {
    /// Entry `(i, j)` counts edge `i` in the image of edge `j`.
    pub fn count_matrix(&self) -> IntMatrix {
        let n = self.images.len();
        let mut m = IntMatrix::zeros(n, n);
        for (j, path) in self.images.iter().enumerate() {
            for &i in path {
                let v = m.get(i, j) + 1;
                m.set(i, j, v);
            }
        }
        m
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl ApComplex {
    pub fn edge_for(&self, tile: &Tile) -> Option<usize> {
        self.index.get(tile).copied()
    }

    pub fn lengths_f64(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length.to_f64()).collect()
    }

    /// DOT rendering; edge labels carry the tile and its numeric length.
    pub fn to_dot(&self, s: &Substitution) -> String {
        let mut out = String::from("digraph ap {\n");
        for v in 0..self.vertices {
            let _ = writeln!(out, "  v{v};");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  v{} -> v{} [label=\"{} ({:.6})\"];",
                e.src,
                e.tgt,
                e.tile.label(s),
                e.length.to_f64()
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the uncollared or 1-collared complex and the induced edge map.
pub fn build_ap_complex(s: &Substitution, perron: &PerronData, collared: bool) -> Result<(ApComplex, EdgeMap)> {
    s.require_primitive()?;
    let lang = s.language(if collared { 4 } else { 2 })?;

    let tiles: Vec<Tile> = if collared {
        lang.of_length(3).map(|w| Tile::collared(w[0], w[1], w[2])).collect()
    } else {
        (0..s.size()).map(Tile::bare).collect()
    };
    let index: HashMap<Tile, usize> = tiles.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let n = tiles.len();

    // node 2e is the start of edge e, node 2e + 1 its end
    let mut uf = UnionFind::new(2 * n);
    if collared {
        for w in lang.of_length(4) {
            let a = index[&Tile::collared(w[0], w[1], w[2])];
            let b = index[&Tile::collared(w[1], w[2], w[3])];
            uf.union(2 * a + 1, 2 * b);
        }
    } else {
        for w in lang.of_length(2) {
            uf.union(2 * w[0] + 1, 2 * w[1]);
        }
    }
    let mut vertex_of_root: HashMap<usize, usize> = HashMap::new();
    let mut node_vertex = vec![0; 2 * n];
    for (node, slot) in node_vertex.iter_mut().enumerate() {
        let r = uf.find(node);
        let next = vertex_of_root.len();
        *slot = *vertex_of_root.entry(r).or_insert(next);
    }

    let edges: Vec<Edge> = tiles
        .iter()
        .enumerate()
        .map(|(i, t)| Edge {
            src: node_vertex[2 * i],
            tgt: node_vertex[2 * i + 1],
            tile: *t,
            length: perron.lengths[t.letter].clone(),
        })
        .collect();

    let mut images = Vec::with_capacity(n);
    for t in &tiles {
        let path = match (t.left, t.right) {
            (Some(a), Some(c)) => {
                let (ra, rb, rc) = (s.rule(a), s.rule(t.letter), s.rule(c));
                let word: Vec<usize> = ra.iter().chain(rb).chain(rc).copied().collect();
                (ra.len()..ra.len() + rb.len())
                    .map(|k| {
                        let tile = Tile::collared(word[k - 1], word[k], word[k + 1]);
                        index.get(&tile).copied().ok_or_else(|| {
                            Error::Internal(format!("image tile {} is not allowed", tile.label(s)))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            _ => s.rule(t.letter).to_vec(),
        };
        images.push(path);
    }

    let complex = ApComplex { vertices: vertex_of_root.len(), edges, collared, index };
    let map = EdgeMap { images };
    check_edge_map(&complex, &map, perron)?;
    Ok((complex, map))
}

fn check_edge_map(x: &ApComplex, f: &EdgeMap, perron: &PerronData) -> Result<()> {
    for (e, path) in f.images.iter().enumerate() {
        for pair in path.windows(2) {
            if x.edges[pair[0]].tgt != x.edges[pair[1]].src {
                return Err(Error::Internal(format!("image path of edge {e} is not continuous")));
            }
        }
        let edge = &x.edges[e];
        let total = path
            .iter()
            .fold(AlgebraicNumber::zero(perron.field()), |acc, &i| acc.add(&x.edges[i].length));
        if total != perron.lambda.mul(&edge.length) {
            return Err(Error::Internal(format!("length identity fails on edge {e}")));
        }
    }
    Ok(())
}

/// Cycle basis of `H_1` from a spanning tree, and the action of the induced map.
#[derive(Clone, Debug)]
pub struct HomologyAction {
    /// Integer edge vectors, one per non-tree edge.
    pub cycle_basis: Vec<Vec<BigInt>>,
    /// Non-tree edges, in basis order.
    pub nontree: Vec<usize>,
    pub tree_edges: Vec<usize>,
    pub h1: ModulePresentation,
    pub fstar: IntMatrix,
}

impl HomologyAction {
    pub fn rank(&self) -> usize {
        self.cycle_basis.len()
    }

    /// Coordinates of a cycle in the basis.
    pub fn coordinates(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        self.nontree.iter().map(|&e| cycle[e].clone()).collect()
    }

    /// Edge vector of a class given in basis coordinates.
    pub fn cycle_of(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let e = self.cycle_basis.first().map_or(0, Vec::len);
        let mut out = vec![BigInt::zero(); e];
        for (c, z) in coords.iter().zip(&self.cycle_basis) {
            for (o, v) in out.iter_mut().zip(z) {
                *o += c * v;
            }
        }
        out
    }
}

/// Breadth-first spanning tree from vertex 0, ties broken by edge index.
pub struct SpanningTree {
    /// `parent[v] = (edge, sign)`; sign is +1 when the edge runs parent -> v.
    pub parent: Vec<Option<(usize, i64)>>,
    pub order: Vec<usize>,
    pub tree_edges: Vec<usize>,
}

pub fn spanning_tree(x: &ApComplex) -> Result<SpanningTree> {
    let mut adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); x.vertices];
    for (i, e) in x.edges.iter().enumerate() {
        adj[e.src].push((i, e.tgt, 1));
        adj[e.tgt].push((i, e.src, -1));
    }
    for a in adj.iter_mut() {
        a.sort();
    }
    let mut parent = vec![None; x.vertices];
    let mut seen = vec![false; x.vertices];
    let mut order = Vec::new();
    let mut tree_edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(e, w, sign) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((e, sign));
                tree_edges.push(e);
                queue.push_back(w);
            }
        }
    }
    if order.len() != x.vertices {
        // count components for the error message
        let mut comps = 1;
        let mut seen2 = seen.clone();
        for start in 0..x.vertices {
            if seen2[start] {
                continue;
            }
            comps += 1;
            let mut stack = vec![start];
            seen2[start] = true;
            while let Some(v) = stack.pop() {
                for &(_, w, _) in &adj[v] {
                    if !seen2[w] {
                        seen2[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        return Err(Error::Disconnected { components: comps });
    }
    tree_edges.sort_unstable();
    Ok(SpanningTree { parent, order, tree_edges })
}

impl SpanningTree {
    /// Signed edge vector of the tree path from vertex 0 to each vertex.
    pub fn root_paths(&self, x: &ApComplex) -> Vec<Vec<BigInt>> {
        let e = x.edges.len();
        let mut paths = vec![vec![BigInt::zero(); e]; x.vertices];
        for &v in &self.order {
            if let Some((edge, sign)) = self.parent[v] {
                let p = if sign > 0 { x.edges[edge].src } else { x.edges[edge].tgt };
                let mut path = paths[p].clone();
                path[edge] += sign;
                paths[v] = path;
            }
        }
        paths
    }
}

pub fn homology_with_action(x: &ApComplex, f: &EdgeMap) -> Result<HomologyAction> {
    let tree = spanning_tree(x)?;
    let paths = tree.root_paths(x);
    let e = x.edges.len();
    let nontree: Vec<usize> = (0..e).filter(|i| tree.tree_edges.binary_search(i).is_err()).collect();
    let cycle_basis: Vec<Vec<BigInt>> = nontree
        .iter()
        .map(|&i| {
            let edge = &x.edges[i];
            let mut z = paths[edge.src].clone();
            z[i] += 1;
            for (zk, pk) in z.iter_mut().zip(&paths[edge.tgt]) {
                *zk -= pk;
            }
            z
        })
        .collect();

    let count = f.count_matrix();
    let r = nontree.len();
    let mut fstar = IntMatrix::zeros(r, r);
    for (j, z) in cycle_basis.iter().enumerate() {
        let image = count.mul_vec(z);
        if !boundary(x, &image).iter().all(Zero::is_zero) {
            return Err(Error::Internal(format!("image of basis cycle {j} is not a cycle")));
        }
        for (i, &nt) in nontree.iter().enumerate() {
            fstar.set(i, j, image[nt].clone());
        }
    }
    let h1 = ModulePresentation::new(fstar.clone(), if x.collared { "H1(collared)" } else { "H1" })?;
    Ok(HomologyAction { cycle_basis, nontree, tree_edges: tree.tree_edges, h1, fstar })
}

/// Vertex vector `∂z`.
pub fn boundary(x: &ApComplex, z: &[BigInt]) -> Vec<BigInt> {
    let mut b = vec![BigInt::zero(); x.vertices];
    for (c, e) in z.iter().zip(&x.edges) {
        b[e.tgt] += c;
        b[e.src] -= c;
    }
    b
}

/// `H^1(X, S)` with `S` the vertex set: `Z^E` with the transposed edge-count matrix.
pub fn relative_cohomology_action(x: &ApComplex, f: &EdgeMap) -> Result<ModulePresentation> {
    if f.images.len() != x.edges.len() {
        return Err(Error::DimensionMismatch("edge map does not match the complex".into()));
    }
    ModulePresentation::new(f.count_matrix().transpose(), "H1(X,S)")
}

#[derive(Clone, Debug)]
pub struct TilingSpaceH1 {
    pub rank: usize,
    pub action: IntMatrix,
    /// False for the uncollared complex, whose inverse limit need not be the tiling space.
    pub models_tiling_space: bool,
}

/// Direct limit of the dual action on `Hom(H_1, Z)`.
pub fn tiling_space_h1(x: &ApComplex, h: &HomologyAction) -> Result<TilingSpaceH1> {
    let dl = direct_limit(&h.fstar.transpose())?;
    Ok(TilingSpaceH1 { rank: dl.rank, action: dl.action, models_tiling_space: x.collared })
}

/// The forget-collars map on `H_1`, collared basis coordinates to uncollared ones.
pub fn forget_collars_h1(
    collared: (&ApComplex, &HomologyAction),
    bare: (&ApComplex, &HomologyAction),
) -> IntMatrix {
    let (xc, hc) = collared;
    let (xu, hu) = bare;
    let mut p = IntMatrix::zeros(hu.rank(), hc.rank());
    for (j, z) in hc.cycle_basis.iter().enumerate() {
        let mut pushed = vec![BigInt::zero(); xu.edges.len()];
        for (c, e) in z.iter().zip(&xc.edges) {
            let target = xu.edge_for(&Tile::bare(e.tile.letter)).expect("every letter is an edge");
            pushed[target] += c;
        }
        for (i, v) in hu.coordinates(&pushed).into_iter().enumerate() {
            p.set(i, j, v);
        }
    }
    p
}

/// Rank of the image of the uncollared direct-limit `H^1` in the collared one.
#[derive(Clone, Debug)]
pub struct EssentialImage {
    pub rank: usize,
    pub collared: (ApComplex, EdgeMap, HomologyAction),
    pub bare: (ApComplex, EdgeMap, HomologyAction),
}

pub fn essential_image(s: &Substitution, perron: &PerronData) -> Result<EssentialImage> {
    let (xc, fc) = build_ap_complex(s, perron, true)?;
    let (xu, fu) = build_ap_complex(s, perron, false)?;
    let hc = homology_with_action(&xc, &fc)?;
    let hu = homology_with_action(&xu, &fu)?;
    let p = forget_collars_h1((&xc, &hc), (&xu, &hu));
    let n = hc.rank().max(hu.rank()) as u32;
    let composite = &(&hc.fstar.transpose().pow(n) * &p.transpose()) * &hu.fstar.transpose().pow(n);
    let rank = composite.rank();
    Ok(EssentialImage { rank, collared: (xc, fc, hc), bare: (xu, fu, hu) })
}

pub fn essential_image_rank(s: &Substitution) -> Result<usize> {
    let perron = s.perron_data()?;
    Ok(essential_image(s, &perron)?.rank)
}

/// `rank H^1(X, S) = rank H~^0(S) + rank H^1(X)`.
pub fn exact_sequence_holds(x: &ApComplex, h: &HomologyAction) -> bool {
    x.edges.len() == (x.vertices - 1) + h.rank()
}

/// `true` when the edge vector is a sum of tree-path differences, i.e. its
/// class in `H_1` vanishes.
pub fn is_boundary_free_cycle(x: &ApComplex, z: &[BigInt]) -> bool {
    boundary(x, z).iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn unit_vector(n: usize, i: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        v
    }
    use crate::algebra::{char_poly, IntPolynomial};

    fn build(text: &str, collared: bool) -> (Substitution, ApComplex, EdgeMap, HomologyAction) {
        let s = Substitution::parse(text).unwrap();
        let p = s.perron_data().unwrap();
        let (x, f) = build_ap_complex(&s, &p, collared).unwrap();
        let h = homology_with_action(&x, &f).unwrap();
        (s, x, f, h)
    }

    const FIB: &str = "a -> a b\nb -> a";
    const FINAL: &str = "a -> a b b b a a a a\nb -> b a a a b";

    #[test]
    fn wedge_of_two_circles() {
        let (s, x, f, h) = build(FINAL, false);
        assert_eq!((x.vertices, x.edges.len()), (1, 2));
        assert_eq!(h.rank(), 2);
        assert_eq!(f.count_matrix(), s.incidence_matrix());
        assert_eq!(char_poly(&h.fstar).unwrap(), IntPolynomial::from_i64(&[1, -7, 1]));
        let r = relative_cohomology_action(&x, &f).unwrap();
        assert_eq!(r.endo, IntMatrix::from_rows(&[vec![5, 3], vec![3, 2]]).transpose());
    }

    #[test]
    fn fibonacci_models() {
        let (_, x, _, h) = build(FIB, false);
        assert_eq!((x.vertices, x.edges.len(), h.rank()), (1, 2, 2));
        let (s, x, f, h) = build(FIB, true);
        // allowed 3-words: aab, aba, baa, bab
        let labels: Vec<String> = x.edges.iter().map(|e| e.tile.label(&s)).collect();
        assert_eq!(labels, ["a[a]b", "a[b]a", "b[a]a", "b[a]b"]);
        assert_eq!(h.rank(), x.edges.len() - x.vertices + 1);
        let cp = char_poly(&h.fstar).unwrap();
        assert!(cp.div_exact(&IntPolynomial::from_i64(&[-1, -1, 1])).is_some());
        assert!(exact_sequence_holds(&x, &h));
        assert_eq!(f.images.len(), 4);
    }

    #[test]
    fn single_loop() {
        let s = Substitution::parse("a -> a a").unwrap();
        let p = s.perron_data().unwrap();
        let (x, f) = build_ap_complex(&s, &p, false).unwrap();
        let h = homology_with_action(&x, &f).unwrap();
        assert_eq!(h.fstar, IntMatrix::from_rows(&[vec![2]]));
    }

    #[test]
    fn basis_vectors_are_cycles() {
        for text in [FIB, FINAL, "a -> a b'\nb -> a\na' -> a' b\nb' -> a'"] {
            for collared in [false, true] {
                let (_, x, _, h) = build(text, collared);
                for z in &h.cycle_basis {
                    assert!(is_boundary_free_cycle(&x, z));
                }
                for (i, z) in h.cycle_basis.iter().enumerate() {
                    assert_eq!(h.coordinates(z), unit_vector(h.rank(), i));
                }
            }
        }
    }

    #[test]
    fn tiling_space_h1_ranks() {
        let (_, x, _, h) = build(FINAL, true);
        assert_eq!(tiling_space_h1(&x, &h).unwrap().rank, 3);
        let (_, x, _, h) = build(FIB, false);
        assert!(!tiling_space_h1(&x, &h).unwrap().models_tiling_space);
    }

    #[test]
    fn essential_image_fibonacci_and_final() {
        let s = Substitution::parse(FIB).unwrap();
        assert_eq!(essential_image_rank(&s).unwrap(), 2);
        let s = Substitution::parse(FINAL).unwrap();
        assert_eq!(essential_image_rank(&s).unwrap(), 2);
    }

    #[test]
    fn cofinality_under_squaring() {
        let s = Substitution::parse(FINAL).unwrap();
        let ss = s.compose(&s).unwrap();
        let rank = |t: &Substitution| {
            let p = t.perron_data().unwrap();
            let (x, f) = build_ap_complex(t, &p, true).unwrap();
            let h = homology_with_action(&x, &f).unwrap();
            tiling_space_h1(&x, &h).unwrap().rank
        };
        assert_eq!(rank(&s), rank(&ss));
    }

    const EX28: &str = "a -> a b'\nb -> a\na' -> a' b\nb' -> a'";
    const EX29: &str = "a -> a b a'\nb -> a b\na' -> a' b' a\nb' -> a' b'";

    #[test]
    fn corpus_complex_sizes() {
        let cases = [
            (FIB, (1, 2), (3, 4), 2, 2),
            (EX28, (1, 4), (10, 16), 7, 4),
            (EX29, (1, 4), (8, 12), 5, 4),
            (FINAL, (1, 2), (4, 8), 3, 2),
        ];
        for (text, bare, col, h1, h1f) in cases {
            let (_, xu, _, _) = build(text, false);
            assert_eq!((xu.vertices, xu.edges.len()), bare, "{text}");
            let (_, xc, _, hc) = build(text, true);
            assert_eq!((xc.vertices, xc.edges.len()), col, "{text}");
            assert_eq!(tiling_space_h1(&xc, &hc).unwrap().rank, h1, "{text}");
            let s = Substitution::parse(text).unwrap();
            assert_eq!(essential_image_rank(&s).unwrap(), h1f, "{text}");
        }
    }
}
