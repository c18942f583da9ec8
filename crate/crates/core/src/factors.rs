//! Spanning-forest and odd-unicyclic factor counts, checked against the
//! matrix-tree style determinant identities, and the closed-form
//! comfortability built from them.
//!
//! Enumeration walks edge subsets of a fixed size as bitmasks and splits each
//! subset into components with a union-find. Determinants of Laplacian and
//! signless-Laplacian minors give the same numbers and serve as the fast path.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::algebra::{rat, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::graph::{bipartition, Graph, Vertex};
use crate::instance::Phase;
use crate::potential::{laplacian, signless_laplacian};

/// Largest edge count accepted by the subset enumerations.
pub const MAX_ENUMERATION_EDGES: usize = 40;

/// Whether to run the subset enumerations alongside the determinants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    DeterminantOnly,
    CrossChecked,
}

/// Number of factors per component count `ω`.
pub type OmegaHistogram = BTreeMap<usize, u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorCounts {
    /// Spanning trees.
    pub chi1: u64,
    /// Two-tree spanning forests separating `u1` from `un`.
    pub chi2: u64,
    /// `Σ 4^ω` over spanning subgraphs whose components are all odd unicyclic.
    pub iota1: u64,
    /// `Σ 4^(ω−1)` over spanning subgraphs made of a tree containing `u1`
    /// plus odd unicyclic components.
    pub iota2: u64,
    pub edge_count: usize,
    /// Component-count tallies of the odd-unicyclic factors (enumeration only).
    pub odd_unicyclic_omegas: Option<OmegaHistogram>,
    /// Component-count tallies of the tree-plus-odd-unicyclic factors
    /// (enumeration only).
    pub tree_unicyclic_omegas: Option<OmegaHistogram>,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(len: usize) -> Self {
        DisjointSets {
            parent: (0..len).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[derive(Debug)]
struct Component {
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
}

impl Component {
    fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }

    /// One cycle, of odd length. The cycle is what remains after repeatedly
    /// stripping degree-1 vertices.
    fn is_odd_unicyclic(&self) -> bool {
        if self.edges.len() != self.vertices.len() {
            return false;
        }
        let mut degree: BTreeMap<Vertex, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for &(u, v) in &self.edges {
            *degree.get_mut(&u).unwrap() += 1;
            *degree.get_mut(&v).unwrap() += 1;
        }
        let mut remaining = self.vertices.len();
        let mut leaves: Vec<Vertex> = degree.iter().filter(|(_, &d)| d == 1).map(|(&v, _)| v).collect();
        while let Some(leaf) = leaves.pop() {
            degree.insert(leaf, 0);
            remaining -= 1;
            for &(u, v) in &self.edges {
                let other = if u == leaf {
                    v
                } else if v == leaf {
                    u
                } else {
                    continue;
                };
                let d = degree.get_mut(&other).unwrap();
                if *d > 0 {
                    *d -= 1;
                    if *d == 1 {
                        leaves.push(other);
                    }
                }
            }
        }
        remaining % 2 == 1
    }
}

fn components(g: &Graph, mask: u64) -> Vec<Component> {
    let n = g.n();
    let mut ds = DisjointSets::new(n + 1);
    let chosen: Vec<(Vertex, Vertex)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &e)| e)
        .collect();
    for &(u, v) in &chosen {
        ds.union(u, v);
    }
    let mut by_root: BTreeMap<usize, Component> = BTreeMap::new();
    for v in 1..=n {
        by_root
            .entry(ds.find(v))
            .or_insert_with(|| Component {
                vertices: vec![],
                edges: vec![],
            })
            .vertices
            .push(v);
    }
    for &(u, v) in &chosen {
        by_root.get_mut(&ds.find(u)).unwrap().edges.push((u, v));
    }
    by_root.into_values().collect()
}

/// Calls `f` with every `k`-subset of `0..m` as a bitmask (Gosper's hack).
fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > m {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << m;
    let mut s: u64 = (1 << k) - 1;
    while s < limit {
        f(s);
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

/// Factor counts for every choice of distinguished vertices, by exhaustive
/// enumeration of edge subsets.
#[derive(Clone, Debug)]
pub struct EnumeratedFactors {
    pub chi1: u64,
    /// `chi2[u][v]`, 1-based.
    pub chi2: Vec<Vec<u64>>,
    pub iota1: u64,
    /// `iota2[u]`, 1-based.
    pub iota2: Vec<u64>,
    pub odd_unicyclic_omegas: OmegaHistogram,
    /// Per root vertex, 1-based.
    pub tree_unicyclic_omegas: Vec<OmegaHistogram>,
}

pub fn enumerate_factors(g: &Graph) -> Result<EnumeratedFactors> {
    let n = g.n();
    let m = g.edge_count();
    if m > MAX_ENUMERATION_EDGES {
        return Err(Error::OutOfRange {
            what: "edge count",
            value: m,
            range: "0..=40",
        });
    }
    let mut chi1 = 0;
    for_each_subset(m, n - 1, |mask| {
        if components(g, mask).len() == 1 {
            chi1 += 1;
        }
    });

    let mut chi2 = vec![vec![0u64; n + 1]; n + 1];
    if n >= 2 {
        for_each_subset(m, n - 2, |mask| {
            let comps = components(g, mask);
            if comps.len() == 2 && comps.iter().all(Component::is_tree) {
                for &u in &comps[0].vertices {
                    for &v in &comps[1].vertices {
                        chi2[u][v] += 1;
                        chi2[v][u] += 1;
                    }
                }
            }
        });
    }

    let mut iota1 = 0u64;
    let mut odd_unicyclic_omegas = OmegaHistogram::new();
    for_each_subset(m, n, |mask| {
        let comps = components(g, mask);
        if comps.iter().all(Component::is_odd_unicyclic) {
            iota1 += 4u64.pow(comps.len() as u32);
            *odd_unicyclic_omegas.entry(comps.len()).or_default() += 1;
        }
    });

    let mut iota2 = vec![0u64; n + 1];
    let mut tree_unicyclic_omegas = vec![OmegaHistogram::new(); n + 1];
    for_each_subset(m, n - 1, |mask| {
        let comps = components(g, mask);
        let trees: Vec<&Component> = comps.iter().filter(|c| c.is_tree()).collect();
        if trees.len() == 1 && comps.iter().filter(|c| !c.is_tree()).all(Component::is_odd_unicyclic) {
            let weight = 4u64.pow(comps.len() as u32 - 1);
            for &u in &trees[0].vertices {
                iota2[u] += weight;
                *tree_unicyclic_omegas[u].entry(comps.len()).or_default() += 1;
            }
        }
    });

    Ok(EnumeratedFactors {
        chi1,
        chi2,
        iota1,
        iota2,
        odd_unicyclic_omegas,
        tree_unicyclic_omegas,
    })
}

fn as_count(x: Rational, quantity: &'static str) -> Result<u64> {
    if !x.is_integer() {
        return Err(Error::OracleMismatch {
            quantity,
            enumerated: "integer".into(),
            determinant: x.to_string(),
        });
    }
    x.to_integer().to_u64().ok_or(Error::OracleMismatch {
        quantity,
        enumerated: "non-negative".into(),
        determinant: x.to_string(),
    })
}

fn minor_det(m: &RatMatrix, drop: &[Vertex]) -> Result<Rational> {
    let idx: Vec<usize> = drop.iter().map(|v| v - 1).collect();
    m.minor(&idx, &idx).det()
}

/// Determinant-side values of the four factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminantFactors {
    pub chi1: u64,
    pub chi2: u64,
    pub iota1: u64,
    pub iota2: u64,
}

/// `χ₁ = det L⁽ⁿ⁾`, `χ₂ = det L` without rows/columns `u1, un`,
/// `ι₁ = det Q`, `ι₂ = det Q` without row/column `u1`, where `q` is the
/// signless Laplacian to use.
pub(crate) fn determinant_factors_with(
    g: &Graph,
    u1: Vertex,
    un: Vertex,
    q: &RatMatrix,
) -> Result<DeterminantFactors> {
    let l = laplacian(g);
    Ok(DeterminantFactors {
        chi1: as_count(minor_det(&l, &[g.n()])?, "chi1")?,
        chi2: as_count(minor_det(&l, &[u1, un])?, "chi2")?,
        iota1: as_count(q.det()?, "iota1")?,
        iota2: as_count(minor_det(q, &[u1])?, "iota2")?,
    })
}

pub fn determinant_factors(g: &Graph, u1: Vertex, un: Vertex) -> Result<DeterminantFactors> {
    determinant_factors_with(g, u1, un, &signless_laplacian(g))
}

fn check_pair(g: &Graph, u1: Vertex, un: Vertex) -> Result<()> {
    for v in [u1, un] {
        if v == 0 || v > g.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
        }
    }
    if u1 == un {
        return Err(Error::Precondition("u1 and un must differ".into()));
    }
    Ok(())
}

fn compare(quantity: &'static str, enumerated: u64, determinant: u64) -> Result<()> {
    if enumerated != determinant {
        return Err(Error::OracleMismatch {
            quantity,
            enumerated: enumerated.to_string(),
            determinant: determinant.to_string(),
        });
    }
    Ok(())
}

pub(crate) fn factor_counts_with(
    g: &Graph,
    u1: Vertex,
    un: Vertex,
    mode: Mode,
    q: &RatMatrix,
) -> Result<FactorCounts> {
    check_pair(g, u1, un)?;
    let det = determinant_factors_with(g, u1, un, q)?;
    let mut counts = FactorCounts {
        chi1: det.chi1,
        chi2: det.chi2,
        iota1: det.iota1,
        iota2: det.iota2,
        edge_count: g.edge_count(),
        odd_unicyclic_omegas: None,
        tree_unicyclic_omegas: None,
    };
    if mode == Mode::CrossChecked {
        let e = enumerate_factors(g)?;
        compare("chi1", e.chi1, det.chi1)?;
        compare("chi2", e.chi2[u1][un], det.chi2)?;
        compare("iota1", e.iota1, det.iota1)?;
        compare("iota2", e.iota2[u1], det.iota2)?;
        counts.odd_unicyclic_omegas = Some(e.odd_unicyclic_omegas);
        counts.tree_unicyclic_omegas = Some(e.tree_unicyclic_omegas[u1].clone());
    }
    Ok(counts)
}

/// All four factors for the boundary pair `(u1, un)`.
pub fn factor_counts(g: &Graph, u1: Vertex, un: Vertex, mode: Mode) -> Result<FactorCounts> {
    factor_counts_with(g, u1, un, mode, &signless_laplacian(g))
}

/// Spanning trees, by enumeration, cross-checked against `det L⁽ⁿ⁾`.
pub fn spanning_tree_count(g: &Graph) -> Result<u64> {
    let e = enumerate_factors(g)?;
    let det = as_count(minor_det(&laplacian(g), &[g.n()])?, "chi1")?;
    compare("chi1", e.chi1, det)?;
    Ok(e.chi1)
}

/// Two-component spanning forests separating `u1` from `un`, cross-checked
/// against the Laplacian with both rows and columns removed.
pub fn two_forest_count(g: &Graph, u1: Vertex, un: Vertex) -> Result<u64> {
    check_pair(g, u1, un)?;
    let e = enumerate_factors(g)?;
    let det = as_count(minor_det(&laplacian(g), &[u1, un])?, "chi2")?;
    compare("chi2", e.chi2[u1][un], det)?;
    Ok(e.chi2[u1][un])
}

/// `(ι₁, ι₂)` by enumeration, cross-checked against `det Q` and its
/// `u1`-minor.
pub fn odd_unicyclic_sums(g: &Graph, u1: Vertex) -> Result<(u64, u64)> {
    if u1 == 0 || u1 > g.n() {
        return Err(Error::VertexOutOfRange { vertex: u1, n: g.n() });
    }
    let e = enumerate_factors(g)?;
    let q = signless_laplacian(g);
    compare("iota1", e.iota1, as_count(q.det()?, "iota1")?)?;
    compare("iota2", e.iota2[u1], as_count(minor_det(&q, &[u1])?, "iota2")?)?;
    Ok((e.iota1, e.iota2[u1]))
}

/// Comfortability from factor counts: `(χ₂/χ₁ + |E|)/4` for bipartite
/// graphs or constant inflow, `ι₂/ι₁` otherwise.
pub fn comfort_from_counts(counts: &FactorCounts, bipartite: bool, phase: Phase) -> Rational {
    let ratio = |p: u64, q: u64| Rational::new(BigInt::from(p), BigInt::from(q));
    if phase == Phase::Plus || bipartite {
        (ratio(counts.chi2, counts.chi1) + rat(counts.edge_count as i64)) / rat(4)
    } else {
        ratio(counts.iota2, counts.iota1)
    }
}

/// Closed-form comfortability for two tails at `u1`, `un` with inflow `(1, 0)`.
pub fn closed_form_comfort(g: &Graph, u1: Vertex, un: Vertex, phase: Phase) -> Result<Rational> {
    let counts = factor_counts(g, u1, un, Mode::DeterminantOnly)?;
    Ok(comfort_from_counts(&counts, bipartition(g).is_bipartite(), phase))
}

/// Determinant of the square non-oriented incidence matrix of the cycle of
/// the given length: `±2` for odd lengths, `0` for even.
pub fn cycle_incidence_check(length: usize) -> Result<Rational> {
    if length < 3 {
        return Err(Error::OutOfRange {
            what: "cycle length",
            value: length,
            range: "3..",
        });
    }
    let edges: Vec<_> = (1..=length).map(|i| (i, i % length + 1)).collect();
    let g = Graph::new(length, &edges)?;
    let b = crate::potential::incidence_nonoriented(&g);
    b.det()
}

/// True when the determinant is `±2`.
pub fn is_plus_minus_two(x: &Rational) -> bool {
    *x == rat(2) || *x == rat(-2)
}
