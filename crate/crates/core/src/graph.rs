//! Finite simple connected graphs, their symmetric arcs, bipartiteness, and
//! small-graph catalogs.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Vertex label, 1-based.
pub type Vertex = usize;

/// Largest vertex count accepted by [`canonical_form`].
pub const MAX_CANONICAL_N: usize = 8;

/// Directed arc of a symmetric arc set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub origin: Vertex,
    pub terminus: Vertex,
}

impl Arc {
    pub fn new(origin: Vertex, terminus: Vertex) -> Self {
        Arc { origin, terminus }
    }

    pub fn reverse(self) -> Self {
        Arc {
            origin: self.terminus,
            terminus: self.origin,
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.origin, self.terminus)
    }
}

/// Connected simple undirected graph on vertices `1..=n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
    arcs: Vec<Arc>,
}

impl Graph {
    /// Builds and validates a graph. Edges may be given in either
    /// orientation; they are stored as `(u, v)` with `u < v`, sorted.
    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let g = Self::build(n, edges)?;
        if let Some(v) = g.unreachable_vertex() {
            return Err(Error::Disconnected(v));
        }
        Ok(g)
    }

    fn build(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n + 1];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut arcs: Vec<Arc> = norm
            .iter()
            .flat_map(|&(u, v)| [Arc::new(u, v), Arc::new(v, u)])
            .collect();
        arcs.sort_unstable();
        Ok(Graph {
            n,
            edges: norm,
            adj,
            arcs,
        })
    }

    fn unreachable_vertex(&self) -> Option<Vertex> {
        let dist = self.distances_from(1);
        (1..=self.n).find(|&v| dist[v].is_none())
    }

    /// Graph whose edge set is the given bitmask over [`pair_index`].
    pub fn from_bitmask(n: usize, mask: u64) -> Result<Self> {
        Self::new(n, &edges_of_mask(n, mask))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u <= self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// The symmetric arc set, sorted by `(origin, terminus)`.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_index(&self, arc: Arc) -> Option<usize> {
        self.arcs.binary_search(&arc).ok()
    }

    pub fn edge_bitmask(&self) -> u64 {
        self.edges
            .iter()
            .fold(0, |m, &(u, v)| m | 1 << pair_index(self.n, u, v))
    }

    /// Breadth-first distances from `src`; `None` for unreachable vertices.
    /// Index 0 is unused.
    pub fn distances_from(&self, src: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n + 1];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> usize {
        self.distances_from(u)[v].expect("graph is connected")
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.vertices().map(|v| self.degree(v)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

/// Bit position of the unordered pair `{u, v}` among all pairs of `1..=n`
/// listed lexicographically: (1,2), (1,3), ..., (1,n), (2,3), ...
pub fn pair_index(n: usize, u: Vertex, v: Vertex) -> usize {
    let (a, b) = (u.min(v) - 1, u.max(v) - 1);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn edges_of_mask(n: usize, mask: u64) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    let mut bit = 0;
    for u in 1..=n {
        for v in u + 1..=n {
            if mask >> bit & 1 == 1 {
                out.push((u, v));
            }
            bit += 1;
        }
    }
    out
}

/// Side of a vertex in a bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

/// Proper 2-coloring of a connected bipartite graph. [`bipartition`] puts
/// vertex 1 in `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    side: Vec<Side>,
}

impl Bipartition {
    pub fn side(&self, v: Vertex) -> Side {
        self.side[v]
    }

    pub fn in_x(&self, v: Vertex) -> bool {
        self.side[v] == Side::X
    }

    pub fn x(&self) -> Vec<Vertex> {
        (1..self.side.len()).filter(|&v| self.in_x(v)).collect()
    }

    pub fn y(&self) -> Vec<Vertex> {
        (1..self.side.len()).filter(|&v| !self.in_x(v)).collect()
    }

    /// Same coloring with `X` and `Y` exchanged.
    pub fn swapped(&self) -> Bipartition {
        Bipartition {
            side: self.side.iter().map(|s| s.opposite()).collect(),
        }
    }
}

/// Outcome of the breadth-first 2-coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coloring {
    Bipartite(Bipartition),
    /// Odd cycle as a closed vertex sequence (first vertex not repeated).
    OddCycle(Vec<Vertex>),
}

impl Coloring {
    pub fn bipartition(&self) -> Option<&Bipartition> {
        match self {
            Coloring::Bipartite(b) => Some(b),
            Coloring::OddCycle(_) => None,
        }
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self, Coloring::Bipartite(_))
    }
}

/// Breadth-first 2-coloring from vertex 1. The first conflicting edge closes
/// an odd cycle through the BFS tree, which is returned as the witness.
pub fn bipartition(g: &Graph) -> Coloring {
    let n = g.n();
    let mut side = vec![Side::X; n + 1];
    let mut parent = vec![0; n + 1];
    let mut depth = vec![usize::MAX; n + 1];
    depth[1] = 0;
    let mut queue = VecDeque::from([1]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                parent[w] = u;
                side[w] = side[u].opposite();
                queue.push_back(w);
            } else if side[w] == side[u] {
                return Coloring::OddCycle(tree_cycle(&parent, &depth, u, w));
            }
        }
    }
    Coloring::Bipartite(Bipartition { side })
}

/// Cycle formed by the tree paths from `u` and `w` to their common ancestor
/// plus the edge `{u, w}`.
fn tree_cycle(parent: &[Vertex], depth: &[usize], u: Vertex, w: Vertex) -> Vec<Vertex> {
    let (mut a, mut b) = (u, w);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

/// All labeled connected simple graphs on `n` vertices, ordered by edge
/// bitmask.
pub fn enumerate_connected(n: usize) -> Result<Vec<Graph>> {
    if !(2..=6).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            range: "2..=6",
        });
    }
    let pairs = n * (n - 1) / 2;
    Ok((0u64..1 << pairs)
        .filter(|&mask| mask.count_ones() as usize + 1 >= n)
        .filter_map(|mask| Graph::from_bitmask(n, mask).ok())
        .collect())
}

/// Calls `f` with every permutation of `0..n` (as images of each index).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

fn permuted_mask(g: &Graph, perm: &[usize]) -> u64 {
    g.edges().iter().fold(0, |m, &(u, v)| {
        m | 1 << pair_index(g.n(), perm[u - 1] + 1, perm[v - 1] + 1)
    })
}

fn check_canonical_size(g: &Graph) -> Result<()> {
    if g.n() > MAX_CANONICAL_N {
        return Err(Error::OutOfRange {
            what: "n",
            value: g.n(),
            range: "2..=8",
        });
    }
    Ok(())
}

/// Minimum edge bitmask over all vertex relabelings. Equal for two graphs
/// exactly when they are isomorphic.
pub fn canonical_form(g: &Graph) -> Result<u64> {
    check_canonical_size(g)?;
    let mut best = u64::MAX;
    for_each_permutation(g.n(), |p| best = best.min(permuted_mask(g, p)));
    Ok(best)
}

/// Canonical form of a graph with an ordered tuple of distinguished
/// vertices: the lexicographic minimum of `(mask, relabeled roots)`. Two
/// rooted graphs share it exactly when an isomorphism maps roots to roots
/// in order.
pub fn rooted_canonical_form(g: &Graph, roots: &[Vertex]) -> Result<(u64, Vec<Vertex>)> {
    check_canonical_size(g)?;
    let mut best: Option<(u64, Vec<Vertex>)> = None;
    for_each_permutation(g.n(), |p| {
        let cand = (
            permuted_mask(g, p),
            roots.iter().map(|&r| p[r - 1] + 1).collect::<Vec<_>>(),
        );
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    });
    Ok(best.expect("at least one permutation"))
}
