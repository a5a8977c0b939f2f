//! Hard-instance families: circulant regular pairs, the SRG(16,6,2,2)
//! pair, CFI pairs, and seeded random graphs for test corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Node `i` is adjacent to `i ± o (mod n)` for every offset `o`.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<Graph> {
    let mut edges = Vec::new();
    for &o in offsets {
        if o == 0 || 2 * o > n {
            return Err(Error::InvalidParameter(format!(
                "circulant offset {o} outside 1..={}",
                n / 2
            )));
        }
        for i in 0..n {
            let j = (i + o) % n;
            // The antipodal offset on even n would otherwise add each edge twice.
            if 2 * o == n && j < i {
                continue;
            }
            edges.push((i, j));
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    circulant(n, &[1])
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).expect("path edges are valid")
}

pub fn complete(n: usize) -> Graph {
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::from_edges(n, &edges).expect("complete graph edges are valid")
}

pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::from_edges(leaves + 1, &edges).expect("star edges are valid")
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, &edges).expect("Petersen edges are valid")
}

// Shrikhande graph: Cayley graph of Z4 x Z4 with connection set
// {±(1,0), ±(0,1), ±(1,1)}, node (a, b) -> 4a + b.
const SHRIKHANDE_EDGES: [(usize, usize); 48] = [
    (0, 1),
    (0, 3),
    (0, 4),
    (0, 5),
    (0, 12),
    (0, 15),
    (1, 2),
    (1, 5),
    (1, 6),
    (1, 12),
    (1, 13),
    (2, 3),
    (2, 6),
    (2, 7),
    (2, 13),
    (2, 14),
    (3, 4),
    (3, 7),
    (3, 14),
    (3, 15),
    (4, 5),
    (4, 7),
    (4, 8),
    (4, 9),
    (5, 6),
    (5, 9),
    (5, 10),
    (6, 7),
    (6, 10),
    (6, 11),
    (7, 8),
    (7, 11),
    (8, 9),
    (8, 11),
    (8, 12),
    (8, 13),
    (9, 10),
    (9, 13),
    (9, 14),
    (10, 11),
    (10, 14),
    (10, 15),
    (11, 12),
    (11, 15),
    (12, 13),
    (12, 15),
    (13, 14),
    (14, 15),
];

// 4x4 rook's graph: cells 4r + c, adjacent when sharing a row or column.
const ROOK4_EDGES: [(usize, usize); 48] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 8),
    (0, 12),
    (1, 2),
    (1, 3),
    (1, 5),
    (1, 9),
    (1, 13),
    (2, 3),
    (2, 6),
    (2, 10),
    (2, 14),
    (3, 7),
    (3, 11),
    (3, 15),
    (4, 5),
    (4, 6),
    (4, 7),
    (4, 8),
    (4, 12),
    (5, 6),
    (5, 7),
    (5, 9),
    (5, 13),
    (6, 7),
    (6, 10),
    (6, 14),
    (7, 11),
    (7, 15),
    (8, 9),
    (8, 10),
    (8, 11),
    (8, 12),
    (9, 10),
    (9, 11),
    (9, 13),
    (10, 11),
    (10, 14),
    (11, 15),
    (12, 13),
    (12, 14),
    (12, 15),
    (13, 14),
    (13, 15),
    (14, 15),
];

/// The Shrikhande graph and the 4x4 rook's graph, both SRG(16,6,2,2).
pub fn srg_pair() -> (Graph, Graph) {
    (
        Graph::from_edges(16, &SHRIKHANDE_EDGES).expect("built-in table"),
        Graph::from_edges(16, &ROOK4_EDGES).expect("built-in table"),
    )
}

/// The CFI gadget `X_d`: end-point pairs `a_i`, `b_i` and one middle node
/// `m_S` per even-size subset `S` of `{0..d}`, with `m_S ~ a_i` iff `i ∈ S`
/// and `m_S ~ b_i` iff `i ∉ S`.
///
/// Local layout: `a_i = i`, `b_i = d + i`, middle nodes from `2d` on in
/// ascending subset-mask order.
#[derive(Debug, Clone)]
pub struct CfiGadget {
    pub d: usize,
    pub graph: Graph,
    /// Subset masks of the middle nodes, in layout order.
    pub middle_masks: Vec<u32>,
}

impl CfiGadget {
    pub fn new(d: usize) -> Result<CfiGadget> {
        if d == 0 || d > 16 {
            return Err(Error::InvalidParameter(format!(
                "gadget degree {d} outside 1..=16"
            )));
        }
        let middle_masks: Vec<u32> = (0u32..1 << d).filter(|m| m.count_ones() % 2 == 0).collect();
        let mut edges = Vec::new();
        for (r, &mask) in middle_masks.iter().enumerate() {
            let m = 2 * d + r;
            for i in 0..d {
                if mask >> i & 1 == 1 {
                    edges.push((m, i));
                } else {
                    edges.push((m, d + i));
                }
            }
        }
        let graph = Graph::from_edges(2 * d + middle_masks.len(), &edges)?;
        Ok(CfiGadget {
            d,
            graph,
            middle_masks,
        })
    }

    pub fn size(&self) -> usize {
        self.graph.n()
    }

    pub fn a(&self, i: usize) -> usize {
        i
    }

    pub fn b(&self, i: usize) -> usize {
        self.d + i
    }

    /// The gadget with `a_i` and `b_i` both labeled `i + 1` and middle nodes
    /// labeled 0, so automorphisms must keep every end-point pair in place.
    pub fn pair_labeled(&self) -> Graph {
        let labels = (0..self.size())
            .map(|v| {
                if v < 2 * self.d {
                    (v % self.d) as u64 + 1
                } else {
                    0
                }
            })
            .collect();
        self.graph.clone().with_labels(labels).expect("sizes match")
    }
}

/// A CFI pair together with the base edge that was twisted.
#[derive(Debug, Clone)]
pub struct CfiPair {
    pub a: Graph,
    pub b: Graph,
    pub twisted: (usize, usize),
    pub gadget_size: usize,
}

/// CFI pair over a connected 3-regular base, twisting its first edge.
pub fn cfi_pair(base: &Graph) -> Result<CfiPair> {
    let first = base
        .edges()
        .next()
        .ok_or_else(|| Error::InvalidParameter("base graph has no edges".into()))?;
    cfi_pair_twisting(base, first)
}

pub fn cfi_pair_twisting(base: &Graph, twist: (usize, usize)) -> Result<CfiPair> {
    if let Some(v) = (0..base.n()).find(|&v| base.degree(v) != 3) {
        return Err(Error::InvalidParameter(format!(
            "CFI base must be 3-regular; node {v} has degree {}",
            base.degree(v)
        )));
    }
    if base.bfs_distances(0).iter().any(Option::is_none) {
        return Err(Error::InvalidParameter("CFI base must be connected".into()));
    }
    let twist = (twist.0.min(twist.1), twist.0.max(twist.1));
    if !base.has_edge(twist.0, twist.1) {
        return Err(Error::InvalidParameter(format!(
            "twist ({}, {}) is not a base edge",
            twist.0, twist.1
        )));
    }
    let gadget = CfiGadget::new(3)?;
    let size = gadget.size();
    let n = base.n() * size;
    let node = |v: usize, local: usize| v * size + local;
    let slot = |v: usize, u: usize| base.neighbors(v).binary_search(&u).expect("adjacent");

    let mut inner = Vec::new();
    for v in 0..base.n() {
        inner.extend(gadget.graph.edges().map(|(x, y)| (node(v, x), node(v, y))));
    }
    let mut edges_a = inner.clone();
    let mut edges_b = inner;
    for (u, v) in base.edges() {
        let (i, j) = (slot(u, v), slot(v, u));
        let (au, bu) = (node(u, gadget.a(i)), node(u, gadget.b(i)));
        let (av, bv) = (node(v, gadget.a(j)), node(v, gadget.b(j)));
        edges_a.extend([(au, av), (bu, bv)]);
        if (u, v) == twist {
            edges_b.extend([(au, bv), (bu, av)]);
        } else {
            edges_b.extend([(au, av), (bu, bv)]);
        }
    }
    Ok(CfiPair {
        a: Graph::from_edges(n, &edges_a)?,
        b: Graph::from_edges(n, &edges_b)?,
        twisted: twist,
        gadget_size: size,
    })
}

/// Erdős–Rényi G(n, p), seeded.
pub fn random_graph(n: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

const REGULAR_ATTEMPTS: usize = 100_000;

/// Uniform-ish random d-regular graph by the pairing model, retrying until
/// the pairing is simple.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n * d % 2 == 1 || (d >= n && !(n == 0 || d == 0)) {
        return Err(Error::InvalidParameter(format!(
            "no simple {d}-regular graph on {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..REGULAR_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let edges: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
        if let Ok(g) = Graph::from_edges(n, &edges) {
            return Ok(g);
        }
    }
    Err(Error::InvalidParameter(format!(
        "pairing model found no simple {d}-regular graph on {n} nodes after {REGULAR_ATTEMPTS} attempts"
    )))
}
