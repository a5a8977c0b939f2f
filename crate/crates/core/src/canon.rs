//! Exact canonical labeling by individualization and refinement.
//!
//! The search tree is the usual one: refine the label partition to an
//! equitable partition, individualize each vertex of a target cell, refine
//! again, and recurse until the partition is discrete. Every discrete leaf
//! gives a relabeling; the canonical form is the leaf with the largest
//! `(refinement trace, adjacency certificate)` key.
//!
//! Pruning keeps CFI-style inputs with large automorphism groups tractable:
//!
//! * subtrees whose trace prefix is below the best leaf's are skipped;
//! * when a leaf matches the first or best leaf, the automorphism is stored
//!   and the search jumps back to the common ancestor of the two leaves;
//! * children in the same orbit of the stabilizer of the current path (under
//!   the automorphisms found so far) are explored once.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hash::{self, Digest128, WordHasher};

pub const DEFAULT_ISO_CAP: usize = 128;

/// Full canonical form: labels and adjacency bit rows of the canonically
/// relabeled graph. Equality compares the full form; [`digest`] gives a
/// 16-byte summary for storage.
///
/// [`digest`]: CanonicalCode::digest
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    n: usize,
    labels: Vec<u64>,
    rows: Vec<u64>,
}

impl CanonicalCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn digest(&self) -> Digest128 {
        let mut h = WordHasher::new(hash::DOMAIN_CANON);
        h.word(self.n as u64).words(&self.labels).words(&self.rows);
        h.finish128()
    }

    /// Flat byte form (little-endian words); injective for a fixed `n`.
    pub fn to_bytes(&self) -> Vec<u8> {
        std::iter::once(self.n as u64)
            .chain(self.labels.iter().copied())
            .chain(self.rows.iter().copied())
            .flat_map(u64::to_le_bytes)
            .collect()
    }
}

/// Result of a canonical labeling run.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub code: CanonicalCode,
    /// `position[v]` is the canonical index of vertex `v`.
    pub position: Vec<usize>,
    /// Automorphisms discovered during the search (not necessarily a full
    /// generating set).
    pub automorphisms: Vec<Vec<usize>>,
    pub tree_nodes: usize,
}

/// Canonical code with the default size cap.
pub fn canonical_code(g: &Graph) -> Result<CanonicalCode> {
    canonical_form(g, DEFAULT_ISO_CAP).map(|c| c.code)
}

/// Exact isomorphism test. Unlabeled graphs behave as if every label were 0.
pub fn are_isomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    are_isomorphic_capped(g, h, DEFAULT_ISO_CAP)
}

pub fn are_isomorphic_capped(g: &Graph, h: &Graph, cap: usize) -> Result<bool> {
    for x in [g, h] {
        if x.n() > cap {
            return Err(Error::Capacity { n: x.n(), cap });
        }
    }
    if g.n() != h.n() || g.m() != h.m() {
        return Ok(false);
    }
    let profile = |x: &Graph| {
        let mut p: Vec<(u64, usize)> = (0..x.n())
            .map(|v| (x.label(v).unwrap_or(0), x.degree(v)))
            .collect();
        p.sort_unstable();
        p
    };
    if profile(g) != profile(h) {
        return Ok(false);
    }
    Ok(canonical_form(g, cap)?.code == canonical_form(h, cap)?.code)
}

pub fn canonical_form(g: &Graph, cap: usize) -> Result<Canonical> {
    let n = g.n();
    if n > cap {
        return Err(Error::Capacity { n, cap });
    }
    let labels: Vec<u64> = (0..n).map(|v| g.label(v).unwrap_or(0)).collect();
    let mut search = Search::new(g);

    // Initial ordered partition: cells sorted by label value.
    let mut distinct = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let colors: Vec<u32> = labels
        .iter()
        .map(|l| distinct.binary_search(l).unwrap() as u32)
        .collect();
    let mut trace_hasher = DefaultHasher::new();
    distinct.hash(&mut trace_hasher);
    let (colors, t0) = refine(g, colors);
    trace_hasher.write_u64(t0);

    let mut path = Vec::new();
    let mut traces = vec![trace_hasher.finish()];
    search.dfs(colors, &mut path, &mut traces);

    let best = search.best.take().expect("search visits at least one leaf");
    let mut sorted_labels = vec![0u64; n];
    for v in 0..n {
        sorted_labels[best.position[v]] = labels[v];
    }
    Ok(Canonical {
        code: CanonicalCode {
            n,
            labels: sorted_labels,
            rows: best.cert,
        },
        position: best.position,
        automorphisms: search.generators,
        tree_nodes: search.nodes,
    })
}

/// Refines an ordered partition (given as cell indices) to the coarsest
/// equitable refinement. Cell order is preserved and new cells are ordered
/// by their neighbor-color signature, so the result is isomorphism
/// invariant. Returns the new cell indices and a trace hash.
fn refine(g: &Graph, mut colors: Vec<u32>) -> (Vec<u32>, u64) {
    let n = g.n();
    let mut trace = DefaultHasher::new();
    let mut cells = count_distinct(&colors);
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        if cells == n {
            break;
        }
        let sigs: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
        let mut next = vec![0u32; n];
        let mut c = 0u32;
        for i in 0..n {
            if i > 0 && sigs[order[i]] != sigs[order[i - 1]] {
                c += 1;
                sigs[order[i]].hash(&mut trace);
                i.hash(&mut trace);
            }
            next[order[i]] = c;
        }
        let new_cells = c as usize + 1;
        colors = next;
        if new_cells == cells {
            break;
        }
        cells = new_cells;
    }
    cells.hash(&mut trace);
    (colors, trace.finish())
}

fn count_distinct(colors: &[u32]) -> usize {
    let mut seen = vec![false; colors.len()];
    colors
        .iter()
        .filter(|&&c| !std::mem::replace(&mut seen[c as usize], true))
        .count()
}

fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    // Vertex v moves in front of its cell; every later cell shifts by one.
    let cv = colors[v];
    colors
        .iter()
        .enumerate()
        .map(|(u, &c)| {
            if c > cv || (c == cv && u != v) {
                c + 1
            } else {
                c
            }
        })
        .collect()
}

/// First smallest non-singleton cell, as ascending vertex ids.
fn target_cell(colors: &[u32]) -> Option<Vec<usize>> {
    let n = colors.len();
    let mut sizes = vec![0usize; n];
    for &c in colors {
        sizes[c as usize] += 1;
    }
    let target = (0..n)
        .filter(|&c| sizes[c] > 1)
        .min_by_key(|&c| (sizes[c], c))?;
    Some((0..n).filter(|&v| colors[v] as usize == target).collect())
}

struct Leaf {
    path: Vec<usize>,
    traces: Vec<u64>,
    cert: Vec<u64>,
    position: Vec<usize>,
}

enum Flow {
    Continue,
    /// Unwind to the tree node whose path has this length.
    Jump(usize),
}

struct Search<'a> {
    g: &'a Graph,
    words: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
    nodes: usize,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph) -> Self {
        Search {
            g,
            words: g.n().div_ceil(64).max(1),
            first: None,
            best: None,
            generators: Vec::new(),
            nodes: 0,
        }
    }

    fn dfs(&mut self, colors: Vec<u32>, path: &mut Vec<usize>, traces: &mut Vec<u64>) -> Flow {
        self.nodes += 1;
        let level = path.len();
        if let Some(best) = &self.best {
            let k = traces.len().min(best.traces.len());
            if traces[..k] < best.traces[..k] {
                return Flow::Continue;
            }
        }
        let Some(cell) = target_cell(&colors) else {
            return self.leaf(&colors, path, traces);
        };

        let mut explored: Vec<usize> = Vec::new();
        let mut orbits: Option<(usize, Vec<usize>)> = None;
        for v in cell {
            if !explored.is_empty() {
                if orbits.as_ref().map(|(k, _)| *k) != Some(self.generators.len()) {
                    orbits = Some((self.generators.len(), self.stabilizer_orbits(path)));
                }
                let (_, parent) = orbits.as_mut().unwrap();
                let rv = find(parent, v);
                if explored.iter().any(|&e| find(parent, e) == rv) {
                    continue;
                }
            }
            explored.push(v);
            let (child, t) = refine(self.g, individualize(&colors, v));
            path.push(v);
            traces.push(t);
            let flow = self.dfs(child, path, traces);
            path.pop();
            traces.pop();
            if let Flow::Jump(target) = flow {
                if target < level {
                    return flow;
                }
            }
        }
        Flow::Continue
    }

    fn leaf(&mut self, colors: &[u32], path: &[usize], traces: &[u64]) -> Flow {
        let position: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let cert = self.certificate(&position);
        let leaf = Leaf {
            path: path.to_vec(),
            traces: traces.to_vec(),
            cert,
            position,
        };
        let Some(first) = &self.first else {
            self.first = Some(Leaf {
                path: leaf.path.clone(),
                traces: leaf.traces.clone(),
                cert: leaf.cert.clone(),
                position: leaf.position.clone(),
            });
            self.best = Some(leaf);
            return Flow::Continue;
        };
        if first.traces == leaf.traces && first.cert == leaf.cert {
            let jump = common_prefix(&first.path, &leaf.path);
            let gen = automorphism(&first.position, &leaf.position);
            self.generators.push(gen);
            return Flow::Jump(jump);
        }
        let best = self.best.as_ref().unwrap();
        match (&leaf.traces, &leaf.cert).cmp(&(&best.traces, &best.cert)) {
            std::cmp::Ordering::Equal => {
                let jump = common_prefix(&best.path, &leaf.path);
                let gen = automorphism(&best.position, &leaf.position);
                self.generators.push(gen);
                Flow::Jump(jump)
            }
            std::cmp::Ordering::Greater => {
                self.best = Some(leaf);
                Flow::Continue
            }
            std::cmp::Ordering::Less => Flow::Continue,
        }
    }

    fn certificate(&self, position: &[usize]) -> Vec<u64> {
        let n = self.g.n();
        let mut rows = vec![0u64; n * self.words];
        for u in 0..n {
            let base = position[u] * self.words;
            for &w in self.g.neighbors(u) {
                let p = position[w];
                rows[base + p / 64] |= 1 << (p % 64);
            }
        }
        rows
    }

    /// Union-find parents for the orbits of the automorphisms found so far
    /// that fix every vertex on `path`.
    fn stabilizer_orbits(&self, path: &[usize]) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.g.n()).collect();
        for gen in &self.generators {
            if path.iter().all(|&p| gen[p] == p) {
                for (v, &w) in gen.iter().enumerate() {
                    let (a, b) = (find(&mut parent, v), find(&mut parent, w));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        parent
    }
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Given two leaves producing the same relabeled graph, the map
/// `v -> reference^-1(other(v))` is an automorphism.
fn automorphism(reference: &[usize], other: &[usize]) -> Vec<usize> {
    let mut inverse = vec![0; reference.len()];
    for (v, &p) in reference.iter().enumerate() {
        inverse[p] = v;
    }
    other.iter().map(|&p| inverse[p]).collect()
}

/// Counts label-preserving automorphisms by exhaustive backtracking over
/// vertex images. Exponential; meant for small gadgets and tests.
pub fn count_automorphisms(g: &Graph) -> u64 {
    fn extend(g: &Graph, image: &mut Vec<usize>, used: &mut [bool]) -> u64 {
        let v = image.len();
        if v == g.n() {
            return 1;
        }
        let mut total = 0;
        for w in 0..g.n() {
            if used[w] || g.degree(w) != g.degree(v) || g.label(w) != g.label(v) {
                continue;
            }
            let consistent = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(image[u], w));
            if consistent {
                used[w] = true;
                image.push(w);
                total += extend(g, image, used);
                image.pop();
                used[w] = false;
            }
        }
        total
    }
    extend(g, &mut Vec::with_capacity(g.n()), &mut vec![false; g.n()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    #[test]
    fn cycle_vs_two_triangles() {
        assert!(!are_isomorphic(&cycle(6), &two_triangles()).unwrap());
        assert_ne!(
            canonical_code(&cycle(6)).unwrap(),
            canonical_code(&two_triangles()).unwrap()
        );
    }

    #[test]
    fn relabeled_path() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let q = Graph::from_edges(3, &[(0, 2), (2, 1)]).unwrap();
        assert!(are_isomorphic(&p, &q).unwrap());
    }

    #[test]
    fn relabeled_cycle_same_code() {
        let c = cycle(6);
        let d = c.permute(&[3, 5, 0, 1, 4, 2]).unwrap();
        assert_eq!(canonical_code(&c).unwrap(), canonical_code(&d).unwrap());
        assert_eq!(
            canonical_code(&c).unwrap().digest(),
            canonical_code(&d).unwrap().digest()
        );
    }

    #[test]
    fn labels_break_isomorphism() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let a = p.clone().with_labels(vec![1, 0, 0]).unwrap();
        let b = p.with_labels(vec![0, 1, 0]).unwrap();
        assert!(!are_isomorphic(&a, &b).unwrap());
        assert_ne!(canonical_code(&a).unwrap(), canonical_code(&b).unwrap());
    }

    #[test]
    fn capacity_error() {
        let big = Graph::empty(DEFAULT_ISO_CAP + 1);
        assert!(matches!(canonical_code(&big), Err(Error::Capacity { .. })));
        assert!(are_isomorphic_capped(&cycle(5), &cycle(5), 4).is_err());
    }

    #[test]
    fn cycle_automorphisms() {
        assert_eq!(count_automorphisms(&cycle(6)), 12);
        let c = canonical_form(&cycle(6), DEFAULT_ISO_CAP).unwrap();
        for gen in &c.automorphisms {
            for (u, v) in cycle(6).edges() {
                assert!(cycle(6).has_edge(gen[u], gen[v]));
            }
        }
    }

    #[test]
    fn empty_and_tiny_graphs() {
        assert_eq!(canonical_code(&Graph::empty(0)).unwrap().n(), 0);
        assert!(are_isomorphic(&Graph::empty(1), &Graph::empty(1)).unwrap());
        assert!(!are_isomorphic(&Graph::empty(1), &Graph::empty(2)).unwrap());
    }
}
