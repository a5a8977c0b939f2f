//! Immutable simple undirected graphs in compressed adjacency form.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Simple undirected graph with nodes `0..n` and optional categorical labels.
///
/// Neighbor lists are stored back to back and sorted ascending. There are no
/// self-loops or parallel edges; every edge appears in both endpoint lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    labels: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges (in either orientation) and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Self::from_sorted_adjacency(adj))
    }

    /// Builds a graph from per-node neighbor lists that are already known to
    /// be symmetric, sorted and free of loops and duplicates.
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Graph {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        for list in adj {
            targets.extend(list);
            offsets.push(targets.len());
        }
        Graph {
            offsets,
            targets,
            labels: None,
        }
    }

    pub fn empty(n: usize) -> Graph {
        Self::from_sorted_adjacency(vec![Vec::new(); n])
    }

    /// Returns a copy carrying the given node labels.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Graph> {
        if labels.len() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Graph {
        self.labels = None;
        self
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<u64> {
        self.labels.as_ref().map(|l| l[v])
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            Err(Error::NodeOutOfRange { id: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Relabels nodes: node `v` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(
                    "permutation is not a bijection".into(),
                ));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v) in self.edges() {
            adj[perm[u]].push(perm[v]);
            adj[perm[v]].push(perm[u]);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        let mut g = Graph::from_sorted_adjacency(adj);
        if let Some(labels) = &self.labels {
            let mut out = vec![0; n];
            for v in 0..n {
                out[perm[v]] = labels[v];
            }
            g.labels = Some(out);
        }
        Ok(g)
    }

    /// Disjoint union; nodes of `other` are shifted by `self.n()`.
    /// Labels are kept only when both sides are labeled.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let mut adj: Vec<Vec<usize>> = (0..shift).map(|v| self.neighbors(v).to_vec()).collect();
        adj.extend((0..other.n()).map(|v| other.neighbors(v).iter().map(|w| w + shift).collect()));
        let mut g = Graph::from_sorted_adjacency(adj);
        if let (Some(a), Some(b)) = (&self.labels, &other.labels) {
            g.labels = Some(a.iter().chain(b).copied().collect());
        }
        g
    }

    /// Hop distances from `src`; unreachable nodes get `None`.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Strictly increasing set of node ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    /// Sorts and deduplicates `ids`, checking each against the host size `n`.
    pub fn new(mut ids: Vec<usize>, n: usize) -> Result<NodeSet> {
        ids.sort_unstable();
        ids.dedup();
        if let Some(&id) = ids.last() {
            if id >= n {
                return Err(Error::NodeOutOfRange { id, n });
            }
        }
        Ok(NodeSet(ids))
    }

    pub fn all(n: usize) -> NodeSet {
        NodeSet((0..n).collect())
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        self.0.binary_search(&id).ok()
    }
}

/// Induced subgraph `G[S]`. Local node `i` corresponds to parent node
/// `s.ids()[i]`; the returned vector is that mapping.
pub fn induced_subgraph(g: &Graph, s: &NodeSet) -> Result<(Graph, Vec<usize>)> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("node set must be nonempty".into()));
    }
    if let Some(&id) = s.ids().last() {
        g.check_node(id)?;
    }
    let ids = s.ids();
    let adj = ids
        .iter()
        .map(|&p| {
            // Both lists are sorted, so local ids come out sorted too.
            g.neighbors(p)
                .iter()
                .filter_map(|&q| s.position(q))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut sub = Graph::from_sorted_adjacency(adj);
    if let Some(labels) = g.labels() {
        sub.labels = Some(ids.iter().map(|&p| labels[p]).collect());
    }
    Ok((sub, ids.to_vec()))
}
