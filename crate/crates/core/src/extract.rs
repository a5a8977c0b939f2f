//! Rooted-subgraph extraction: k-hop egonets and random-walk subgraphs.

use std::collections::VecDeque;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, Graph, NodeSet};

pub const DEFAULT_WALK_LEN: usize = 10;
pub const DEFAULT_WALK_REPEATS: usize = 5;

/// Induced subgraph around a root, in local ids, with the map back to the
/// parent graph and each node's hop distance to the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedSubgraph {
    pub graph: Graph,
    pub root_local: usize,
    /// `parent_ids[i]` is the parent-graph id of local node `i` (ascending).
    pub parent_ids: Vec<usize>,
    /// Distance-to-centroid of each local node.
    pub d2c: Vec<u32>,
}

impl RootedSubgraph {
    pub fn root(&self) -> usize {
        self.parent_ids[self.root_local]
    }

    pub fn len(&self) -> usize {
        self.parent_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent_ids.is_empty()
    }

    pub fn local_of(&self, parent: usize) -> Option<usize> {
        self.parent_ids.binary_search(&parent).ok()
    }

    pub fn contains(&self, parent: usize) -> bool {
        self.local_of(parent).is_some()
    }
}

/// All rooted subgraphs of a graph (one per root, in root order), viewed
/// as one disconnected union graph.
#[derive(Debug, Clone)]
pub struct UnionGraph {
    pub components: Vec<RootedSubgraph>,
    pub total_nodes: usize,
    pub total_edges: usize,
    /// Neighbor scans performed by the BFS passes that built the egonets.
    pub bfs_relaxations: usize,
}

impl UnionGraph {
    pub fn from_components(components: Vec<RootedSubgraph>, bfs_relaxations: usize) -> Self {
        let total_nodes = components.iter().map(RootedSubgraph::len).sum();
        let total_edges = components.iter().map(|c| c.graph.m()).sum();
        UnionGraph {
            components,
            total_nodes,
            total_edges,
            bfs_relaxations,
        }
    }

    /// `|V_union| / |V|`.
    pub fn blowup(&self) -> f64 {
        if self.components.is_empty() {
            0.0
        } else {
            self.total_nodes as f64 / self.components.len() as f64
        }
    }

    /// For each parent node, the `(component, local id)` pairs it appears in,
    /// ordered by component.
    pub fn memberships(&self, n: usize) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); n];
        for (j, comp) in self.components.iter().enumerate() {
            for (i, &p) in comp.parent_ids.iter().enumerate() {
                out[p].push((j, i));
            }
        }
        out
    }
}

pub fn extract_egonet(g: &Graph, v: usize, k: usize) -> Result<RootedSubgraph> {
    extract_egonet_counted(g, v, k).map(|(s, _)| s)
}

/// Egonet extraction that also reports how many neighbor entries the BFS
/// scanned. Only nodes at depth `< k` are expanded, so every scanned entry
/// is an edge of the egonet.
pub fn extract_egonet_counted(g: &Graph, v: usize, k: usize) -> Result<(RootedSubgraph, usize)> {
    g.check_node(v)?;
    if k == 0 {
        return Err(Error::InvalidParameter(
            "egonet radius k must be >= 1".into(),
        ));
    }
    let mut depth: Vec<(usize, u32)> = vec![(v, 0)];
    let mut seen = std::collections::HashMap::from([(v, 0u32)]);
    let mut queue = VecDeque::from([(v, 0u32)]);
    let mut relaxations = 0;
    while let Some((u, d)) = queue.pop_front() {
        if d as usize == k {
            continue;
        }
        for &w in g.neighbors(u) {
            relaxations += 1;
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(w) {
                e.insert(d + 1);
                depth.push((w, d + 1));
                queue.push_back((w, d + 1));
            }
        }
    }
    let set = NodeSet::new(depth.iter().map(|&(u, _)| u).collect(), g.n())?;
    let (graph, parent_ids) = induced_subgraph(g, &set)?;
    let d2c = parent_ids.iter().map(|p| seen[p]).collect();
    let root_local = set.position(v).expect("root is in its own egonet");
    Ok((
        RootedSubgraph {
            graph,
            root_local,
            parent_ids,
            d2c,
        },
        relaxations,
    ))
}

/// One egonet per node, built in parallel and assembled in node order.
pub fn extract_all_egonets(g: &Graph, k: usize) -> Result<UnionGraph> {
    let parts: Vec<(RootedSubgraph, usize)> = (0..g.n())
        .into_par_iter()
        .map(|v| extract_egonet_counted(g, v, k))
        .collect::<Result<_>>()?;
    let relax = parts.iter().map(|(_, r)| r).sum();
    Ok(UnionGraph::from_components(
        parts.into_iter().map(|(s, _)| s).collect(),
        relax,
    ))
}

/// Second-order walk bias: weight `1/p` to step back to the previous node,
/// `1` to a node adjacent to the previous node, `1/q` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkPolicy {
    p: f64,
    q: f64,
}

impl Default for WalkPolicy {
    fn default() -> Self {
        WalkPolicy { p: 1.0, q: 1.0 }
    }
}

impl WalkPolicy {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && q > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "walk parameters must be positive, got p={p}, q={q}"
            )));
        }
        Ok(WalkPolicy { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Unnormalized weights over the neighbors of `current`.
    pub fn step_weights(
        &self,
        g: &Graph,
        previous: Option<usize>,
        current: usize,
    ) -> Vec<(usize, f64)> {
        g.neighbors(current)
            .iter()
            .map(|&x| {
                let w = match previous {
                    None => 1.0,
                    Some(prev) if x == prev => 1.0 / self.p,
                    Some(prev) if g.has_edge(prev, x) => 1.0,
                    Some(_) => 1.0 / self.q,
                };
                (x, w)
            })
            .collect()
    }
}

pub fn node2vec_step_weights(p: f64, q: f64) -> Result<WalkPolicy> {
    WalkPolicy::new(p, q)
}

/// Union of `repeats` truncated walks of `walk_len` steps from `v`.
/// D2C is the BFS depth inside the induced subgraph, capped at `walk_len`.
pub fn extract_rw_subgraph(
    g: &Graph,
    v: usize,
    walk_len: usize,
    repeats: usize,
    seed: u64,
    policy: &WalkPolicy,
) -> Result<RootedSubgraph> {
    g.check_node(v)?;
    if walk_len == 0 || repeats == 0 {
        return Err(Error::InvalidParameter(
            "walk_len and repeats must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visited = vec![v];
    for _ in 0..repeats {
        let (mut prev, mut cur) = (None, v);
        for _ in 0..walk_len {
            let weights = policy.step_weights(g, prev, cur);
            if weights.is_empty() {
                break;
            }
            let dist = WeightedIndex::new(weights.iter().map(|&(_, w)| w))
                .map_err(|e| Error::Internal(format!("walk weights: {e}")))?;
            let next = weights[dist.sample(&mut rng)].0;
            visited.push(next);
            prev = Some(cur);
            cur = next;
        }
    }
    let set = NodeSet::new(visited, g.n())?;
    let (graph, parent_ids) = induced_subgraph(g, &set)?;
    let root_local = set.position(v).expect("root is visited");
    let cap = walk_len as u32;
    let d2c = graph
        .bfs_distances(root_local)
        .into_iter()
        .map(|d| d.map_or(cap, |d| (d as u32).min(cap)))
        .collect();
    Ok(RootedSubgraph {
        graph,
        root_local,
        parent_ids,
        d2c,
    })
}

/// Random-walk subgraphs for every node. Each root gets its own stream
/// derived from `seed` so the result does not depend on scheduling.
pub fn extract_all_rw(
    g: &Graph,
    walk_len: usize,
    repeats: usize,
    seed: u64,
    policy: &WalkPolicy,
) -> Result<UnionGraph> {
    let comps: Vec<RootedSubgraph> = (0..g.n())
        .into_par_iter()
        .map(|v| extract_rw_subgraph(g, v, walk_len, repeats, root_seed(seed, v), policy))
        .collect::<Result<_>>()?;
    Ok(UnionGraph::from_components(comps, 0))
}

fn root_seed(seed: u64, v: usize) -> u64 {
    seed ^ (v as u64)
        .wrapping_add(1)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
}
