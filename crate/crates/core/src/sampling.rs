//! SubgraphDrop: pick a small set of roots whose subgraphs cover every
//! node at least `R` times, then fill in the rest by layered propagation.

use std::collections::VecDeque;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::UnionGraph;
use crate::forward::Pool;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Random,
    Farthest,
    MinSetCover,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub r: usize,
    pub strategy: Strategy,
    pub seed: u64,
    /// Forces the first selected root; otherwise it is drawn from the seed
    /// (random, farthest) or chosen greedily (min_set_cover).
    pub first_root: Option<usize>,
}

impl SampleConfig {
    pub fn new(r: usize, strategy: Strategy, seed: u64) -> Self {
        SampleConfig {
            r,
            strategy,
            seed,
            first_root: None,
        }
    }

    pub fn starting_at(mut self, root: usize) -> Self {
        self.first_root = Some(root);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Roots in selection order.
    pub selected_roots: Vec<usize>,
    pub coverage: Vec<usize>,
    pub full_coverage: Vec<usize>,
    /// `layers[d - 1]` holds the nodes at distance `d` from the selected set.
    pub layers: Vec<Vec<usize>>,
    /// Set when some node lies in fewer than `R` subgraphs; such nodes end
    /// up covered by every subgraph that contains them.
    pub flagged: bool,
}

impl SamplePlan {
    pub fn n(&self) -> usize {
        self.coverage.len()
    }

    pub fn min_coverage(&self) -> usize {
        self.coverage.iter().copied().min().unwrap_or(0)
    }

    pub fn is_selected(&self) -> Vec<bool> {
        let mut sel = vec![false; self.n()];
        for &r in &self.selected_roots {
            sel[r] = true;
        }
        sel
    }
}

/// The set of parent nodes of each component, plus how often each node is
/// covered when every component is used.
fn cover_sets<'u>(g: &Graph, union: &'u UnionGraph) -> Result<(Vec<&'u [usize]>, Vec<usize>)> {
    if union.components.len() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "expected one subgraph per node ({}), found {}",
            g.n(),
            union.components.len()
        )));
    }
    let mut full = vec![0; g.n()];
    let mut sets = Vec::with_capacity(g.n());
    for (j, comp) in union.components.iter().enumerate() {
        if comp.root() != j {
            return Err(Error::InvalidParameter(format!(
                "subgraph {j} is rooted at {}",
                comp.root()
            )));
        }
        for &p in &comp.parent_ids {
            if p >= g.n() {
                return Err(Error::NodeOutOfRange { id: p, n: g.n() });
            }
            full[p] += 1;
        }
        sets.push(comp.parent_ids.as_slice());
    }
    Ok((sets, full))
}

struct Selection<'a> {
    sets: Vec<&'a [usize]>,
    target: Vec<usize>,
    coverage: Vec<usize>,
    chosen: Vec<bool>,
    roots: Vec<usize>,
    /// Nodes whose coverage is still below target.
    deficit: usize,
}

impl<'a> Selection<'a> {
    fn new(sets: Vec<&'a [usize]>, full: &[usize], r: usize) -> Self {
        let target: Vec<usize> = full.iter().map(|&f| f.min(r)).collect();
        let deficit = target.iter().filter(|&&t| t > 0).count();
        Selection {
            coverage: vec![0; full.len()],
            chosen: vec![false; full.len()],
            roots: Vec::new(),
            sets,
            target,
            deficit,
        }
    }

    fn done(&self) -> bool {
        self.deficit == 0
    }

    fn take(&mut self, j: usize) {
        debug_assert!(!self.chosen[j]);
        self.chosen[j] = true;
        self.roots.push(j);
        for &p in self.sets[j] {
            self.coverage[p] += 1;
            if self.coverage[p] == self.target[p] {
                self.deficit -= 1;
            }
        }
    }

    /// Nodes of subgraph `j` still below their coverage target.
    fn gain(&self, j: usize) -> usize {
        self.sets[j]
            .iter()
            .filter(|&&p| self.coverage[p] < self.target[p])
            .count()
    }
}

pub fn sample(g: &Graph, union: &UnionGraph, cfg: &SampleConfig) -> Result<SamplePlan> {
    if cfg.r == 0 {
        return Err(Error::InvalidParameter(
            "coverage factor R must be at least 1".into(),
        ));
    }
    if let Some(f) = cfg.first_root {
        g.check_node(f)?;
    }
    let (sets, full) = cover_sets(g, union)?;
    let n = g.n();
    let mut sel = Selection::new(sets, &full, cfg.r);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    match cfg.strategy {
        Strategy::Random => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            if let Some(f) = cfg.first_root {
                order.retain(|&j| j != f);
                order.insert(0, f);
            }
            for j in order {
                if sel.done() {
                    break;
                }
                sel.take(j);
            }
        }
        Strategy::Farthest => {
            let mut dist = vec![usize::MAX; n];
            let mut next = match cfg.first_root {
                Some(f) => Some(f),
                None if n > 0 => Some(rng.random_range(0..n)),
                None => None,
            };
            while let Some(j) = next.filter(|_| !sel.done()) {
                sel.take(j);
                relax_from(g, j, &mut dist);
                // usize::MAX marks nodes unreachable from every chosen root,
                // which rank as farthest.
                next = (0..n)
                    .filter(|&v| !sel.chosen[v])
                    .max_by(|&a, &b| dist[a].cmp(&dist[b]).then(b.cmp(&a)));
            }
        }
        Strategy::MinSetCover => {
            if let Some(f) = cfg.first_root {
                sel.take(f);
            }
            while !sel.done() {
                let best = (0..n)
                    .filter(|&j| !sel.chosen[j])
                    .max_by(|&a, &b| sel.gain(a).cmp(&sel.gain(b)).then(b.cmp(&a)))
                    .ok_or_else(|| {
                        Error::Internal("cover incomplete with no candidates left".into())
                    })?;
                sel.take(best);
            }
        }
    }

    let layers = distance_layers(g, &sel.roots)?;
    let flagged = full.iter().any(|&f| f < cfg.r);
    Ok(SamplePlan {
        selected_roots: sel.roots,
        coverage: sel.coverage,
        full_coverage: full,
        layers,
        flagged,
    })
}

/// Lowers `dist` to the BFS distance from `src` wherever that is smaller.
fn relax_from(g: &Graph, src: usize, dist: &mut [usize]) {
    let mut queue = VecDeque::from([src]);
    dist[src] = 0;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[u] + 1 < dist[w] {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
}

/// `U_d` for `d = 1..`, by multi-source BFS from `roots`.
pub fn distance_layers(g: &Graph, roots: &[usize]) -> Result<Vec<Vec<usize>>> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for &r in roots {
        dist[r] = 0;
        queue.push_back(r);
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    if let Some(v) = dist.iter().position(|&d| d == usize::MAX) {
        return Err(Error::Internal(format!(
            "node {v} is unreachable from the selected roots"
        )));
    }
    let depth = dist.iter().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); depth];
    for (v, &d) in dist.iter().enumerate() {
        if d > 0 {
            layers[d - 1].push(v);
        }
    }
    Ok(layers)
}

/// Extends encodings known on the selected roots to every node: each node
/// in `U_d` takes the mean of its neighbors in `U_{d-1}`.
///
/// `partial` has one row per selected root, in `plan.selected_roots` order.
pub fn propagate_encodings(
    g: &Graph,
    plan: &SamplePlan,
    partial: &Array2<f64>,
) -> Result<Array2<f64>> {
    if partial.nrows() != plan.selected_roots.len() {
        return Err(Error::Dimension {
            expected: plan.selected_roots.len(),
            got: partial.nrows(),
        });
    }
    if plan.n() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            got: plan.n(),
        });
    }
    let mut out = Array2::zeros((g.n(), partial.ncols()));
    let mut level = vec![usize::MAX; g.n()];
    for (row, &r) in plan.selected_roots.iter().enumerate() {
        out.row_mut(r).assign(&partial.row(row));
        level[r] = 0;
    }
    for (d0, layer) in plan.layers.iter().enumerate() {
        let d = d0 + 1;
        for &u in layer {
            let mut acc = ndarray::Array1::<f64>::zeros(partial.ncols());
            let mut count = 0usize;
            for &w in g.neighbors(u) {
                if level[w] == d - 1 {
                    acc += &out.row(w);
                    count += 1;
                }
            }
            if count == 0 {
                return Err(Error::Internal(format!(
                    "node {u} in layer {d} has no neighbor in layer {}",
                    d - 1
                )));
            }
            acc /= count as f64;
            out.row_mut(u).assign(&acc);
        }
        for &u in layer {
            level[u] = d;
        }
    }
    if let Some(v) = level.iter().position(|&l| l == usize::MAX) {
        return Err(Error::Internal(format!(
            "node {v} missing from the plan layers"
        )));
    }
    Ok(out)
}

/// Rescales summed context encodings by `full_coverage / coverage` so they
/// match a pass over every subgraph; mean-pooled context is left as is.
pub fn scale_context(plan: &SamplePlan, sums: &Array2<f64>, pool: Pool) -> Result<Array2<f64>> {
    if sums.nrows() != plan.n() {
        return Err(Error::Dimension {
            expected: plan.n(),
            got: sums.nrows(),
        });
    }
    let mut out = sums.clone();
    if pool == Pool::Mean {
        return Ok(out);
    }
    for (v, mut row) in out.rows_mut().into_iter().enumerate() {
        if plan.coverage[v] == 0 {
            return Err(Error::Domain(format!(
                "node {v} is uncovered; the context scale factor is undefined"
            )));
        }
        row *= plan.full_coverage[v] as f64 / plan.coverage[v] as f64;
    }
    Ok(out)
}
