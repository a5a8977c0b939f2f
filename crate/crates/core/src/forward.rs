//! Forward-only GNN-AK / GNN-AK+ with seeded random weights.
//!
//! Each outer layer extracts rooted subgraphs, runs an inner GIN over every
//! subgraph, and fuses the centroid and subgraph encodings (plus, in `AkPlus`
//! mode, a distance embedding and gated context) back into one row per node.
//! All reductions run in ascending node or component order.

use ndarray::{concatenate, Array1, Array2, ArrayView1, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{extract_all_egonets, UnionGraph};
use crate::graph::Graph;
use crate::sampling::{propagate_encodings, scale_context, SamplePlan};

/// One row per node, one column per feature.
pub type EmbeddingMatrix = Array2<f64>;

/// Max-norm gap above which two embeddings count as distinguished.
pub const SEPARATION_THRESHOLD: f64 = 1e-6;
/// Max-norm gap below which two embeddings count as equal.
pub const EQUALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ak,
    AkPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pool {
    Sum,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardConfig {
    pub outer_layers: usize,
    pub inner_layers: usize,
    pub k: usize,
    pub mode: Mode,
    /// Pooling for subgraph and context encodings.
    pub pool: Pool,
    pub graph_pool: Pool,
    pub hidden: usize,
    /// Width of the one-hot label features; labels must lie below it.
    pub input_dim: usize,
}

impl Default for ForwardConfig {
    fn default() -> Self {
        ForwardConfig {
            outer_layers: 2,
            inner_layers: 2,
            k: 2,
            mode: Mode::Ak,
            pool: Pool::Sum,
            graph_pool: Pool::Sum,
            hidden: 32,
            input_dim: 8,
        }
    }
}

impl ForwardConfig {
    fn validate(&self) -> Result<()> {
        let zero = [
            ("outer_layers", self.outer_layers),
            ("inner_layers", self.inner_layers),
            ("k", self.k),
            ("hidden", self.hidden),
            ("input_dim", self.input_dim),
        ]
        .into_iter()
        .find(|&(_, v)| v == 0);
        match zero {
            Some((name, _)) => Err(Error::InvalidParameter(format!(
                "{name} must be at least 1"
            ))),
            None => Ok(()),
        }
    }

    /// Width of the D2C one-hot appended to inner inputs in `AkPlus` mode.
    fn d2c_width(&self) -> usize {
        match self.mode {
            Mode::Ak => 0,
            Mode::AkPlus => self.k + 1,
        }
    }
}

/// Two-layer MLP of one GIN layer: `W2 relu(W1 x + b1) + b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GinWeights {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

impl GinWeights {
    pub fn in_dim(&self) -> usize {
        self.w1.ncols()
    }

    fn random(rng: &mut ChaCha8Rng, d_in: usize, d_out: usize) -> Self {
        let (w1, b1) = linear(rng, d_in, d_out);
        let (w2, b2) = linear(rng, d_out, d_out);
        GinWeights { w1, b1, w2, b2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterLayerWeights {
    pub inner: Vec<GinWeights>,
    pub fuse: Array2<f64>,
    pub fuse_bias: Array1<f64>,
    /// `(k + 1) x hidden` distance embedding table (`AkPlus` only).
    pub d2c_table: Option<Array2<f64>>,
    pub gate: Option<(Array2<f64>, Array1<f64>)>,
}

impl OuterLayerWeights {
    /// Elementwise logistic gate for each distance category.
    fn gates(&self) -> Option<Array2<f64>> {
        let table = self.d2c_table.as_ref()?;
        let (w, b) = self.gate.as_ref()?;
        let pre = table.dot(&w.t()) + b;
        Some(pre.mapv(|x| 1.0 / (1.0 + (-x).exp())))
    }
}

/// All weights of a forward pass, drawn uniformly from `±1/sqrt(fan_in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightBundle {
    pub seed: u64,
    pub config: ForwardConfig,
    pub layers: Vec<OuterLayerWeights>,
}

fn linear(rng: &mut ChaCha8Rng, d_in: usize, d_out: usize) -> (Array2<f64>, Array1<f64>) {
    let bound = 1.0 / (d_in as f64).sqrt();
    let w = Array2::from_shape_fn((d_out, d_in), |_| rng.random_range(-bound..=bound));
    let b = Array1::from_shape_fn(d_out, |_| rng.random_range(-bound..=bound));
    (w, b)
}

impl WeightBundle {
    pub fn new(seed: u64, config: &ForwardConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = config.hidden;
        let layers = (0..config.outer_layers)
            .map(|l| {
                let d_in = if l == 0 { config.input_dim } else { h } + config.d2c_width();
                let inner = (0..config.inner_layers)
                    .map(|i| GinWeights::random(&mut rng, if i == 0 { d_in } else { h }, h))
                    .collect();
                let parts = match config.mode {
                    Mode::Ak => 2,
                    Mode::AkPlus => 4,
                };
                let (fuse, fuse_bias) = linear(&mut rng, parts * h, h);
                let (d2c_table, gate) = match config.mode {
                    Mode::Ak => (None, None),
                    Mode::AkPlus => {
                        let table = Array2::from_shape_fn((config.k + 1, h), |_| {
                            rng.random_range(-1.0..=1.0)
                        });
                        (Some(table), Some(linear(&mut rng, h, h)))
                    }
                };
                OuterLayerWeights {
                    inner,
                    fuse,
                    fuse_bias,
                    d2c_table,
                    gate,
                }
            })
            .collect();
        Ok(WeightBundle {
            seed,
            config: config.clone(),
            layers,
        })
    }
}

/// One-hot label rows, or all ones for an unlabeled graph.
pub fn initial_features(g: &Graph, input_dim: usize) -> Result<EmbeddingMatrix> {
    match g.labels() {
        None => Ok(Array2::ones((g.n(), input_dim))),
        Some(labels) => {
            let mut x = Array2::zeros((g.n(), input_dim));
            for (v, &c) in labels.iter().enumerate() {
                let c = usize::try_from(c)
                    .ok()
                    .filter(|&c| c < input_dim)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "label {c} of node {v} does not fit input_dim {input_dim}"
                        ))
                    })?;
                x[[v, c]] = 1.0;
            }
            Ok(x)
        }
    }
}

/// `h'_v = MLP(h_v + Σ_{u ~ v} h_u)`.
pub fn gin_layer(g: &Graph, h: &EmbeddingMatrix, w: &GinWeights) -> Result<EmbeddingMatrix> {
    if h.nrows() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            got: h.nrows(),
        });
    }
    if h.ncols() != w.in_dim() {
        return Err(Error::Dimension {
            expected: w.in_dim(),
            got: h.ncols(),
        });
    }
    let mut agg = h.clone();
    for v in 0..g.n() {
        for &u in g.neighbors(v) {
            let row = h.row(u);
            let mut out = agg.row_mut(v);
            out += &row;
        }
    }
    let hidden = (agg.dot(&w.w1.t()) + &w.b1).mapv(|x| x.max(0.0));
    Ok(hidden.dot(&w.w2.t()) + &w.b2)
}

/// Inner-GNN output for every component, rows in local-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgraphEmbeddings {
    pub components: Vec<EmbeddingMatrix>,
}

fn encode_component(
    union: &UnionGraph,
    j: usize,
    h: &EmbeddingMatrix,
    layer: &OuterLayerWeights,
    d2c_width: usize,
) -> Result<EmbeddingMatrix> {
    let comp = &union.components[j];
    let mut x = h.select(Axis(0), &comp.parent_ids);
    if d2c_width > 0 {
        let mut onehot = Array2::zeros((comp.len(), d2c_width));
        for (i, &d) in comp.d2c.iter().enumerate() {
            onehot[[i, (d as usize).min(d2c_width - 1)]] = 1.0;
        }
        x = concatenate(Axis(1), &[x.view(), onehot.view()]).expect("row counts match");
    }
    for w in &layer.inner {
        x = gin_layer(&comp.graph, &x, w)?;
    }
    Ok(x)
}

/// Runs the inner GNN on the listed components (all when `only` is `None`).
pub fn encode_subgraphs(
    union: &UnionGraph,
    h: &EmbeddingMatrix,
    layer: &OuterLayerWeights,
    mode: Mode,
    only: Option<&[usize]>,
) -> Result<SubgraphEmbeddings> {
    let d2c_width = match (mode, &layer.d2c_table) {
        (Mode::AkPlus, Some(t)) => t.nrows(),
        (Mode::AkPlus, None) => {
            return Err(Error::InvalidParameter(
                "AkPlus mode needs a D2C table".into(),
            ))
        }
        (Mode::Ak, _) => 0,
    };
    let all: Vec<usize>;
    let ids = match only {
        Some(ids) => ids,
        None => {
            all = (0..union.components.len()).collect();
            &all
        }
    };
    let components = ids
        .par_iter()
        .map(|&j| encode_component(union, j, h, layer, d2c_width))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubgraphEmbeddings { components })
}

fn gate_row(gates: &Array2<f64>, d2c: u32) -> usize {
    (d2c as usize).min(gates.nrows() - 1)
}

fn pooled(acc: Array1<f64>, count: usize, pool: Pool) -> Array1<f64> {
    match pool {
        Pool::Sum => acc,
        Pool::Mean => acc / count.max(1) as f64,
    }
}

/// Per-root centroid and (gated) subgraph encodings; rows follow `roots`.
fn root_encodings(
    union: &UnionGraph,
    roots: &[usize],
    emb: &SubgraphEmbeddings,
    gates: Option<&Array2<f64>>,
    pool: Pool,
) -> (Array2<f64>, Array2<f64>) {
    let h = emb.components.first().map_or(0, |e| e.ncols());
    let mut centroid = Array2::zeros((roots.len(), h));
    let mut subgraph = Array2::zeros((roots.len(), h));
    for (row, (&j, e)) in roots.iter().zip(&emb.components).enumerate() {
        let comp = &union.components[j];
        centroid.row_mut(row).assign(&e.row(comp.root_local));
        let mut acc = Array1::zeros(h);
        for (i, r) in e.rows().into_iter().enumerate() {
            match gates {
                Some(gt) => acc += &(&r * &gt.row(gate_row(gt, comp.d2c[i]))),
                None => acc += &r,
            }
        }
        subgraph.row_mut(row).assign(&pooled(acc, comp.len(), pool));
    }
    (centroid, subgraph)
}

/// Context encoding of every node over the listed components. Contributions
/// are added in ascending component order.
fn context_encodings(
    union: &UnionGraph,
    n: usize,
    roots: &[usize],
    emb: &SubgraphEmbeddings,
    gates: Option<&Array2<f64>>,
    pool: Pool,
) -> Array2<f64> {
    let h = emb.components.first().map_or(0, |e| e.ncols());
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by_key(|&r| roots[r]);
    let mut acc = Array2::zeros((n, h));
    let mut count = vec![0usize; n];
    for r in order {
        let comp = &union.components[roots[r]];
        let e = &emb.components[r];
        for (i, &p) in comp.parent_ids.iter().enumerate() {
            let contribution: Array1<f64> = match gates {
                Some(gt) => &e.row(i) * &gt.row(gate_row(gt, comp.d2c[i])),
                None => e.row(i).to_owned(),
            };
            let mut row = acc.row_mut(p);
            row += &contribution;
            count[p] += 1;
        }
    }
    if pool == Pool::Mean {
        for (v, mut row) in acc.rows_mut().into_iter().enumerate() {
            row /= count[v].max(1) as f64;
        }
    }
    acc
}

fn fuse_rows(
    layer: &OuterLayerWeights,
    mode: Mode,
    centroid: &Array2<f64>,
    subgraph: &Array2<f64>,
    context: Option<&Array2<f64>>,
) -> EmbeddingMatrix {
    let cat = match (mode, context, &layer.d2c_table) {
        (Mode::AkPlus, Some(ctx), Some(table)) => {
            let d0: ArrayView1<f64> = table.row(0);
            let d = d0
                .broadcast((centroid.nrows(), d0.len()))
                .expect("broadcast a row over nodes");
            concatenate(Axis(1), &[d, centroid.view(), subgraph.view(), ctx.view()])
        }
        _ => concatenate(Axis(1), &[centroid.view(), subgraph.view()]),
    }
    .expect("row counts match");
    cat.dot(&layer.fuse.t()) + &layer.fuse_bias
}

/// Combines subgraph embeddings into one row per parent node.
pub fn pool_encodings(
    union: &UnionGraph,
    emb: &SubgraphEmbeddings,
    layer: &OuterLayerWeights,
    mode: Mode,
    pool: Pool,
) -> Result<EmbeddingMatrix> {
    let n = union.components.len();
    if emb.components.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: emb.components.len(),
        });
    }
    if let Some(v) = (0..n).find(|&v| union.components[v].root() != v) {
        return Err(Error::Internal(format!(
            "component {v} is not rooted at node {v}"
        )));
    }
    let roots: Vec<usize> = (0..n).collect();
    let gates = layer.gates();
    let gates = if mode == Mode::AkPlus {
        gates.as_ref()
    } else {
        None
    };
    let (centroid, subgraph) = root_encodings(union, &roots, emb, gates, pool);
    let context =
        (mode == Mode::AkPlus).then(|| context_encodings(union, n, &roots, emb, gates, pool));
    Ok(fuse_rows(
        layer,
        mode,
        &centroid,
        &subgraph,
        context.as_ref(),
    ))
}

pub fn graph_pool(h: &EmbeddingMatrix, pool: Pool) -> Array1<f64> {
    let mut acc = Array1::zeros(h.ncols());
    for r in h.rows() {
        acc += &r;
    }
    pooled(acc, h.nrows(), pool)
}

fn check_bundle(w: &WeightBundle) -> Result<&ForwardConfig> {
    let cfg = &w.config;
    cfg.validate()?;
    if w.layers.len() != cfg.outer_layers {
        return Err(Error::Dimension {
            expected: cfg.outer_layers,
            got: w.layers.len(),
        });
    }
    Ok(cfg)
}

/// Node rows after every outer layer.
pub fn node_embeddings(g: &Graph, w: &WeightBundle) -> Result<EmbeddingMatrix> {
    let cfg = check_bundle(w)?;
    let union = extract_all_egonets(g, cfg.k)?;
    let mut h = initial_features(g, cfg.input_dim)?;
    for layer in &w.layers {
        let emb = encode_subgraphs(&union, &h, layer, cfg.mode, None)?;
        h = pool_encodings(&union, &emb, layer, cfg.mode, cfg.pool)?;
    }
    Ok(h)
}

/// Graph embedding: outer layers followed by the graph-level pool.
pub fn forward(g: &Graph, w: &WeightBundle) -> Result<Array1<f64>> {
    let h = node_embeddings(g, w)?;
    Ok(graph_pool(&h, w.config.graph_pool))
}

/// Forward pass that encodes only the plan's selected subgraphs. Centroid
/// and subgraph encodings reach the other nodes by layered propagation, and
/// summed context is rescaled by coverage.
pub fn forward_with_plan(g: &Graph, w: &WeightBundle, plan: &SamplePlan) -> Result<Array1<f64>> {
    let cfg = check_bundle(w)?;
    if plan.n() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            got: plan.n(),
        });
    }
    let union = extract_all_egonets(g, cfg.k)?;
    let roots = &plan.selected_roots;
    let mut h = initial_features(g, cfg.input_dim)?;
    for layer in &w.layers {
        let emb = encode_subgraphs(&union, &h, layer, cfg.mode, Some(roots))?;
        let gates = layer.gates();
        let gates = if cfg.mode == Mode::AkPlus {
            gates.as_ref()
        } else {
            None
        };
        let (centroid, subgraph) = root_encodings(&union, roots, &emb, gates, cfg.pool);
        let centroid = propagate_encodings(g, plan, &centroid)?;
        let subgraph = propagate_encodings(g, plan, &subgraph)?;
        let context = match cfg.mode {
            Mode::Ak => None,
            Mode::AkPlus => {
                let raw = context_encodings(&union, g.n(), roots, &emb, gates, cfg.pool);
                Some(scale_context(plan, &raw, cfg.pool)?)
            }
        };
        h = fuse_rows(layer, cfg.mode, &centroid, &subgraph, context.as_ref());
    }
    Ok(graph_pool(&h, cfg.graph_pool))
}

pub fn max_abs_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, star};
    use ndarray::s;

    fn cfg(mode: Mode) -> ForwardConfig {
        ForwardConfig {
            k: 1,
            mode,
            hidden: 8,
            input_dim: 4,
            ..ForwardConfig::default()
        }
    }

    #[test]
    fn weights_are_seeded() {
        let c = cfg(Mode::AkPlus);
        assert_eq!(
            WeightBundle::new(3, &c).unwrap(),
            WeightBundle::new(3, &c).unwrap()
        );
        assert_ne!(
            WeightBundle::new(3, &c).unwrap(),
            WeightBundle::new(4, &c).unwrap()
        );
        let w = WeightBundle::new(3, &c).unwrap();
        assert_eq!(w.layers[0].inner[0].in_dim(), 4 + 2);
        assert_eq!(w.layers[1].inner[0].in_dim(), 8 + 2);
        assert_eq!(w.layers[0].fuse.ncols(), 32);
    }

    #[test]
    fn zero_sizes_rejected() {
        let c = ForwardConfig {
            inner_layers: 0,
            ..ForwardConfig::default()
        };
        assert!(WeightBundle::new(0, &c).is_err());
    }

    #[test]
    fn gin_without_edges_is_pointwise_mlp() {
        let w = WeightBundle::new(1, &cfg(Mode::Ak)).unwrap();
        let gw = &w.layers[0].inner[0];
        let g = Graph::empty(2);
        let h = Array2::from_shape_fn((2, 4), |(i, j)| (i * 4 + j) as f64 * 0.1);
        let out = gin_layer(&g, &h, gw).unwrap();
        let single = gin_layer(&Graph::empty(1), &h.slice(s![1..2, ..]).to_owned(), gw).unwrap();
        assert_eq!(out.row(1), single.row(0));
    }

    #[test]
    fn gin_symmetric_inputs() {
        let w = WeightBundle::new(1, &cfg(Mode::Ak)).unwrap();
        let gw = &w.layers[0].inner[0];
        let out = gin_layer(&cycle(4).unwrap(), &Array2::ones((4, 4)), gw).unwrap();
        for v in 1..4 {
            assert_eq!(out.row(v), out.row(0));
        }
        let out = gin_layer(&Graph::empty(2), &Array2::ones((2, 4)), gw).unwrap();
        assert_eq!(out.row(0), out.row(1));
        assert!(gin_layer(&Graph::empty(3), &Array2::ones((2, 4)), gw).is_err());
        assert!(gin_layer(&Graph::empty(2), &Array2::ones((2, 5)), gw).is_err());
    }

    #[test]
    fn vertex_transitive_rows_equal() {
        for mode in [Mode::Ak, Mode::AkPlus] {
            let w = WeightBundle::new(5, &cfg(mode)).unwrap();
            let h = node_embeddings(&cycle(6).unwrap(), &w).unwrap();
            for v in 1..6 {
                let gap = max_abs_diff(&h.row(v).to_owned(), &h.row(0).to_owned());
                assert!(gap < EQUALITY_TOLERANCE, "{mode:?} row {v}: {gap}");
            }
        }
    }

    #[test]
    fn gates_differ_by_distance() {
        let w = WeightBundle::new(7, &cfg(Mode::AkPlus)).unwrap();
        let g = w.layers[0].gates().unwrap();
        assert_eq!(g.nrows(), 2);
        assert!(g.iter().all(|&x| x > 0.0 && x < 1.0));
        assert_ne!(g.row(0), g.row(1));
    }

    #[test]
    fn labels_must_fit_input_dim() {
        let g = star(2).with_labels(vec![0, 3, 9]).unwrap();
        assert!(initial_features(&g, 4).is_err());
        let x = initial_features(&star(2).with_labels(vec![0, 3, 1]).unwrap(), 4).unwrap();
        assert_eq!(x.row(1).to_vec(), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(
            initial_features(&star(2), 3).unwrap(),
            Array2::<f64>::ones((3, 3))
        );
    }

    #[test]
    fn mean_graph_pool() {
        let h = ndarray::array![[1.0, 2.0], [3.0, 6.0]];
        assert_eq!(graph_pool(&h, Pool::Mean).to_vec(), vec![2.0, 4.0]);
        assert_eq!(graph_pool(&h, Pool::Sum).to_vec(), vec![4.0, 8.0]);
    }
}
