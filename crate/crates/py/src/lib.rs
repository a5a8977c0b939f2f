//! Python bindings: graphs, WL tests, extraction, oracles, sampling and the
//! forward engine. Embeddings come back as plain float lists.

use gnnak_core::canon;
use gnnak_core::extract::{extract_egonet, extract_rw_subgraph, WalkPolicy};
use gnnak_core::forward::{self, ForwardConfig, Mode, Pool, WeightBundle};
use gnnak_core::io;
use gnnak_core::oracles::{self, Motif};
use gnnak_core::sampling::{self, SampleConfig, Strategy};
use gnnak_core::suite;
use gnnak_core::wl::{self, Verdict};
use gnnak_core::Error;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::NonIsomorphic => "NonIsomorphic",
        Verdict::Undecided => "Undecided",
    }
}

#[pyclass(name = "Graph", module = "gnnak", frozen)]
struct PyGraph {
    inner: gnnak_core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges, labels=None))]
    fn new(n: usize, edges: Vec<(usize, usize)>, labels: Option<Vec<u64>>) -> PyResult<Self> {
        let mut g = gnnak_core::Graph::from_edges(n, &edges).map_err(to_py)?;
        if let Some(l) = labels {
            g = g.with_labels(l).map_err(to_py)?;
        }
        Ok(PyGraph { inner: g })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: io::parse_edge_list(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_graph6(line: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: io::decode_graph6(line.trim()).map_err(to_py)?,
        })
    }

    /// File path or `gen:` spec, as accepted by the command line.
    #[staticmethod]
    #[pyo3(signature = (source, seed=0))]
    fn load(source: &str, seed: u64) -> PyResult<Self> {
        Ok(PyGraph {
            inner: suite::resolve_source(source, seed).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<u64>> {
        self.inner.labels().map(<[u64]>::to_vec)
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        self.inner.check_node(v).map_err(to_py)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn permute(&self, perm: Vec<usize>) -> PyResult<Self> {
        Ok(PyGraph {
            inner: self.inner.permute(&perm).map_err(to_py)?,
        })
    }

    fn to_edge_list(&self) -> String {
        io::to_edge_list(&self.inner)
    }

    fn to_graph6(&self) -> String {
        io::to_graph6(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __eq__(&self, other: &PyGraph) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// Hex fingerprint under a method spec such as `"1wl"` or `"sub1wl-exact k=2"`.
#[pyfunction]
#[pyo3(signature = (g, method="sub1wl k=1"))]
fn fingerprint(g: &PyGraph, method: &str) -> PyResult<String> {
    let m = suite::parse_method(method).map_err(to_py)?;
    Ok(wl::fingerprint(&g.inner, &m).map_err(to_py)?.hex())
}

/// `"NonIsomorphic"` or `"Undecided"`.
#[pyfunction]
#[pyo3(signature = (a, b, method="sub1wl k=1"))]
fn distinguish(a: &PyGraph, b: &PyGraph, method: &str) -> PyResult<&'static str> {
    let m = suite::parse_method(method).map_err(to_py)?;
    Ok(verdict_name(
        wl::distinguish(&a.inner, &b.inner, &m).map_err(to_py)?,
    ))
}

#[pyfunction]
fn canonical_code(g: &PyGraph) -> PyResult<Vec<u8>> {
    Ok(canon::canonical_code(&g.inner).map_err(to_py)?.to_bytes())
}

#[pyfunction]
fn are_isomorphic(a: &PyGraph, b: &PyGraph) -> PyResult<bool> {
    canon::are_isomorphic(&a.inner, &b.inner).map_err(to_py)
}

#[pyfunction]
fn count_automorphisms(g: &PyGraph) -> u64 {
    canon::count_automorphisms(&g.inner)
}

fn subgraph_dict<'py>(
    py: Python<'py>,
    s: &gnnak_core::extract::RootedSubgraph,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("root", s.root())?;
    d.set_item("parent_ids", s.parent_ids.clone())?;
    d.set_item("d2c", s.d2c.clone())?;
    d.set_item("edges", s.graph.edges().collect::<Vec<_>>())?;
    Ok(d)
}

/// k-hop egonet of `v` with local edges, parent ids and hop distances.
#[pyfunction]
fn egonet<'py>(py: Python<'py>, g: &PyGraph, v: usize, k: usize) -> PyResult<Bound<'py, PyDict>> {
    subgraph_dict(py, &extract_egonet(&g.inner, v, k).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (g, v, walk_len=10, repeats=5, seed=0, p=1.0, q=1.0))]
#[allow(clippy::too_many_arguments)]
fn random_walk_subgraph<'py>(
    py: Python<'py>,
    g: &PyGraph,
    v: usize,
    walk_len: usize,
    repeats: usize,
    seed: u64,
    p: f64,
    q: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let policy = WalkPolicy::new(p, q).map_err(to_py)?;
    let s = extract_rw_subgraph(&g.inner, v, walk_len, repeats, seed, &policy).map_err(to_py)?;
    subgraph_dict(py, &s)
}

fn parse_motif(name: &str) -> PyResult<Motif> {
    Motif::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown motif {name:?}")))
}

#[pyfunction]
fn count_motif(g: &PyGraph, motif: &str) -> PyResult<u64> {
    Ok(oracles::count_motif(&g.inner, parse_motif(motif)?).count)
}

#[pyfunction]
fn count_all_motifs<'py>(py: Python<'py>, g: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for c in oracles::count_all_motifs(&g.inner) {
        d.set_item(c.motif.name(), c.count)?;
    }
    Ok(d)
}

#[pyfunction]
fn properties<'py>(py: Python<'py>, g: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let p = oracles::graph_properties(&g.inner);
    let d = PyDict::new(py);
    d.set_item("is_connected", p.is_connected)?;
    d.set_item("diameter", p.diameter().ok())?;
    d.set_item("radius", p.radius().ok())?;
    d.set_item("eccentricities", p.eccentricities.clone())?;
    Ok(d)
}

fn parse_pool(name: &str) -> PyResult<Pool> {
    match name {
        "sum" => Ok(Pool::Sum),
        "mean" => Ok(Pool::Mean),
        _ => Err(PyValueError::new_err(format!("unknown pool {name:?}"))),
    }
}

fn parse_strategy(name: &str) -> PyResult<Strategy> {
    match name {
        "random" => Ok(Strategy::Random),
        "farthest" => Ok(Strategy::Farthest),
        "mincover" | "min_set_cover" => Ok(Strategy::MinSetCover),
        _ => Err(PyValueError::new_err(format!("unknown strategy {name:?}"))),
    }
}

/// Graph embedding. With `r` set only a sampled set of subgraphs is encoded.
#[pyfunction]
#[pyo3(signature = (
    g, seed=0, mode="ak", outer_layers=2, inner_layers=2, k=2, hidden=32, input_dim=8,
    pool="sum", graph_pool="sum", r=None, strategy="mincover"
))]
#[allow(clippy::too_many_arguments)]
fn embed(
    g: &PyGraph,
    seed: u64,
    mode: &str,
    outer_layers: usize,
    inner_layers: usize,
    k: usize,
    hidden: usize,
    input_dim: usize,
    pool: &str,
    graph_pool: &str,
    r: Option<usize>,
    strategy: &str,
) -> PyResult<Vec<f64>> {
    let mode = match mode {
        "ak" => Mode::Ak,
        "ak+" | "akplus" => Mode::AkPlus,
        _ => return Err(PyValueError::new_err(format!("unknown mode {mode:?}"))),
    };
    let cfg = ForwardConfig {
        outer_layers,
        inner_layers,
        k,
        mode,
        pool: parse_pool(pool)?,
        graph_pool: parse_pool(graph_pool)?,
        hidden,
        input_dim,
    };
    let w = WeightBundle::new(seed, &cfg).map_err(to_py)?;
    let out = match r {
        None => forward::forward(&g.inner, &w),
        Some(r) => {
            let union = gnnak_core::extract::extract_all_egonets(&g.inner, k).map_err(to_py)?;
            let plan = sampling::sample(
                &g.inner,
                &union,
                &SampleConfig::new(r, parse_strategy(strategy)?, seed),
            )
            .map_err(to_py)?;
            forward::forward_with_plan(&g.inner, &w, &plan)
        }
    };
    Ok(out.map_err(to_py)?.to_vec())
}

#[pyfunction]
#[pyo3(signature = (g, r=3, strategy="mincover", seed=0, k=1, first_root=None))]
fn sample<'py>(
    py: Python<'py>,
    g: &PyGraph,
    r: usize,
    strategy: &str,
    seed: u64,
    k: usize,
    first_root: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let union = gnnak_core::extract::extract_all_egonets(&g.inner, k).map_err(to_py)?;
    let mut cfg = SampleConfig::new(r, parse_strategy(strategy)?, seed);
    if let Some(v) = first_root {
        cfg = cfg.starting_at(v);
    }
    let plan = sampling::sample(&g.inner, &union, &cfg).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("roots", plan.selected_roots)?;
    d.set_item("coverage", plan.coverage)?;
    d.set_item("layers", plan.layers)?;
    d.set_item("full_coverage", plan.full_coverage)?;
    d.set_item("flagged", plan.flagged)?;
    Ok(d)
}

#[pymodule]
fn gnnak(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(fingerprint, m)?)?;
    m.add_function(wrap_pyfunction!(distinguish, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_code, m)?)?;
    m.add_function(wrap_pyfunction!(are_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(count_automorphisms, m)?)?;
    m.add_function(wrap_pyfunction!(egonet, m)?)?;
    m.add_function(wrap_pyfunction!(random_walk_subgraph, m)?)?;
    m.add_function(wrap_pyfunction!(count_motif, m)?)?;
    m.add_function(wrap_pyfunction!(count_all_motifs, m)?)?;
    m.add_function(wrap_pyfunction!(properties, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    Ok(())
}
