//! Manifest-driven pair suites and their JSON reports.
//!
//! A manifest holds one JSON object per line:
//!
//! ```text
//! {"a": "g.el", "b": "h.g6", "methods": ["1wl", "sub1wl k=1"], "expect": ["Undecided", "NonIsomorphic"]}
//! ```
//!
//! Sources are file paths (`.g6` for graph6, with `@i` picking the i-th
//! graph, anything else as an edge list) or generator specs:
//! `gen:circulant:N:O1,O2`, `gen:srg16:a|b`, `gen:cfi:petersen|k4:a|b`,
//! `gen:petersen`, `gen:er:N:P[:SEED]`, `gen:regular:N:D[:SEED]`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators;
use crate::graph::Graph;
use crate::io::{parse_edge_list, parse_graph6};
use crate::wl::{fingerprint, HashMode, Method, SubgraphWlConfig, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub a: String,
    #[serde(default)]
    pub b: Option<String>,
    pub methods: Vec<String>,
    #[serde(default)]
    pub expect: Vec<String>,
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })
        })
        .collect()
}

/// Parses `"1wl"`, `"sub1wl k=2 iters=3"`, `"sub1wl-exact k=1 no-root-mark"`.
pub fn parse_method(spec: &str) -> Result<Method> {
    let mut toks = spec.split_whitespace();
    let name = toks
        .next()
        .ok_or_else(|| Error::Usage("empty method".into()))?;
    let mut k = 1;
    let mut iters = None;
    let mut depth = None;
    let mut root_mark = true;
    for t in toks {
        let num = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Usage(format!("bad number in method option {t:?}")))
        };
        match t.split_once('=') {
            Some(("k", v)) => k = num(v)?,
            Some(("iters", v)) => iters = Some(num(v)?),
            Some(("depth", v)) => depth = Some(num(v)?),
            None if t == "no-root-mark" => root_mark = false,
            _ => return Err(Error::Usage(format!("unknown method option {t:?}"))),
        }
    }
    let sub = |mode| {
        let mut cfg = SubgraphWlConfig::new(k, mode);
        cfg.iters = iters;
        cfg.inner_depth = depth;
        cfg.root_mark = root_mark;
        Method::SubgraphWl(cfg)
    };
    match name {
        "1wl" => Ok(Method::Wl1 { iters }),
        "sub1wl" => Ok(sub(HashMode::Wl1)),
        "sub1wl-exact" => Ok(sub(HashMode::Exact)),
        _ => Err(Error::Usage(format!(
            "unknown method {name:?}; expected 1wl, sub1wl or sub1wl-exact"
        ))),
    }
}

pub fn parse_verdict(s: &str) -> Result<Verdict> {
    let norm: String = s
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect::<String>()
        .to_lowercase();
    match norm.as_str() {
        "nonisomorphic" => Ok(Verdict::NonIsomorphic),
        "undecided" => Ok(Verdict::Undecided),
        _ => Err(Error::Usage(format!("unknown verdict {s:?}"))),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a graph file: graph6 for `.g6` (first graph unless `@i` is
/// appended), the edge-list dialect otherwise.
pub fn load_graph(spec: &str) -> Result<Graph> {
    let (path, index) = match spec.rsplit_once('@') {
        Some((p, i)) if p.ends_with(".g6") => {
            let i = i
                .parse::<usize>()
                .map_err(|_| Error::Usage(format!("bad graph index in {spec:?}")))?;
            (p, Some(i))
        }
        _ => (spec, None),
    };
    let path = PathBuf::from(path);
    let text = read_file(&path)?;
    if path.extension().is_some_and(|e| e == "g6") {
        let mut graphs = parse_graph6(&text)?;
        let i = index.unwrap_or(0);
        if i >= graphs.len() {
            return Err(Error::Usage(format!(
                "{} holds {} graphs, index {i} requested",
                path.display(),
                graphs.len()
            )));
        }
        Ok(graphs.swap_remove(i))
    } else {
        parse_edge_list(&text)
    }
}

/// Builds a graph from a `gen:` spec; `seed` fills in an omitted seed.
pub fn generate(spec: &str, seed: u64) -> Result<Graph> {
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = || Error::Usage(format!("bad generator spec {spec:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| usage());
    let seed_at = |i: usize| -> Result<u64> {
        parts
            .get(i)
            .map_or(Ok(seed), |s| s.parse().map_err(|_| usage()))
    };
    match parts.as_slice() {
        ["gen", "circulant", n, offs] => {
            let offsets = offs.split(',').map(num).collect::<Result<Vec<_>>>()?;
            generators::circulant(num(n)?, &offsets)
        }
        ["gen", "srg16", which] => {
            let (s, r) = generators::srg_pair();
            match *which {
                "a" => Ok(s),
                "b" => Ok(r),
                _ => Err(usage()),
            }
        }
        ["gen", "cfi", base, which] => {
            let base = match *base {
                "petersen" => generators::petersen(),
                "k4" => generators::complete(4),
                _ => return Err(usage()),
            };
            let pair = generators::cfi_pair(&base)?;
            match *which {
                "a" => Ok(pair.a),
                "b" => Ok(pair.b),
                _ => Err(usage()),
            }
        }
        ["gen", "petersen"] => Ok(generators::petersen()),
        ["gen", "er", n, p, ..] if parts.len() <= 5 => {
            let p = p.parse::<f64>().map_err(|_| usage())?;
            generators::random_graph(num(n)?, p, seed_at(4)?)
        }
        ["gen", "regular", n, d, ..] if parts.len() <= 5 => {
            generators::random_regular(num(n)?, num(d)?, seed_at(4)?)
        }
        _ => Err(usage()),
    }
}

pub fn resolve_source(spec: &str, seed: u64) -> Result<Graph> {
    if spec.starts_with("gen:") {
        generate(spec, seed)
    } else {
        load_graph(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// 1-based manifest entry.
    pub entry: usize,
    pub a: String,
    pub b: Option<String>,
    pub method: String,
    pub params: Method,
    pub fingerprint_a: String,
    pub fingerprint_b: Option<String>,
    pub verdict: Option<Verdict>,
    pub expected: Option<Verdict>,
    pub passed: Option<bool>,
    pub seed: u64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub assertions: usize,
    pub failures: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: Vec<String>, records: Vec<Record>) -> Self {
        let assertions = records.iter().filter(|r| r.passed.is_some()).count();
        let failures = records.iter().filter(|r| r.passed == Some(false)).count();
        Report {
            tool: "gnnak".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            summary: Summary {
                records: records.len(),
                assertions,
                failures,
                passed: failures == 0,
            },
            records,
        }
    }
}

fn run_entry(idx: usize, entry: &ManifestEntry, seed: u64) -> Result<Vec<Record>> {
    if !entry.expect.is_empty() && entry.expect.len() != entry.methods.len() {
        return Err(Error::Usage(format!(
            "entry {}: {} expectations for {} methods",
            idx + 1,
            entry.expect.len(),
            entry.methods.len()
        )));
    }
    let methods = entry
        .methods
        .iter()
        .map(|m| parse_method(m))
        .collect::<Result<Vec<_>>>()?;
    let expected = entry
        .expect
        .iter()
        .map(|v| parse_verdict(v))
        .collect::<Result<Vec<_>>>()?;
    if entry.b.is_none() && !expected.is_empty() {
        return Err(Error::Usage(format!(
            "entry {}: expectations need a pair",
            idx + 1
        )));
    }
    let a = resolve_source(&entry.a, seed)?;
    let b = entry
        .b
        .as_deref()
        .map(|s| resolve_source(s, seed))
        .transpose()?;

    methods
        .into_iter()
        .enumerate()
        .map(|(mi, method)| {
            let start = Instant::now();
            let fa = fingerprint(&a, &method)?;
            let fb = b.as_ref().map(|b| fingerprint(b, &method)).transpose()?;
            let verdict = b.as_ref().zip(fb.as_ref()).map(|(b, fb)| {
                if a.n() != b.n() || fa != *fb {
                    Verdict::NonIsomorphic
                } else {
                    Verdict::Undecided
                }
            });
            let exp = expected.get(mi).copied();
            Ok(Record {
                entry: idx + 1,
                a: entry.a.clone(),
                b: entry.b.clone(),
                method: entry.methods[mi].clone(),
                fingerprint_a: fa.hex(),
                fingerprint_b: fb.map(|f| f.hex()),
                verdict,
                expected: exp,
                passed: exp.map(|e| Some(e) == verdict),
                seed,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                params: method,
            })
        })
        .collect()
}

/// Runs every manifest cell; entries are processed in parallel and
/// reported in manifest order.
pub fn run_suite(entries: &[ManifestEntry], seed: u64, command: Vec<String>) -> Result<Report> {
    let per_entry = entries
        .par_iter()
        .enumerate()
        .map(|(i, e)| run_entry(i, e, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new(
        command,
        per_entry.into_iter().flatten().collect(),
    ))
}

pub fn run_manifest_file(path: &Path, seed: u64, command: Vec<String>) -> Result<Report> {
    let entries = parse_manifest(&read_file(path)?)?;
    run_suite(&entries, seed, command)
}
