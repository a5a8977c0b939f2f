//! Ground-truth substructure counts and distance properties.
//!
//! Counts are non-induced: a 4-cycle inside a K4 counts even though the
//! K4 has chords.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motif {
    Triangle,
    TailedTriangle,
    /// A center with three of its neighbors.
    Star3,
    Cycle4,
}

impl Motif {
    pub const ALL: [Motif; 4] = [
        Motif::Triangle,
        Motif::TailedTriangle,
        Motif::Star3,
        Motif::Cycle4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Motif::Triangle => "triangle",
            Motif::TailedTriangle => "tailed_triangle",
            Motif::Star3 => "star3",
            Motif::Cycle4 => "cycle4",
        }
    }

    pub fn parse(s: &str) -> Option<Motif> {
        Motif::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifCount {
    pub motif: Motif,
    pub count: u64,
}

fn choose(n: u64, k: u64) -> u64 {
    if n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Calls `f(a, b, c)` once per triangle with `a < b < c`.
fn for_each_triangle(g: &Graph, mut f: impl FnMut(usize, usize, usize)) {
    for a in 0..g.n() {
        for &b in g.neighbors(a).iter().filter(|&&b| b > a) {
            for &c in g.neighbors(b).iter().filter(|&&c| c > b) {
                if g.has_edge(a, c) {
                    f(a, b, c);
                }
            }
        }
    }
}

fn common_neighbors(g: &Graph, u: usize, w: usize) -> u64 {
    let (mut i, mut j, mut count) = (0, 0, 0);
    let (a, b) = (g.neighbors(u), g.neighbors(w));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

pub fn count_motif(g: &Graph, motif: Motif) -> MotifCount {
    let deg = |v: usize| g.degree(v) as u64;
    let count = match motif {
        Motif::Triangle => {
            let mut t = 0;
            for_each_triangle(g, |_, _, _| t += 1);
            t
        }
        Motif::Star3 => (0..g.n()).map(|v| choose(deg(v), 3)).sum(),
        Motif::TailedTriangle => {
            // Each triangle vertex has deg - 2 edges leaving the triangle.
            let mut t = 0;
            for_each_triangle(g, |a, b, c| t += deg(a) + deg(b) + deg(c) - 6);
            t
        }
        Motif::Cycle4 => {
            // Every 4-cycle is counted once from each of its two diagonals.
            let mut twice = 0;
            for u in 0..g.n() {
                for w in u + 1..g.n() {
                    twice += choose(common_neighbors(g, u, w), 2);
                }
            }
            twice / 2
        }
    };
    MotifCount { motif, count }
}

pub fn count_all_motifs(g: &Graph) -> Vec<MotifCount> {
    Motif::ALL.iter().map(|&m| count_motif(g, m)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphProperties {
    /// False for the empty graph.
    pub is_connected: bool,
    /// Per-node eccentricity, present only when connected.
    pub eccentricities: Option<Vec<usize>>,
}

impl GraphProperties {
    fn eccentricities(&self) -> Result<&[usize]> {
        self.eccentricities
            .as_deref()
            .ok_or_else(|| Error::Domain("diameter and radius need a connected graph".into()))
    }

    pub fn diameter(&self) -> Result<usize> {
        Ok(*self
            .eccentricities()?
            .iter()
            .max()
            .expect("connected graphs are nonempty"))
    }

    pub fn radius(&self) -> Result<usize> {
        Ok(*self
            .eccentricities()?
            .iter()
            .min()
            .expect("connected graphs are nonempty"))
    }
}

pub fn graph_properties(g: &Graph) -> GraphProperties {
    if g.n() == 0 {
        return GraphProperties {
            is_connected: false,
            eccentricities: None,
        };
    }
    let mut ecc = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let dist = g.bfs_distances(v);
        match dist.iter().copied().collect::<Option<Vec<_>>>() {
            Some(d) => ecc.push(d.into_iter().max().unwrap_or(0)),
            None => {
                return GraphProperties {
                    is_connected: false,
                    eccentricities: None,
                }
            }
        }
    }
    GraphProperties {
        is_connected: true,
        eccentricities: Some(ecc),
    }
}
