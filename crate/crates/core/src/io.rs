//! Text formats: a whitespace edge-list dialect and graph6.
//!
//! Edge-list dialect, one item per line:
//!
//! ```text
//! # comment
//! 3 2        optional header "n m"
//! 0 1        edge
//! 1 2
//! L 0 7      label line "L node class"
//! ```
//!
//! The first two-number line is read as a header when its second number
//! equals the count of edge lines after it and every later id lies below its
//! first number; otherwise it is an edge and `n` is inferred from the largest
//! id mentioned.

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    let mut labels: Vec<(usize, u64, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parse_id = |t: &str| -> Result<usize> {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("expected a non-negative integer, found {t:?}"),
            })
        };
        match toks.as_slice() {
            ["L", u, c] => {
                let c = c.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("label class must be an integer, found {c:?}"),
                })?;
                labels.push((parse_id(u)?, c, line_no));
            }
            [u, v] => pairs.push((parse_id(u)?, parse_id(v)?, line_no)),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected \"u v\", \"n m\" or \"L u c\", found {line:?}"),
                })
            }
        }
    }

    let ids_below = |n: usize| {
        pairs[1..].iter().all(|&(u, v, _)| u < n && v < n) && labels.iter().all(|&(u, _, _)| u < n)
    };
    let declared = match pairs.first() {
        Some(&(n, m, _)) if m == pairs.len() - 1 && ids_below(n) => {
            pairs.remove(0);
            Some(n)
        }
        _ => None,
    };
    let inferred = pairs
        .iter()
        .flat_map(|&(u, v, _)| [u + 1, v + 1])
        .chain(labels.iter().map(|&(u, _, _)| u + 1))
        .max()
        .unwrap_or(0);
    let n = declared.unwrap_or(inferred);

    let edges: Vec<(usize, usize)> = pairs.iter().map(|&(u, v, _)| (u, v)).collect();
    let g = Graph::from_edges(n, &edges)?;
    if labels.is_empty() {
        return Ok(g);
    }
    let mut values = vec![0u64; n];
    for (u, c, _) in labels {
        values[u] = c;
    }
    g.with_labels(values)
}

/// Serializes in the dialect `parse_edge_list` reads; always writes the header.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    if let Some(labels) = g.labels() {
        for (u, c) in labels.iter().enumerate() {
            out.push_str(&format!("L {u} {c}\n"));
        }
    }
    out
}

const GRAPH6_HEADER: &str = ">>graph6<<";

/// Parses one graph per non-empty line.
pub fn parse_graph6(text: &str) -> Result<Vec<Graph>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| decode_graph6(l.strip_prefix(GRAPH6_HEADER).unwrap_or(l)))
        .collect()
}

pub fn decode_graph6(line: &str) -> Result<Graph> {
    let bytes = line.as_bytes();
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::Format(format!(
            "byte {b} outside the printable range 63..=126"
        )));
    }
    let (n, body) = decode_size(bytes)?;
    let bit_count = n * n.saturating_sub(1) / 2;
    let needed = bit_count.div_ceil(6);
    if body.len() < needed {
        return Err(Error::Format(format!(
            "truncated: {n} nodes need {needed} data bytes, found {}",
            body.len()
        )));
    }
    if body.len() > needed {
        return Err(Error::Format(format!(
            "{} trailing bytes after the adjacency data",
            body.len() - needed
        )));
    }

    let mut adj = vec![Vec::new(); n];
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                adj[i].push(j);
                adj[j].push(i);
            }
            k += 1;
        }
    }
    // Column-major order pushes ascending ids for `j` but not for `i`.
    adj.iter_mut().for_each(|l| l.sort_unstable());
    Ok(Graph::from_sorted_adjacency(adj))
}

fn decode_size(bytes: &[u8]) -> Result<(usize, &[u8])> {
    let word = |chunk: &[u8]| {
        chunk
            .iter()
            .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize)
    };
    match bytes {
        [] => Err(Error::Format("empty graph6 line".into())),
        [126, 126, rest @ ..] if rest.len() >= 6 => Ok((word(&rest[..6]), &rest[6..])),
        [126, 126, ..] => Err(Error::Format("truncated 36-bit size prefix".into())),
        [126, rest @ ..] if rest.len() >= 3 => Ok((word(&rest[..3]), &rest[3..])),
        [126, ..] => Err(Error::Format("truncated 18-bit size prefix".into())),
        [b, rest @ ..] => Ok(((b - 63) as usize, rest)),
    }
}

pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(63 + n as u8);
    } else if n <= 258_047 {
        out.push(126);
        out.extend((0..3).rev().map(|s| 63 + ((n >> (6 * s)) & 63) as u8));
    } else {
        out.extend([126, 126]);
        out.extend((0..6).rev().map(|s| 63 + ((n >> (6 * s)) & 63) as u8));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(63 + acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(63 + (acc << (6 - filled)));
    }
    String::from_utf8(out).expect("graph6 output is ASCII")
}
