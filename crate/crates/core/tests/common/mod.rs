//! Reference implementations kept apart from the library code they check.
#![allow(dead_code)]

use gnnak_core::generators::{
    cfi_pair, circulant, complete, petersen, random_graph, random_regular, srg_pair,
};
use gnnak_core::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn random_small_graph(rng: &mut ChaCha8Rng, max_n: usize) -> Graph {
    let n = rng.random_range(1..=max_n);
    let p = rng.random_range(0.1..0.9);
    random_graph(n, p, rng.random()).unwrap()
}

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; g.n()]; g.n()];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

fn label_of(g: &Graph, v: usize) -> u64 {
    g.label(v).unwrap_or(0)
}

/// Isomorphism by extending partial maps one node at a time, checking every
/// adjacency against already-mapped nodes.
pub fn brute_force_isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.n() != h.n() || g.m() != h.m() || g.is_labeled() != h.is_labeled() {
        return false;
    }
    let (ag, ah) = (adjacency(g), adjacency(h));
    let n = g.n();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        v: usize,
        g: &Graph,
        h: &Graph,
        ag: &[Vec<bool>],
        ah: &[Vec<bool>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if v == map.len() {
            return true;
        }
        for w in 0..map.len() {
            if used[w] || label_of(g, v) != label_of(h, w) || g.degree(v) != h.degree(w) {
                continue;
            }
            if (0..v).any(|u| ag[u][v] != ah[map[u]][w]) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if extend(v + 1, g, h, ag, ah, map, used) {
                return true;
            }
            used[w] = false;
        }
        false
    }
    extend(0, g, h, &ag, &ah, &mut map, &mut used)
}

/// Automorphisms by trying every permutation that keeps labels, via the
/// same extension scheme.
pub fn brute_force_automorphisms(g: &Graph) -> u64 {
    let a = adjacency(g);
    let n = g.n();
    fn count(v: usize, g: &Graph, a: &[Vec<bool>], map: &mut [usize], used: &mut [bool]) -> u64 {
        if v == map.len() {
            return 1;
        }
        let mut total = 0;
        for w in 0..map.len() {
            if used[w] || label_of(g, v) != label_of(g, w) {
                continue;
            }
            if (0..v).any(|u| a[u][v] != a[map[u]][w]) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            total += count(v + 1, g, a, map, used);
            used[w] = false;
        }
        total
    }
    count(0, g, &a, &mut vec![usize::MAX; n], &mut vec![false; n])
}

/// All-pairs hop distances by Floyd-Warshall; `None` when unreachable.
pub fn all_pairs(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for (u, v) in g.edges() {
        d[u][v] = Some(1);
        d[v][u] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Motif counts from every 3- and 4-subset of nodes.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct SubsetCounts {
    pub triangle: u64,
    pub tailed_triangle: u64,
    pub star3: u64,
    pub cycle4: u64,
}

pub fn subset_motif_counts(g: &Graph) -> SubsetCounts {
    let a = adjacency(g);
    let n = g.n();
    let mut out = SubsetCounts::default();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                if a[x][y] && a[y][z] && a[x][z] {
                    out.triangle += 1;
                }
                for w in z + 1..n {
                    let s = [x, y, z, w];
                    // A star centered at s[c] uses the other three as leaves.
                    for c in 0..4 {
                        if (0..4).filter(|&o| o != c).all(|o| a[s[c]][s[o]]) {
                            out.star3 += 1;
                        }
                    }
                    // Triangle on three of the four, tail from one of them to the fourth.
                    for out_idx in 0..4 {
                        let t: Vec<usize> =
                            (0..4).filter(|&i| i != out_idx).map(|i| s[i]).collect();
                        if a[t[0]][t[1]] && a[t[1]][t[2]] && a[t[0]][t[2]] {
                            out.tailed_triangle +=
                                t.iter().filter(|&&v| a[v][s[out_idx]]).count() as u64;
                        }
                    }
                    // The three Hamiltonian cycles on four labeled vertices.
                    for [p, q, r, t] in [[x, y, z, w], [x, y, w, z], [x, z, y, w]] {
                        if a[p][q] && a[q][r] && a[r][t] && a[t][p] {
                            out.cycle4 += 1;
                        }
                    }
                }
            }
        }
    }
    out
}

/// graph6 decoding written from the format description, bit by bit.
pub fn reference_graph6_decode(s: &str) -> (usize, Vec<(usize, usize)>) {
    let vals: Vec<u32> = s.bytes().map(|b| (b - 63) as u32).collect();
    let (n, rest) = if vals[0] < 63 {
        (vals[0] as usize, &vals[1..])
    } else if vals[1] < 63 {
        (
            ((vals[1] << 12) | (vals[2] << 6) | vals[3]) as usize,
            &vals[4..],
        )
    } else {
        let mut n = 0usize;
        for v in &vals[2..8] {
            n = (n << 6) | *v as usize;
        }
        (n, &vals[8..])
    };
    let bits: Vec<bool> = rest
        .iter()
        .flat_map(|v| (0..6).rev().map(move |i| (v >> i) & 1 == 1))
        .collect();
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[k] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    edges.sort();
    (n, edges)
}

/// Shrikhande graph from its Cayley definition on Z4 x Z4.
pub fn shrikhande_from_definition() -> Graph {
    let conn = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)];
    let mut edges = Vec::new();
    for a in 0..4usize {
        for b in 0..4usize {
            for (da, db) in conn {
                let (c, d) = ((a + da) % 4, (b + db) % 4);
                let (u, v) = (4 * a + b, 4 * c + d);
                if u < v {
                    edges.push((u, v));
                }
            }
        }
    }
    Graph::from_edges(16, &edges).unwrap()
}

/// 4x4 rook's graph: same row or same column.
pub fn rook_from_definition() -> Graph {
    let mut edges = Vec::new();
    for u in 0..16usize {
        for v in u + 1..16 {
            if u / 4 == v / 4 || u % 4 == v % 4 {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(16, &edges).unwrap()
}

pub fn triangles_in(g: &Graph) -> u64 {
    subset_motif_counts(g).triangle
}

pub struct Pair {
    pub name: String,
    pub a: Graph,
    pub b: Graph,
}

fn pair(name: impl Into<String>, a: Graph, b: Graph) -> Pair {
    Pair {
        name: name.into(),
        a,
        b,
    }
}

/// Fifty pairs: hard regular families, random regular and random pairs,
/// relabeled copies, and label-swapped copies.
pub fn pair_suite() -> Vec<Pair> {
    let mut out = Vec::new();
    out.push(pair(
        "circulant-8",
        circulant(8, &[1, 2]).unwrap(),
        circulant(8, &[1, 3]).unwrap(),
    ));
    let (s, r) = srg_pair();
    out.push(pair("srg16", s, r));
    let p = cfi_pair(&complete(4)).unwrap();
    out.push(pair("cfi-k4", p.a, p.b));
    let p = cfi_pair(&petersen()).unwrap();
    out.push(pair("cfi-petersen", p.a, p.b));
    for n in 9..=14 {
        out.push(pair(
            format!("circulant-{n}-a"),
            circulant(n, &[1, 2]).unwrap(),
            circulant(n, &[1, 3]).unwrap(),
        ));
        out.push(pair(
            format!("circulant-{n}-b"),
            circulant(n, &[1, 2]).unwrap(),
            circulant(n, &[1, 4]).unwrap(),
        ));
    }
    for s in 0..10 {
        out.push(pair(
            format!("regular-{s}"),
            random_regular(10, 3, s).unwrap(),
            random_regular(10, 3, s + 100).unwrap(),
        ));
    }
    for s in 0..10 {
        let n = 8 + (s as usize % 3);
        out.push(pair(
            format!("random-{s}"),
            random_graph(n, 0.4, s).unwrap(),
            random_graph(n, 0.4, s + 100).unwrap(),
        ));
    }
    let mut r = rng(5);
    for s in 0..8 {
        let g = random_graph(9, 0.35, 200 + s).unwrap();
        let h = g.permute(&random_perm(9, &mut r)).unwrap();
        out.push(pair(format!("relabeled-{s}"), g, h));
    }
    for s in 0..6 {
        let g = random_regular(8, 3, 300 + s).unwrap();
        let labels: Vec<u64> = (0..8).map(|i| i % 3).collect();
        let mut swapped = labels.clone();
        swapped.swap(0, 1);
        out.push(pair(
            format!("labels-{s}"),
            g.clone().with_labels(labels).unwrap(),
            g.with_labels(swapped).unwrap(),
        ));
    }
    assert_eq!(out.len(), 50);
    out
}
