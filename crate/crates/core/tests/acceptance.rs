//! Acceptance matrix: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gnnak_core::canon::{are_isomorphic, canonical_code, count_automorphisms};
use gnnak_core::extract::{extract_all_egonets, extract_egonet};
use gnnak_core::forward::{
    forward, forward_with_plan, max_abs_diff, ForwardConfig, Mode, Pool, WeightBundle,
    EQUALITY_TOLERANCE, SEPARATION_THRESHOLD,
};
use gnnak_core::generators::{cfi_pair, circulant, complete, petersen, srg_pair, CfiGadget};
use gnnak_core::io::parse_graph6;
use gnnak_core::oracles::{count_motif, Motif};
use gnnak_core::sampling::{propagate_encodings, sample, scale_context, SampleConfig, Strategy};
use gnnak_core::wl::{distinguish, HashMode, Method, SubgraphWlConfig, Verdict};
use gnnak_core::Graph;
use ndarray::Array2;
use rand::Rng;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn wl1() -> Method {
    Method::Wl1 { iters: None }
}

fn sub(k: usize, mode: HashMode) -> Method {
    Method::SubgraphWl(SubgraphWlConfig::new(k, mode))
}

fn verdict(g: &Graph, h: &Graph, m: &Method) -> Verdict {
    distinguish(g, h, m).expect("test graphs fit the exact cap")
}

fn within(limit: Duration, start: Instant) -> Check {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:.2?}, limit {limit:?}");
    Ok(format!("{took:.2?}"))
}

fn strictness_witness() -> Check {
    let start = Instant::now();
    let a = circulant(8, &[1, 2]).unwrap();
    let b = circulant(8, &[1, 3]).unwrap();
    ensure!(
        verdict(&a, &b, &wl1()) == Verdict::Undecided,
        "1-WL separated the pair"
    );
    ensure!(
        verdict(&a, &b, &sub(1, HashMode::Wl1)) == Verdict::NonIsomorphic,
        "Subgraph-1-WL* (k=1) did not separate the pair"
    );
    ensure!(
        !are_isomorphic(&a, &b).unwrap(),
        "exact oracle says isomorphic"
    );
    ensure!(
        !common::brute_force_isomorphic(&a, &b),
        "brute force says isomorphic"
    );
    within(Duration::from_secs(1), start)
}

fn srg_separation() -> Check {
    let start = Instant::now();
    let (s, r) = srg_pair();
    let triangles = |g: &Graph| -> Vec<u64> {
        (0..16)
            .map(|v| count_motif(&extract_egonet(g, v, 1).unwrap().graph, Motif::Triangle).count)
            .collect()
    };
    let (ts, tr) = (triangles(&s), triangles(&r));
    ensure!(
        ts.iter().all(|&t| t == 6),
        "Shrikhande egonet triangles {ts:?}"
    );
    ensure!(tr.iter().all(|&t| t == 8), "rook egonet triangles {tr:?}");
    let ego = extract_egonet(&s, 0, 1).unwrap();
    ensure!(
        common::triangles_in(&ego.graph) == 6,
        "reference count disagrees"
    );
    ensure!(
        verdict(&s, &r, &sub(1, HashMode::Exact)) == Verdict::NonIsomorphic,
        "exact hash failed to separate"
    );
    ensure!(
        verdict(&s, &r, &sub(1, HashMode::Wl1)) == Verdict::Undecided,
        "1-WL hash separated the pair"
    );
    within(Duration::from_secs(1), start).map(|t| format!("triangles 6 vs 8, {t}"))
}

fn sr25() -> Check {
    let start = Instant::now();
    let text = include_str!("../data/sr25.g6");
    let graphs = parse_graph6(text).unwrap();
    ensure!(graphs.len() == 15, "{} graphs", graphs.len());
    for g in &graphs {
        ensure!(
            g.n() == 25 && (0..25).all(|v| g.degree(v) == 12),
            "not 12-regular on 25"
        );
    }
    let codes: Vec<_> = graphs.iter().map(|g| canonical_code(g).unwrap()).collect();
    let methods = [
        (wl1(), Verdict::Undecided),
        (sub(1, HashMode::Wl1), Verdict::Undecided),
        (sub(1, HashMode::Exact), Verdict::NonIsomorphic),
    ];
    let mut pairs = 0;
    for i in 0..15 {
        for j in i + 1..15 {
            pairs += 1;
            ensure!(
                codes[i] != codes[j],
                "graphs {i} and {j} share a canonical code"
            );
            for (m, want) in &methods {
                let got = verdict(&graphs[i], &graphs[j], m);
                ensure!(got == *want, "pair ({i},{j}) {}: {got:?}", m.name());
            }
        }
    }
    within(Duration::from_secs(30), start).map(|t| format!("{pairs} pairs, {t}"))
}

fn cfi_negative() -> Check {
    let start = Instant::now();
    let pair = cfi_pair(&petersen()).unwrap();
    ensure!(pair.a.n() == 100 && pair.b.n() == 100, "wrong sizes");
    ensure!(
        !are_isomorphic(&pair.a, &pair.b).unwrap(),
        "exact oracle says isomorphic"
    );
    ensure!(
        verdict(&pair.a, &pair.b, &wl1()) == Verdict::Undecided,
        "1-WL separated"
    );
    for t in 1..=4 {
        ensure!(
            verdict(&pair.a, &pair.b, &sub(t, HashMode::Exact)) == Verdict::Undecided,
            "exact Subgraph-1-WL separated at t={t}"
        );
    }
    within(Duration::from_secs(300), start)
}

fn gadget_lemmas() -> Check {
    let x = CfiGadget::new(3).unwrap();
    let labeled = x.pair_labeled();
    let auts = count_automorphisms(&labeled);
    ensure!(auts == 4, "pair-preserving automorphisms: {auts}");
    ensure!(
        common::brute_force_automorphisms(&labeled) == 4,
        "brute force disagrees"
    );
    let d = common::all_pairs(&x.graph);
    for i in 0..3 {
        ensure!(
            d[x.a(i)][x.b(i)] == Some(4),
            "dist(a_{i}, b_{i}) = {:?}",
            d[x.a(i)][x.b(i)]
        );
    }
    let diameter = d
        .iter()
        .flatten()
        .map(|c| c.expect("connected"))
        .max()
        .unwrap();
    ensure!(diameter == 4, "diameter {diameter}");
    for k in 1..=4 {
        for i in 0..3 {
            let ea = extract_egonet(&x.graph, x.a(i), k).unwrap().graph;
            let eb = extract_egonet(&x.graph, x.b(i), k).unwrap().graph;
            ensure!(
                are_isomorphic(&ea, &eb).unwrap(),
                "egonets differ at k={k}, i={i}"
            );
        }
    }
    Ok(format!(
        "|Aut| = 4 ({} ignoring pairs), dist 4, diameter 4",
        count_automorphisms(&x.graph)
    ))
}

const SEEDS: u64 = 10;

fn neural_config(mode: Mode) -> ForwardConfig {
    ForwardConfig {
        outer_layers: 2,
        inner_layers: 2,
        k: 1,
        mode,
        ..ForwardConfig::default()
    }
}

/// Embedding gaps per pair and seed.
fn embedding_gaps(pairs: &[common::Pair], mode: Mode) -> Vec<Vec<f64>> {
    pairs
        .iter()
        .map(|p| {
            (0..SEEDS)
                .map(|seed| {
                    let w = WeightBundle::new(seed, &neural_config(mode)).unwrap();
                    max_abs_diff(&forward(&p.a, &w).unwrap(), &forward(&p.b, &w).unwrap())
                })
                .collect()
        })
        .collect()
}

fn neural_consistency(pairs: &[common::Pair], ak: &[Vec<f64>]) -> Check {
    let mut equal = 0;
    let mut separated = 0;
    for (p, gaps) in pairs.iter().zip(ak) {
        match verdict(&p.a, &p.b, &sub(1, HashMode::Wl1)) {
            Verdict::Undecided => {
                let worst = gaps.iter().copied().fold(0.0, f64::max);
                ensure!(
                    worst < EQUALITY_TOLERANCE,
                    "{}: equal fingerprints, gap {worst:e}",
                    p.name
                );
                equal += 1;
            }
            Verdict::NonIsomorphic => {
                let hits = gaps.iter().filter(|&&g| g > SEPARATION_THRESHOLD).count();
                ensure!(hits >= 9, "{}: separated on {hits}/10 seeds", p.name);
                separated += 1;
            }
        }
    }
    Ok(format!("{equal} equal, {separated} separated"))
}

fn ak_plus_dominance(pairs: &[common::Pair], ak: &[Vec<f64>], ak_plus: &[Vec<f64>]) -> Check {
    let mut count = 0;
    for ((p, a), b) in pairs.iter().zip(ak).zip(ak_plus) {
        for (seed, (ga, gb)) in a.iter().zip(b).enumerate() {
            if *ga > SEPARATION_THRESHOLD {
                count += 1;
                ensure!(
                    *gb > SEPARATION_THRESHOLD,
                    "{} seed {seed}: only ak separates",
                    p.name
                );
            }
        }
    }
    Ok(format!("{count} (pair, seed) separations kept"))
}

fn random_graphs(count: usize, seed: u64) -> Vec<Graph> {
    let mut r = common::rng(seed);
    (0..count)
        .map(|_| {
            let n = r.random_range(4..=20);
            gnnak_core::generators::random_graph(n, r.random_range(0.1..0.5), r.random()).unwrap()
        })
        .collect()
}

fn subgraph_drop() -> Check {
    let graphs = random_graphs(100, 8);
    let mut plans = 0;
    for (gi, g) in graphs.iter().enumerate() {
        let union = extract_all_egonets(g, 1).unwrap();
        for strategy in [Strategy::Random, Strategy::Farthest, Strategy::MinSetCover] {
            for r in 1..=3 {
                let plan = sample(g, &union, &SampleConfig::new(r, strategy, gi as u64)).unwrap();
                plans += 1;
                for v in 0..g.n() {
                    let need = r.min(plan.full_coverage[v]);
                    ensure!(
                        plan.coverage[v] >= need,
                        "graph {gi} {strategy:?} R={r}: node {v}"
                    );
                }
                ensure!(
                    plan.flagged || plan.min_coverage() >= r,
                    "graph {gi}: unflagged shortfall"
                );
                let partial = Array2::from_shape_fn((plan.selected_roots.len(), 3), |(i, j)| {
                    (i * 3 + j) as f64
                });
                let full = propagate_encodings(g, &plan, &partial).unwrap();
                ensure!(
                    full.nrows() == g.n() && full.iter().all(|x| x.is_finite()),
                    "propagation gap"
                );
                let x = Array2::from_shape_fn((g.n(), 2), |(i, j)| (i + j) as f64);
                ensure!(
                    scale_context(&plan, &x, Pool::Mean).unwrap() == x,
                    "MEAN scaling changed input"
                );
            }
        }
        let everything = sample(g, &union, &SampleConfig::new(g.n(), Strategy::Random, 1)).unwrap();
        ensure!(
            everything.selected_roots.len() == g.n(),
            "R = n left roots out"
        );
        for mode in [Mode::Ak, Mode::AkPlus] {
            for pool in [Pool::Sum, Pool::Mean] {
                let cfg = ForwardConfig {
                    pool,
                    ..neural_config(mode)
                };
                let w = WeightBundle::new(gi as u64, &cfg).unwrap();
                let full = forward(g, &w).unwrap();
                let dropped = forward_with_plan(g, &w, &everything).unwrap();
                ensure!(
                    full == dropped,
                    "graph {gi} {mode:?} {pool:?}: S = V pass differs"
                );
            }
        }
    }
    Ok(format!("{plans} plans"))
}

fn complexity_accounting() -> Check {
    let mut graphs = random_graphs(100, 9);
    graphs.push(srg_pair().0);
    graphs.push(cfi_pair(&petersen()).unwrap().a);
    graphs.push(complete(6));
    let mut edges = 0usize;
    let mut elapsed = Duration::ZERO;
    for g in &graphs {
        let dist = common::all_pairs(g);
        for k in 1..=3 {
            let start = Instant::now();
            let union = extract_all_egonets(g, k).unwrap();
            elapsed += start.elapsed();
            let ball = |v: usize| -> Vec<usize> {
                (0..g.n())
                    .filter(|&u| dist[v][u].is_some_and(|d| d <= k))
                    .collect()
            };
            let nodes: usize = (0..g.n()).map(|v| ball(v).len()).sum();
            let induced: usize = (0..g.n())
                .map(|v| {
                    let b = ball(v);
                    g.edges()
                        .filter(|(x, y)| b.contains(x) && b.contains(y))
                        .count()
                })
                .sum();
            ensure!(
                union.total_nodes == nodes,
                "|V_union| {} vs {nodes}",
                union.total_nodes
            );
            ensure!(
                union.total_edges == induced,
                "|E_union| {} vs {induced}",
                union.total_edges
            );
            ensure!(
                union.bfs_relaxations <= 2 * induced,
                "{} relaxations > 2 * {induced}",
                union.bfs_relaxations
            );
            edges += union.total_edges;
        }
    }
    let rate = edges as f64 / elapsed.as_secs_f64().max(1e-9);
    Ok(format!("{} graphs, {rate:.3e} union edges/s", graphs.len()))
}

fn oracle_correctness() -> Check {
    let k4 = complete(4);
    let fixtures = [
        (Motif::Triangle, 4),
        (Motif::Star3, 4),
        (Motif::Cycle4, 3),
        (Motif::TailedTriangle, 12),
    ];
    for (m, want) in fixtures {
        let got = count_motif(&k4, m).count;
        ensure!(got == want, "K4 {}: {got}", m.name());
    }
    let mut r = common::rng(10);
    for i in 0..300 {
        let g = common::random_small_graph(&mut r, 12);
        let want = common::subset_motif_counts(&g);
        let got = common::SubsetCounts {
            triangle: count_motif(&g, Motif::Triangle).count,
            tailed_triangle: count_motif(&g, Motif::TailedTriangle).count,
            star3: count_motif(&g, Motif::Star3).count,
            cycle4: count_motif(&g, Motif::Cycle4).count,
        };
        ensure!(got == want, "graph {i}: {got:?} vs {want:?}");
    }
    Ok("300 graphs".into())
}

fn run(id: usize, title: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let took = start.elapsed();
    match &outcome {
        Ok(detail) => println!("criterion {id:>2} PASS  {title}: {detail} [{took:.2?}]"),
        Err(why) => println!("criterion {id:>2} FAIL  {title}: {why} [{took:.2?}]"),
    }
    outcome.is_ok()
}

fn main() {
    let pairs = common::pair_suite();
    let mut gaps = None;
    let gaps_for = |mode| embedding_gaps(&pairs, mode);
    let mut results = vec![
        run(1, "strictness witness", strictness_witness),
        run(2, "SRG(16,6,2,2) separation", srg_separation),
        run(3, "SR25 behaviour", sr25),
        run(4, "CFI over Petersen", cfi_negative),
        run(5, "gadget lemmas", gadget_lemmas),
    ];
    let start = Instant::now();
    results.push(run(6, "neural/discrete consistency", || {
        let ak = gaps_for(Mode::Ak);
        let out = neural_consistency(&pairs, &ak);
        gaps = Some(ak);
        out.and_then(|d| within(Duration::from_secs(300), start).map(|t| format!("{d}, {t}")))
    }));
    results.push(run(7, "ak+ dominance", || {
        let ak = gaps.take().unwrap_or_else(|| gaps_for(Mode::Ak));
        ak_plus_dominance(&pairs, &ak, &gaps_for(Mode::AkPlus))
    }));
    results.push(run(8, "SubgraphDrop", subgraph_drop));
    results.push(run(9, "complexity accounting", complexity_accounting));
    results.push(run(10, "oracle correctness", oracle_correctness));

    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
