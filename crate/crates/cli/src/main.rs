//! `gnnak` command-line front end.
//!
//! Graph arguments accept edge-list files, `.g6` files (`file.g6@i` picks
//! the i-th graph) and `gen:` generator specs. Exit codes: 0 success, 1 a
//! failed assertion, 2 usage error, 3 unreadable or malformed input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gnnak_core::extract::{extract_all_egonets, extract_all_rw, UnionGraph, WalkPolicy};
use gnnak_core::forward::{
    forward, forward_with_plan, max_abs_diff, ForwardConfig, Mode, Pool, WeightBundle,
    SEPARATION_THRESHOLD,
};
use gnnak_core::generators;
use gnnak_core::io::to_edge_list;
use gnnak_core::oracles::{count_all_motifs, count_motif, graph_properties, Motif, MotifCount};
use gnnak_core::sampling::{sample, SampleConfig, Strategy};
use gnnak_core::suite::{parse_method, parse_verdict, resolve_source, run_manifest_file};
use gnnak_core::wl::{fingerprint, Verdict};
use gnnak_core::{Error, Graph};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "gnnak",
    version,
    about = "Subgraph-1-WL tests, subgraph sampling and GNN-AK embeddings"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; a file-name prefix for `generate`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two graphs with one WL-style test.
    WlTest(WlTestArgs),
    /// Run a JSON-lines manifest of pair tests.
    DistinguishSuite { manifest: PathBuf },
    /// Write every rooted subgraph as an edge-list block.
    Extract(ExtractArgs),
    /// Plan which subgraphs to keep.
    Sample(SampleArgs),
    /// Graph embedding from the forward engine.
    Embed {
        #[command(flatten)]
        model: ModelArgs,
        graph: String,
    },
    /// Embeddings of two graphs and their max-norm difference.
    EmbedPair {
        #[command(flatten)]
        model: ModelArgs,
        a: String,
        b: String,
    },
    /// Substructure counts.
    Count {
        #[arg(long, default_value = "all")]
        motif: String,
        graph: String,
    },
    /// Connectivity, diameter, radius and eccentricities.
    Props { graph: String },
    /// Write generated graphs as edge lists under the `--out` prefix.
    Generate(GenerateArgs),
    /// Egonet extraction throughput and union-graph blowup.
    Bench(BenchArgs),
}

#[derive(Args)]
struct WlTestArgs {
    #[arg(long, default_value = "sub1wl")]
    method: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Outer iterations (default: until the partition is stable, at most n).
    #[arg(long)]
    iters: Option<usize>,
    /// Inner refinement depth (default: to stabilization).
    #[arg(long)]
    depth: Option<usize>,
    /// Hash subgraphs without marking their root.
    #[arg(long)]
    no_root_mark: bool,
    /// Expected verdict; a mismatch exits with status 1.
    #[arg(long)]
    expect: Option<String>,
    a: String,
    b: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtractMode {
    Egonet,
    Rw,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long, value_enum, default_value_t = ExtractMode::Egonet)]
    mode: ExtractMode,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = gnnak_core::extract::DEFAULT_WALK_LEN)]
    walk_len: usize,
    #[arg(long, default_value_t = gnnak_core::extract::DEFAULT_WALK_REPEATS)]
    repeats: usize,
    /// Return parameter of the biased walk.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// In-out parameter of the biased walk.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    graph: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Random,
    Farthest,
    Mincover,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Random => Strategy::Random,
            StrategyArg::Farthest => Strategy::Farthest,
            StrategyArg::Mincover => Strategy::MinSetCover,
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Mincover)]
    strategy: StrategyArg,
    /// Required coverage per node.
    #[arg(long = "R", visible_alias = "r", default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    first_root: Option<usize>,
    graph: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Ak,
    #[value(name = "ak+")]
    AkPlus,
}

#[derive(Clone, Copy, ValueEnum)]
enum PoolArg {
    Sum,
    Mean,
}

impl From<PoolArg> for Pool {
    fn from(p: PoolArg) -> Pool {
        match p {
            PoolArg::Sum => Pool::Sum,
            PoolArg::Mean => Pool::Mean,
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Ak)]
    mode: ModeArg,
    /// Outer layers.
    #[arg(long = "L", visible_alias = "layers", default_value_t = 2)]
    outer: usize,
    /// Inner GIN layers.
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 32)]
    hidden: usize,
    /// Width of the one-hot label features.
    #[arg(long, default_value_t = 8)]
    input_dim: usize,
    #[arg(long, value_enum, default_value_t = PoolArg::Sum)]
    pool: PoolArg,
    #[arg(long, value_enum, default_value_t = PoolArg::Sum)]
    graph_pool: PoolArg,
    /// Encode only a sampled set of subgraphs with this coverage.
    #[arg(long = "R")]
    r: Option<usize>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Mincover)]
    strategy: StrategyArg,
}

impl ModelArgs {
    fn config(&self) -> ForwardConfig {
        ForwardConfig {
            outer_layers: self.outer,
            inner_layers: self.t,
            k: self.k,
            mode: match self.mode {
                ModeArg::Ak => Mode::Ak,
                ModeArg::AkPlus => Mode::AkPlus,
            },
            pool: self.pool.into(),
            graph_pool: self.graph_pool.into(),
            hidden: self.hidden,
            input_dim: self.input_dim,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Circulant,
    Srg16,
    Cfi,
    Er,
    Regular,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Petersen,
    K4,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    /// Circulant offsets, comma separated.
    #[arg(long, value_delimiter = ',')]
    offsets: Vec<usize>,
    /// Offsets of a second circulant written as the `_b` graph.
    #[arg(long, value_delimiter = ',')]
    offsets_b: Vec<usize>,
    /// Base graph of the CFI construction.
    #[arg(long, value_enum, default_value_t = BaseArg::Petersen)]
    base: BaseArg,
    /// Edge probability for `er`.
    #[arg(long)]
    p: Option<f64>,
    /// Degree for `regular`.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
    k: Vec<usize>,
    /// Timed repetitions per graph and k.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(required = true)]
    graphs: Vec<String>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Format(_)
            | Error::SelfLoop(_)
            | Error::DuplicateEdge(..)
            | Error::NodeOutOfRange { .. } => 3,
            Error::Internal(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 3,
        msg: format!("{}: {e}", path.display()),
    }
}

type CmdResult = Result<u8, Failure>;

struct Output<'a> {
    global: &'a Global,
}

impl Output<'_> {
    fn write(&self, text: &str) -> Result<(), Failure> {
        match &self.global.out {
            Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| io_failure(Path::new("<stdout>"), e))
            }
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable output");
        text.push('\n');
        self.write(&text)
    }

    fn csv<T: Serialize>(&self, rows: &[T]) -> Result<(), Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)
                .map_err(|e| usage(format!("csv output: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| usage(format!("csv output: {e}")))?;
        self.write(&String::from_utf8(bytes).expect("csv writer emits utf-8"))
    }

    /// JSON of `value`, or CSV of `rows` when requested.
    fn emit<T: Serialize, R: Serialize>(&self, value: &T, rows: &[R]) -> Result<(), Failure> {
        match self.global.format {
            Format::Json => self.json(value),
            Format::Csv => self.csv(rows),
        }
    }

    fn json_only<T: Serialize>(&self, cmd: &str, value: &T) -> Result<(), Failure> {
        match self.global.format {
            Format::Json => self.json(value),
            Format::Csv => Err(usage(format!("{cmd} has no csv output"))),
        }
    }
}

#[derive(Serialize)]
struct WlTestOutput {
    method: String,
    fingerprint_a: String,
    fingerprint_b: String,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<Verdict>,
    seed: u64,
}

fn wl_test(args: &WlTestArgs, out: &Output) -> CmdResult {
    let seed = out.global.seed;
    let mut spec = args.method.clone();
    if args.method != "1wl" {
        spec.push_str(&format!(" k={}", args.k));
        if let Some(d) = args.depth {
            spec.push_str(&format!(" depth={d}"));
        }
        if args.no_root_mark {
            spec.push_str(" no-root-mark");
        }
    }
    if let Some(t) = args.iters {
        spec.push_str(&format!(" iters={t}"));
    }
    let method = parse_method(&spec)?;
    let expected = args.expect.as_deref().map(parse_verdict).transpose()?;
    let a = resolve_source(&args.a, seed)?;
    let b = resolve_source(&args.b, seed)?;
    let (fa, fb) = (fingerprint(&a, &method)?, fingerprint(&b, &method)?);
    let verdict = if a.n() != b.n() || fa != fb {
        Verdict::NonIsomorphic
    } else {
        Verdict::Undecided
    };
    let result = WlTestOutput {
        method: spec,
        fingerprint_a: fa.hex(),
        fingerprint_b: fb.hex(),
        verdict,
        expected,
        seed,
    };
    out.emit(&result, std::slice::from_ref(&result))?;
    Ok(u8::from(expected.is_some_and(|e| e != verdict)))
}

#[derive(Serialize)]
struct SuiteRow<'a> {
    entry: usize,
    a: &'a str,
    b: Option<&'a str>,
    method: &'a str,
    fingerprint_a: &'a str,
    fingerprint_b: Option<&'a str>,
    verdict: Option<Verdict>,
    expected: Option<Verdict>,
    passed: Option<bool>,
    seed: u64,
    elapsed_ms: f64,
}

fn distinguish_suite(manifest: &Path, out: &Output) -> CmdResult {
    let command: Vec<String> = std::env::args().collect();
    let report = run_manifest_file(manifest, out.global.seed, command)?;
    let rows: Vec<SuiteRow> = report
        .records
        .iter()
        .map(|r| SuiteRow {
            entry: r.entry,
            a: &r.a,
            b: r.b.as_deref(),
            method: &r.method,
            fingerprint_a: &r.fingerprint_a,
            fingerprint_b: r.fingerprint_b.as_deref(),
            verdict: r.verdict,
            expected: r.expected,
            passed: r.passed,
            seed: r.seed,
            elapsed_ms: r.elapsed_ms,
        })
        .collect();
    out.emit(&report, &rows)?;
    Ok(u8::from(!report.summary.passed))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn extract(args: &ExtractArgs, out: &Output) -> CmdResult {
    if out.global.format == Format::Csv {
        return Err(usage(
            "extract writes edge-list blocks; csv is not available",
        ));
    }
    let g = resolve_source(&args.graph, out.global.seed)?;
    let union: UnionGraph = match args.mode {
        ExtractMode::Egonet => extract_all_egonets(&g, args.k)?,
        ExtractMode::Rw => {
            let policy = WalkPolicy::new(args.p, args.q)?;
            extract_all_rw(&g, args.walk_len, args.repeats, out.global.seed, &policy)?
        }
    };
    let mut text = String::new();
    for c in &union.components {
        text.push_str(&format!("# root={} d2c={}\n", c.root(), join(&c.d2c)));
        text.push_str(&format!("# nodes={}\n", join(&c.parent_ids)));
        text.push_str(&to_edge_list(&c.graph));
        text.push('\n');
    }
    out.write(&text)?;
    Ok(0)
}

#[derive(Serialize)]
struct SampleOutput {
    roots: Vec<usize>,
    coverage: Vec<usize>,
    layers: Vec<Vec<usize>>,
    full_coverage: Vec<usize>,
    flagged: bool,
    seed: u64,
}

fn sample_cmd(args: &SampleArgs, out: &Output) -> CmdResult {
    let seed = out.global.seed;
    let g = resolve_source(&args.graph, seed)?;
    let union = extract_all_egonets(&g, args.k)?;
    let mut cfg = SampleConfig::new(args.r, args.strategy.into(), seed);
    if let Some(v) = args.first_root {
        cfg = cfg.starting_at(v);
    }
    let plan = sample(&g, &union, &cfg)?;
    out.json_only(
        "sample",
        &SampleOutput {
            roots: plan.selected_roots,
            coverage: plan.coverage,
            layers: plan.layers,
            full_coverage: plan.full_coverage,
            flagged: plan.flagged,
            seed,
        },
    )?;
    Ok(0)
}

fn embedding(g: &Graph, model: &ModelArgs, seed: u64) -> Result<Vec<f64>, Failure> {
    let w = WeightBundle::new(seed, &model.config())?;
    let emb = match model.r {
        None => forward(g, &w)?,
        Some(r) => {
            let union = extract_all_egonets(g, model.k)?;
            let plan = sample(
                g,
                &union,
                &SampleConfig::new(r, model.strategy.into(), seed),
            )?;
            forward_with_plan(g, &w, &plan)?
        }
    };
    Ok(emb.to_vec())
}

fn embed(model: &ModelArgs, graph: &str, out: &Output) -> CmdResult {
    let seed = out.global.seed;
    let emb = embedding(&resolve_source(graph, seed)?, model, seed)?;
    match out.global.format {
        Format::Json => out.json(&emb)?,
        Format::Csv => out.write(&format!("{}\n", join(&emb)))?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct PairOutput {
    embedding_a: Vec<f64>,
    embedding_b: Vec<f64>,
    max_abs_diff: f64,
    separated: bool,
    seed: u64,
}

fn embed_pair(model: &ModelArgs, a: &str, b: &str, out: &Output) -> CmdResult {
    let seed = out.global.seed;
    let ea = embedding(&resolve_source(a, seed)?, model, seed)?;
    let eb = embedding(&resolve_source(b, seed)?, model, seed)?;
    let diff = max_abs_diff(&ea.clone().into(), &eb.clone().into());
    out.json_only(
        "embed-pair",
        &PairOutput {
            embedding_a: ea,
            embedding_b: eb,
            max_abs_diff: diff,
            separated: diff > SEPARATION_THRESHOLD,
            seed,
        },
    )?;
    Ok(0)
}

fn count(motif: &str, graph: &str, out: &Output) -> CmdResult {
    let g = resolve_source(graph, out.global.seed)?;
    let counts: Vec<MotifCount> = if motif == "all" {
        count_all_motifs(&g)
    } else {
        let m = Motif::parse(motif).ok_or_else(|| {
            usage(format!(
                "unknown motif {motif:?}; expected all, triangle, tailed_triangle, star3 or cycle4"
            ))
        })?;
        vec![count_motif(&g, m)]
    };
    out.emit(&counts, &counts)?;
    Ok(0)
}

#[derive(Serialize)]
struct PropsOutput {
    n: usize,
    m: usize,
    is_connected: bool,
    diameter: Option<usize>,
    radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eccentricities: Option<Vec<usize>>,
}

fn props(graph: &str, out: &Output) -> CmdResult {
    let g = resolve_source(graph, out.global.seed)?;
    let p = graph_properties(&g);
    let result = PropsOutput {
        n: g.n(),
        m: g.m(),
        is_connected: p.is_connected,
        diameter: p.diameter().ok(),
        radius: p.radius().ok(),
        eccentricities: p.eccentricities.clone(),
    };
    match out.global.format {
        Format::Json => out.json(&result)?,
        Format::Csv => {
            let row = PropsOutput {
                eccentricities: None,
                ..result
            };
            out.csv(&[row])?
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct GeneratedFile {
    path: String,
    n: usize,
    m: usize,
}

fn generate(args: &GenerateArgs, out: &Output) -> CmdResult {
    let seed = out.global.seed;
    let prefix = out
        .global
        .out
        .as_ref()
        .ok_or_else(|| usage("generate needs --out <prefix>"))?;
    let need =
        |v: Option<usize>, name: &str| v.ok_or_else(|| usage(format!("--{name} is required")));
    let graphs: Vec<(&str, Graph)> = match args.family {
        Family::Circulant => {
            let n = need(args.n, "n")?;
            if args.offsets.is_empty() {
                return Err(usage("--offsets is required"));
            }
            let a = generators::circulant(n, &args.offsets)?;
            if args.offsets_b.is_empty() {
                vec![("", a)]
            } else {
                vec![
                    ("_a", a),
                    ("_b", generators::circulant(n, &args.offsets_b)?),
                ]
            }
        }
        Family::Srg16 => {
            let (a, b) = generators::srg_pair();
            vec![("_a", a), ("_b", b)]
        }
        Family::Cfi => {
            let base = match args.base {
                BaseArg::Petersen => generators::petersen(),
                BaseArg::K4 => generators::complete(4),
            };
            let pair = generators::cfi_pair(&base)?;
            vec![("_a", pair.a), ("_b", pair.b)]
        }
        Family::Er => {
            let p = args.p.ok_or_else(|| usage("--p is required"))?;
            vec![("", generators::random_graph(need(args.n, "n")?, p, seed)?)]
        }
        Family::Regular => {
            let g = generators::random_regular(need(args.n, "n")?, need(args.d, "d")?, seed)?;
            vec![("", g)]
        }
    };
    let mut written = Vec::new();
    for (suffix, g) in &graphs {
        let mut name = prefix.as_os_str().to_owned();
        name.push(format!("{suffix}.el"));
        let path = PathBuf::from(name);
        std::fs::write(&path, to_edge_list(g)).map_err(|e| io_failure(&path, e))?;
        written.push(GeneratedFile {
            path: path.display().to_string(),
            n: g.n(),
            m: g.m(),
        });
    }
    // `--out` names the files, so the listing goes to stdout.
    let stdout = Output {
        global: &Global {
            out: None,
            ..*out.global
        },
    };
    stdout.emit(&written, &written)?;
    Ok(0)
}

#[derive(Serialize)]
struct BenchRow {
    graph: String,
    n: usize,
    m: usize,
    k: usize,
    union_nodes: usize,
    union_edges: usize,
    blowup: f64,
    bfs_relaxations: usize,
    elapsed_ms: f64,
    edges_per_second: f64,
    seed: u64,
}

fn bench(args: &BenchArgs, out: &Output) -> CmdResult {
    let seed = out.global.seed;
    let repeats = args.repeats.max(1);
    let mut rows = Vec::new();
    for spec in &args.graphs {
        let g = resolve_source(spec, seed)?;
        for &k in &args.k {
            let start = Instant::now();
            let mut union = extract_all_egonets(&g, k)?;
            for _ in 1..repeats {
                union = extract_all_egonets(&g, k)?;
            }
            let secs = start.elapsed().as_secs_f64() / repeats as f64;
            rows.push(BenchRow {
                graph: spec.clone(),
                n: g.n(),
                m: g.m(),
                k,
                union_nodes: union.total_nodes,
                union_edges: union.total_edges,
                blowup: union.blowup(),
                bfs_relaxations: union.bfs_relaxations,
                elapsed_ms: secs * 1e3,
                edges_per_second: union.total_edges as f64 / secs.max(1e-9),
                seed,
            });
        }
    }
    out.emit(&rows, &rows)?;
    Ok(0)
}

fn run(cli: &Cli) -> CmdResult {
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    let out = Output {
        global: &cli.global,
    };
    match &cli.command {
        Command::WlTest(args) => wl_test(args, &out),
        Command::DistinguishSuite { manifest } => distinguish_suite(manifest, &out),
        Command::Extract(args) => extract(args, &out),
        Command::Sample(args) => sample_cmd(args, &out),
        Command::Embed { model, graph } => embed(model, graph, &out),
        Command::EmbedPair { model, a, b } => embed_pair(model, a, b, &out),
        Command::Count { motif, graph } => count(motif, graph, &out),
        Command::Props { graph } => props(graph, &out),
        Command::Generate(args) => generate(args, &out),
        Command::Bench(args) => bench(args, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("gnnak: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
