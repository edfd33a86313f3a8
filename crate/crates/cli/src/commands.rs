use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use edgegame::adversary::{Bob, BobKind, BobPolicy};
use edgegame::engine::{play, AlicePolicy, Outcome, PlayOptions};
use edgegame::oracle::{self, SolveConfig};
use edgegame::random::{balanced_order, random_order, random_tree};
use edgegame::strategy::Priority;
use edgegame::verify::verify_all;
use edgegame::{DecrementalForest, Forest, GameConfig, Player, StrategyConfig, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Bad input supplied by the caller; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_STUCK: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "edgegame", version, about = "Edge-colouring game on trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Play seeded games of Alice's strategy against a Bob policy.
    Simulate(SimulateArgs),
    /// Check the strategy against every Bob line on all small trees.
    VerifyExhaustive(VerifyArgs),
    /// Exact game value for a small tree.
    Solve(SolveArgs),
    /// Game chromatic index of a small tree.
    Index(IndexArgs),
    /// Count (or list) unlabelled trees.
    Enumerate(EnumerateArgs),
    /// Time a full deletion sequence on the decremental forest.
    BenchDecr(BenchArgs),
    /// Run the HTTP game service.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Tree file; without it each game uses a fresh random tree.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Vertices of the random trees.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Degree cap of the random trees.
    #[arg(long, default_value_t = 4)]
    pub delta: usize,
    /// Colours; defaults to Δ + 1.
    #[arg(long)]
    pub k: Option<u8>,
    #[arg(long, default_value = "random", value_parser = parse_bob)]
    pub bob: BobKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub games: u64,
    #[arg(long, default_value = "alice")]
    pub first: Player,
    #[arg(long)]
    pub no_skip: bool,
    /// Let Alice play on trees with Δ outside 4..=5.
    #[arg(long)]
    pub best_effort: bool,
    /// `star-first` or `small-first`.
    #[arg(long, default_value = "star-first")]
    pub priority: Priority,
    /// JSON-lines trace of every game, written one after another.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    pub max_edges: usize,
    #[arg(long, value_delimiter = ',', default_value = "4,5")]
    pub delta: Vec<usize>,
    #[arg(long)]
    pub no_skip: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Allow Bob to skip.
    #[arg(long)]
    pub skip: bool,
    #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[arg(long)]
    pub tree: PathBuf,
    /// Forbid Bob from skipping.
    #[arg(long)]
    pub no_skip: bool,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    /// Largest vertex count.
    #[arg(long)]
    pub n: usize,
    /// Keep only trees with this maximum degree.
    #[arg(long)]
    pub delta: Option<usize>,
    /// Print the trees as edge lists too.
    #[arg(long)]
    pub list: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Baseline,
    TwoLevel,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OrderArg {
    Random,
    /// Cuts that split components as evenly as possible.
    Adversarial,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "random")]
    pub order: OrderArg,
    /// Deletion sequence file, one edge id per line; overrides --order.
    #[arg(long)]
    pub sequence: Option<PathBuf>,
    /// Tree file; without it a random tree with degrees ≤ 5 is used.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
}

fn parse_bob(s: &str) -> Result<BobKind, String> {
    s.parse()
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn read_tree(path: &Path) -> Result<Forest> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Forest::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialise"));
}

/// Runs a subcommand and returns the process exit status.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::VerifyExhaustive(a) => verify(a),
        Command::Solve(a) => solve(a),
        Command::Index(a) => index(a),
        Command::Enumerate(a) => enumerate(a),
        Command::BenchDecr(a) => bench(a),
        Command::Serve(a) => serve(a),
    }
}

fn simulate(a: SimulateArgs) -> Result<u8> {
    let fixed = a.tree.as_deref().map(read_tree).transpose()?.map(Arc::new);
    let mut trace_out = match &a.trace {
        Some(p) => Some(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => None,
    };
    let alice = AlicePolicy::Strategy(StrategyConfig { best_effort: a.best_effort, priority: a.priority });
    let mut games = Vec::new();
    let (mut wins, mut stuck) = (0, 0);
    for i in 0..a.games {
        let seed = a.seed + i;
        let forest = match &fixed {
            Some(f) => f.clone(),
            None => Arc::new(random_tree(a.n, a.delta, &mut ChaCha8Rng::seed_from_u64(seed))),
        };
        let mut config = GameConfig { first_player: a.first, bob_may_skip: !a.no_skip, ..GameConfig::for_forest(&forest) };
        if let Some(k) = a.k {
            config.k = k;
        }
        let mut bob = Bob::new(BobPolicy::new(a.bob, seed));
        let t = Instant::now();
        let opts = PlayOptions { keep_moves: trace_out.is_some(), ..Default::default() };
        let mut trace = play(forest.clone(), config, &mut bob, alice, opts);
        let is_stuck = matches!(&trace.outcome, Outcome::Aborted { reason } if reason.contains("no feasible colour"));
        if is_stuck && trace.moves.is_empty() {
            // replay with the full move list so the dump is useful
            let mut bob = Bob::new(BobPolicy::new(a.bob, seed));
            trace = play(forest.clone(), config, &mut bob, alice, PlayOptions::full());
        }
        if is_stuck {
            stuck += 1;
            trace.write_jsonl(std::io::stderr().lock())?;
        }
        if let Some(out) = trace_out.as_mut() {
            trace.write_jsonl(&mut *out)?;
        }
        wins += usize::from(trace.outcome == Outcome::AliceWins);
        games.push(json!({
            "seed": seed,
            "n": forest.vertex_count(),
            "delta": forest.delta(),
            "k": config.k,
            "outcome": trace.outcome,
            "stats": trace.stats,
            "seconds": t.elapsed().as_secs_f64(),
        }));
    }
    if let Some(mut out) = trace_out {
        out.flush()?;
    }
    print_json(&json!({ "games": a.games, "alice_wins": wins, "strategy_stuck": stuck, "results": games }));
    Ok(if stuck > 0 { EXIT_STUCK } else { 0 })
}

fn verify(a: VerifyArgs) -> Result<u8> {
    if a.max_edges > oracle::DEFAULT_CAP {
        return Err(usage(format!("--max-edges above {} is out of reach", oracle::DEFAULT_CAP)));
    }
    let mut results = Vec::new();
    let (mut clean, mut stuck) = (true, false);
    for &delta in &a.delta {
        let t = Instant::now();
        let rep = verify_all(a.max_edges, delta, !a.no_skip, &StrategyConfig::default())?;
        clean &= rep.clean();
        stuck |= rep.strategy_stuck > 0;
        results.push(json!({ "delta": delta, "report": rep, "seconds": t.elapsed().as_secs_f64() }));
    }
    let verdict = if clean { "all branches AliceWins" } else { "some branch failed" };
    print_json(&json!({ "max_edges": a.max_edges, "verdict": verdict, "results": results }));
    Ok(match (stuck, clean) {
        (true, _) => EXIT_STUCK,
        (false, true) => 0,
        (false, false) => 1,
    })
}

fn solve(a: SolveArgs) -> Result<u8> {
    let f = read_tree(&a.tree)?;
    let mut out = serde_json::Map::new();
    for first in [Player::Alice, Player::Bob] {
        let cfg = SolveConfig { cap: a.cap, ..SolveConfig::new(a.k, first, a.skip) };
        let w = oracle::solve(&f, &cfg).map_err(|e| usage(e.to_string()))?;
        out.insert(format!("{first:?}_first").to_lowercase(), json!(w));
    }
    out.insert("k".into(), json!(a.k));
    out.insert("bob_may_skip".into(), json!(a.skip));
    print_json(&out.into());
    Ok(0)
}

fn index(a: IndexArgs) -> Result<u8> {
    let f = read_tree(&a.tree)?;
    let k = oracle::game_chromatic_index(&f, !a.no_skip).map_err(|e| usage(e.to_string()))?;
    println!("{k}");
    Ok(0)
}

fn enumerate(a: EnumerateArgs) -> Result<u8> {
    let mut counts = Vec::new();
    let mut trees = Vec::new();
    for n in 1..=a.n {
        let level: Vec<Forest> = oracle::trees_with_n_vertices(n).into_iter().filter(|t| a.delta.is_none_or(|d| t.delta() == d)).collect();
        counts.push(json!({ "n": n, "count": level.len() }));
        if a.list {
            trees.extend(level.iter().map(|t| json!({ "n": n, "edges": t.edges() })));
        }
    }
    let mut out = json!({ "delta": a.delta, "counts": counts });
    if a.list {
        out["trees"] = json!(trees);
    }
    print_json(&out);
    Ok(0)
}

fn read_sequence(path: &Path, m: usize) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut seq = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let e: usize = line.trim().parse().map_err(|_| usage(format!("{}:{}: bad edge id", path.display(), i + 1)))?;
        if e >= m {
            return Err(usage(format!("{}:{}: edge {e} out of range", path.display(), i + 1)));
        }
        seq.push(e);
    }
    Ok(seq)
}

fn bench(a: BenchArgs) -> Result<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let f = match &a.tree {
        Some(p) => read_tree(p)?,
        None => {
            if a.n == 0 {
                return Err(usage("--n must be positive"));
            }
            random_tree(a.n, 5, &mut rng)
        }
    };
    let (order, order_name) = match (&a.sequence, a.order) {
        (Some(p), _) => (read_sequence(p, f.edge_count())?, "file"),
        (None, OrderArg::Random) => (random_order(f.edge_count(), &mut rng), "random"),
        (None, OrderArg::Adversarial) => (balanced_order(&f), "adversarial"),
    };
    let variants: &[Variant] = match a.variant {
        VariantArg::Baseline => &[Variant::Baseline],
        VariantArg::TwoLevel => &[Variant::TwoLevel],
        VariantArg::Both => &[Variant::Baseline, Variant::TwoLevel],
    };
    let n = f.vertex_count() as f64;
    let lg = n.log2().max(1.0);
    let mut rows = Vec::new();
    for &variant in variants {
        let t = Instant::now();
        let mut df = DecrementalForest::new(&f, variant);
        for &e in &order {
            if let Err(err) = df.delete_edge_id(e) {
                bail!(UsageError(format!("deletion sequence: {err}")));
            }
        }
        let secs = t.elapsed().as_secs_f64();
        let c = df.counters();
        let bound = match variant {
            Variant::Baseline => n * lg,
            Variant::TwoLevel => 4.0 * n * lg.log2().max(1.0) + 8.0 * n,
        };
        rows.push(json!({
            "variant": variant,
            "order": order_name,
            "n": f.vertex_count(),
            "deletions": c.deletions,
            "relabels": c.relabels,
            "micro_relabels": c.micro_relabels,
            "macro_relabels": c.macro_relabels,
            "traversal_steps": c.traversal_steps,
            "bound": bound,
            "within_bound": c.relabels as f64 <= bound,
            "seconds": secs,
        }));
    }
    print_json(&json!(rows));
    Ok(0)
}

fn serve(a: ServeArgs) -> Result<u8> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let addr = format!("{}:{}", a.host, a.port);
        let listener = tokio::net::TcpListener::bind(&addr).await.with_context(|| format!("binding {addr}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, crate::server::router()).await?;
        Ok(0)
    })
}
