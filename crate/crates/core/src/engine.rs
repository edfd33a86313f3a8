//! Turn orchestration, invariant reports and game traces.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adversary::Bob;
use crate::component::{self, ComponentView};
use crate::decremental::Label;
use crate::error::MoveError;
use crate::forest::{EdgeId, Forest, Vertex};
use crate::game::{Action, Colour, GameConfig, GameState, Player, Winner};
use crate::strategy::{choose_move, CaseTag, StrategyConfig, StrategyDecision};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub label: Label,
    pub x: usize,
    pub star_like: bool,
    #[serde(rename = "S_ok")]
    pub s_ok: bool,
    #[serde(rename = "M_ok")]
    pub m_ok: bool,
    pub gamma: Option<usize>,
    pub unmatched: usize,
    pub colours: usize,
    pub relevant: bool,
    pub base_nodes: Vec<Vertex>,
}

impl From<&ComponentView> for ComponentSummary {
    fn from(v: &ComponentView) -> Self {
        Self {
            label: v.label,
            x: v.x,
            star_like: v.star_like(),
            s_ok: v.s_ok,
            m_ok: v.m_ok,
            gamma: v.gamma(),
            unmatched: v.unmatched_count(),
            colours: v.colours_present.len(),
            relevant: v.relevant(),
            base_nodes: v.base_nodes.clone(),
        }
    }
}

/// Components touched by a move plus whole-state tallies.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub components: Vec<ComponentSummary>,
    pub s_violations: usize,
    pub m_violations: usize,
    /// Components with more than two unmatched edges.
    pub remark1_violations: usize,
    /// Components satisfying (S) with more than `Δ` coloured edges.
    pub lemma1_violations: usize,
    /// Components with three coloured edges failing (S) or (M).
    pub lemma3_violations: usize,
    /// Most distinct colours in any live component.
    pub max_colours: usize,
}

impl InvariantReport {
    /// The state after an Alice move: (S), (M), at most two unmatched edges,
    /// and at most `Δ - 1` colours in every unfinished component.
    pub fn post_alice_ok(&self, delta: usize) -> bool {
        self.s_violations == 0 && self.m_violations == 0 && self.remark1_violations == 0 && self.lemmas_ok() && self.max_colours < delta
    }

    pub fn post_bob_ok(&self, delta: usize) -> bool {
        self.lemmas_ok() && self.max_colours <= delta
    }

    pub fn lemmas_ok(&self) -> bool {
        self.lemma1_violations == 0 && self.lemma3_violations == 0
    }
}

/// Report on the components created by the last colouring, using the
/// incrementally maintained tallies.
pub fn report(state: &GameState) -> InvariantReport {
    let t = state.tally();
    let b = state.buckets();
    InvariantReport {
        components: state.last_touched().iter().filter_map(|&l| state.component(l)).map(|c| ComponentSummary::from(&c.view)).collect(),
        s_violations: b.s_bad.len(),
        m_violations: b.m_bad.len(),
        remark1_violations: t.remark1_violations,
        lemma1_violations: t.lemma1_violations,
        lemma3_violations: t.lemma3_violations,
        max_colours: t.max_colours(),
    }
}

/// From-scratch report over every component, rebuilt from the colouring by
/// plain traversal (no decremental labels, no cached views).
pub fn full_report(state: &GameState) -> InvariantReport {
    let forest = state.forest();
    let delta = forest.delta();
    let mut rep = InvariantReport::default();
    for (i, leaves) in scratch_components(state).into_iter().enumerate() {
        let v = component::view(i as Label, &leaves, true, forest, state.lca(), state.colours());
        rep.s_violations += usize::from(!v.s_ok);
        rep.m_violations += usize::from(!v.m_ok);
        rep.remark1_violations += usize::from(v.unmatched_count() > 2);
        rep.lemma1_violations += usize::from(v.s_ok && v.x > delta);
        rep.lemma3_violations += usize::from(v.x == 3 && !(v.s_ok && v.m_ok));
        rep.max_colours = rep.max_colours.max(v.colours_present.len());
        rep.components.push(ComponentSummary::from(&v));
    }
    rep
}

/// Coloured-leaf lists of every live component, found by traversing the
/// forest minus its coloured edges. Ordered by smallest vertex.
pub fn scratch_components(state: &GameState) -> Vec<Vec<component::ColouredLeaf>> {
    let forest = state.forest();
    let n = forest.vertex_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] || state.uncoloured_degree(s) == 0 {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut leaves = Vec::new();
        while let Some(x) = stack.pop() {
            for &e in forest.incident(x) {
                if state.colour_of(e).is_some() {
                    leaves.push(component::ColouredLeaf { edge: e, attach: x });
                    continue;
                }
                let y = forest.other_end(e, x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        leaves.sort_unstable();
        out.push(leaves);
    }
    out
}

/// Cross-checks the incremental bookkeeping against a from-scratch rebuild.
pub fn audit(state: &GameState) -> Result<(), String> {
    let mut scratch = scratch_components(state);
    scratch.sort();
    let mut live: Vec<Vec<component::ColouredLeaf>> = state
        .components()
        .map(|c| {
            let mut l = c.leaves.clone();
            l.sort_unstable();
            l
        })
        .collect();
    live.sort();
    if scratch != live {
        return Err(format!("component leaf lists differ: incremental {live:?} vs scratch {scratch:?}"));
    }
    for c in state.components() {
        let fresh = component::view(c.label, &c.leaves, true, state.forest(), state.lca(), state.colours());
        if fresh != c.view {
            return Err(format!("cached view of component {} is stale", c.label));
        }
        for leaf in &c.leaves {
            if state.decremental().find(leaf.attach) != c.label {
                return Err(format!("leaf {leaf:?} is filed under the wrong label"));
            }
        }
    }
    let inc = report(state);
    let full = full_report(state);
    let strip = |r: &InvariantReport| InvariantReport { components: Vec::new(), ..r.clone() };
    if strip(&inc) != strip(&full) {
        return Err(format!("tallies differ: incremental {:?} vs scratch {:?}", strip(&inc), strip(&full)));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub move_no: usize,
    pub player: Player,
    pub action: Action,
    pub decision: Option<StrategyDecision>,
    pub report: InvariantReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Outcome {
    AliceWins,
    BobWins { dead_edges: Vec<EdgeId> },
    Aborted { reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlicePolicy {
    Strategy(StrategyConfig),
    /// Smallest uncoloured edge, smallest feasible colour.
    Greedy,
}

impl Default for AlicePolicy {
    fn default() -> Self {
        AlicePolicy::Strategy(StrategyConfig::default())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub forest_hash: String,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    pub config: GameConfig,
    pub alice: AlicePolicy,
    pub bob: String,
}

/// Per-game measurements used by the stress and complexity checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameStats {
    pub alice_moves: usize,
    pub bob_moves: usize,
    pub bob_skips: usize,
    pub max_queries_per_alice_move: u64,
    pub max_leaf_ops_per_alice_move: u64,
    pub max_colours_after_alice: usize,
    pub max_colours_after_bob: usize,
    pub post_alice_failures: usize,
    pub post_bob_failures: usize,
    pub lemma1_violations: usize,
    pub lemma3_violations: usize,
    pub max_leaves_seen: usize,
    pub cases: BTreeMap<String, usize>,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTrace {
    pub header: TraceHeader,
    pub moves: Vec<MoveRecord>,
    pub outcome: Outcome,
    pub stats: GameStats,
}

impl GameTrace {
    /// JSON lines: a header object, one object per move, a footer with the outcome.
    pub fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        let header = serde_json::json!({ "type": "header", "config": self.header });
        writeln!(out, "{header}")?;
        for m in &self.moves {
            let (action, colour) = match m.action {
                Action::Colour { edge, colour } => (serde_json::json!({ "edge": edge }), Some(colour)),
                Action::Skip => (serde_json::json!("skip"), None),
            };
            let line = serde_json::json!({
                "type": "move",
                "move_no": m.move_no,
                "player": m.player,
                "action": action,
                "colour": colour,
                "case_tag": m.decision.map(|d| d.case_tag),
                "audit": m.decision.map(|d| d.audit),
                "report": m.report,
            });
            writeln!(out, "{line}")?;
        }
        let footer = serde_json::json!({ "type": "footer", "outcome": self.outcome, "stats": self.stats });
        writeln!(out, "{footer}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct PlayOptions {
    /// Keep every `MoveRecord` (large games may only want the stats).
    pub keep_moves: bool,
    /// Run the from-scratch audit after every move (small forests only).
    pub audit_every_move: bool,
}

impl PlayOptions {
    pub fn full() -> Self {
        Self { keep_moves: true, audit_every_move: false }
    }
}

/// Alice's next action under `policy`.
pub fn alice_action(state: &GameState, policy: &AlicePolicy) -> Result<(Action, Option<StrategyDecision>), String> {
    match policy {
        AlicePolicy::Strategy(cfg) => {
            let d = choose_move(state, cfg).map_err(|e| e.to_string())?;
            Ok((Action::Colour { edge: d.edge, colour: d.colour }, Some(d)))
        }
        AlicePolicy::Greedy => {
            let edge = *state.uncoloured_edges().iter().min().ok_or("no uncoloured edge")?;
            let colour: Colour = state.smallest_feasible(edge).ok_or("greedy edge has no feasible colour")?;
            Ok((Action::Colour { edge, colour }, None))
        }
    }
}

pub fn play(forest: Arc<Forest>, config: GameConfig, bob: &mut Bob, alice: AlicePolicy, opts: PlayOptions) -> GameTrace {
    let state = GameState::new(forest, config);
    play_from(state, bob, alice, opts)
}

pub fn play_from(mut state: GameState, bob: &mut Bob, alice: AlicePolicy, opts: PlayOptions) -> GameTrace {
    let forest = state.forest().clone();
    let delta = forest.delta();
    let header = TraceHeader {
        forest_hash: format!("{:016x}", forest.fingerprint()),
        n: forest.vertex_count(),
        m: forest.edge_count(),
        delta,
        config: *state.config(),
        alice,
        bob: bob.describe(),
    };
    let mut moves = Vec::new();
    let mut stats = GameStats::default();

    let outcome = loop {
        match state.winner() {
            Winner::AliceWins => break Outcome::AliceWins,
            Winner::BobWins => break Outcome::BobWins { dead_edges: state.dead_edges().iter().copied().collect() },
            Winner::Ongoing => {}
        }
        let player = state.turn();
        let queries_before = state.lca().query_count();
        let ops_before = state.leaf_ops();
        let (action, decision) = match player {
            Player::Alice => match alice_action(&state, &alice) {
                Ok(a) => a,
                Err(reason) => break Outcome::Aborted { reason: format!("Alice: {reason}") },
            },
            Player::Bob => match bob.next_move(&state) {
                Ok(a) => (a, None),
                Err(e) => break Outcome::Aborted { reason: format!("Bob: {e}") },
            },
        };
        if let Err(e) = state.make_move(player, action) {
            break Outcome::Aborted { reason: format!("{player:?} played an illegal move: {e}") };
        }
        let rep = report(&state);
        match player {
            Player::Alice => {
                stats.alice_moves += 1;
                stats.max_queries_per_alice_move = stats.max_queries_per_alice_move.max(state.lca().query_count() - queries_before);
                stats.max_leaf_ops_per_alice_move = stats.max_leaf_ops_per_alice_move.max(state.leaf_ops() - ops_before);
                stats.max_colours_after_alice = stats.max_colours_after_alice.max(rep.max_colours);
                if let Some(d) = decision {
                    *stats.cases.entry(format!("{:?}", d.case_tag)).or_default() += 1;
                }
                if !rep.post_alice_ok(delta) {
                    stats.post_alice_failures += 1;
                    stats.first_failure.get_or_insert_with(|| format!("after move {}: {rep:?}", state.move_no()));
                }
            }
            Player::Bob => {
                stats.bob_moves += 1;
                stats.bob_skips += usize::from(action == Action::Skip);
                stats.max_colours_after_bob = stats.max_colours_after_bob.max(rep.max_colours);
                if !rep.post_bob_ok(delta) {
                    stats.post_bob_failures += 1;
                    stats.first_failure.get_or_insert_with(|| format!("after move {}: {rep:?}", state.move_no()));
                }
            }
        }
        stats.lemma1_violations += rep.lemma1_violations;
        stats.lemma3_violations += rep.lemma3_violations;
        if opts.audit_every_move {
            if let Err(e) = audit(&state) {
                break Outcome::Aborted { reason: format!("audit failed: {e}") };
            }
        }
        if opts.keep_moves {
            moves.push(MoveRecord { move_no: state.move_no() - 1, player, action, decision, report: rep });
        }
    };
    stats.max_leaves_seen = state.tally().max_leaves_seen;
    GameTrace { header, moves, outcome, stats }
}

/// Re-applies recorded moves from the initial position and returns the
/// reports they produce.
pub fn replay(forest: Arc<Forest>, config: GameConfig, moves: &[MoveRecord]) -> Result<Vec<InvariantReport>, MoveError> {
    let mut state = GameState::new(forest, config);
    let mut out = Vec::with_capacity(moves.len());
    for m in moves {
        state.make_move(m.player, m.action)?;
        out.push(report(&state));
    }
    Ok(out)
}

/// Case tags in trace order, for quick inspection.
pub fn case_sequence(trace: &GameTrace) -> Vec<CaseTag> {
    trace.moves.iter().filter_map(|m| m.decision.map(|d| d.case_tag)).collect()
}
