//! Mutable game state: a partial proper edge colouring of the forest plus the
//! component partition induced by cutting every coloured edge.
//!
//! Colouring `uv` deletes it from the uncoloured forest and records a copy of
//! it as a coloured leaf in both resulting components (attached at `u` on one
//! side, at `v` on the other). A side that keeps no uncoloured edge is a single
//! fully coloured vertex and is retired.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::component::{self, ColouredLeaf, ComponentView};
use crate::decremental::{DecrementalForest, Label, Variant};
use crate::error::MoveError;
use crate::forest::{EdgeId, Forest, Vertex};
use crate::lca::LcaIndex;

pub type Colour = u8;

/// Largest supported colour count (colour sets are 64-bit masks).
pub const MAX_COLOURS: Colour = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    pub fn other(self) -> Self {
        match self {
            Player::Alice => Player::Bob,
            Player::Bob => Player::Alice,
        }
    }
}

impl std::str::FromStr for Player {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "alice" => Ok(Player::Alice),
            "bob" => Ok(Player::Bob),
            other => Err(format!("unknown player {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub k: Colour,
    pub first_player: Player,
    pub bob_may_skip: bool,
    pub variant: Variant,
}

impl GameConfig {
    /// `Δ + 1` colours, Alice first, Bob may skip.
    pub fn for_forest(forest: &Forest) -> Self {
        Self {
            k: (forest.delta() + 1).min(MAX_COLOURS as usize) as Colour,
            first_player: Player::Alice,
            bob_may_skip: true,
            variant: Variant::Baseline,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Colour { edge: EdgeId, colour: Colour },
    Skip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Ongoing,
    AliceWins,
    BobWins,
}

/// Ordering key of a component that depends only on the colouring:
/// smallest coloured leaf (edge id, attachment vertex), or for a component
/// without coloured edges its smallest edge id.
pub type ComponentKey = (EdgeId, Vertex);

#[derive(Clone, Debug)]
pub struct ComponentData {
    pub label: Label,
    pub leaves: Vec<ColouredLeaf>,
    pub view: ComponentView,
    pub key: ComponentKey,
    /// Unique base node of the component this one was split from, if it lies here.
    pub prior_base: Option<Vertex>,
}

#[derive(Clone, Debug, Default)]
pub struct Buckets {
    pub s_bad: BTreeSet<(ComponentKey, Label)>,
    pub m_bad: BTreeSet<(ComponentKey, Label)>,
    /// Relevant stars at the (M) limit with fewer than three coloured edges at
    /// the base; one more unmatched edge or base edge would break (M).
    pub tight: BTreeSet<(ComponentKey, Label)>,
    pub star_unmatched: BTreeSet<(ComponentKey, Label)>,
    pub star: BTreeSet<(ComponentKey, Label)>,
    pub x2: BTreeSet<(ComponentKey, Label)>,
    pub x1: BTreeSet<(ComponentKey, Label)>,
    pub x0: BTreeSet<(ComponentKey, Label)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Bucket {
    SBad,
    MBad,
    Tight,
    StarUnmatched,
    Star,
    X2,
    X1,
    X0,
}

impl Bucket {
    fn of(view: &ComponentView) -> Vec<Bucket> {
        let mut out = Vec::with_capacity(3);
        if !view.s_ok {
            out.push(Bucket::SBad);
        }
        if !view.m_ok {
            out.push(Bucket::MBad);
        }
        if view.star_like() {
            out.push(Bucket::Star);
            if view.unmatched_count() > 0 {
                out.push(Bucket::StarUnmatched);
            }
            if is_tight(view) {
                out.push(Bucket::Tight);
            }
        } else {
            match view.x {
                0 => out.push(Bucket::X0),
                1 => out.push(Bucket::X1),
                2 => out.push(Bucket::X2),
                _ => {}
            }
        }
        out
    }
}

fn is_tight(view: &ComponentView) -> bool {
    let (u, g) = (view.unmatched_count(), view.gamma().unwrap_or(0));
    view.relevant() && view.m_ok && u > 0 && g < 3 && u + g >= 3
}

impl Buckets {
    fn set_mut(&mut self, b: Bucket) -> &mut BTreeSet<(ComponentKey, Label)> {
        match b {
            Bucket::SBad => &mut self.s_bad,
            Bucket::MBad => &mut self.m_bad,
            Bucket::Tight => &mut self.tight,
            Bucket::StarUnmatched => &mut self.star_unmatched,
            Bucket::Star => &mut self.star,
            Bucket::X2 => &mut self.x2,
            Bucket::X1 => &mut self.x1,
            Bucket::X0 => &mut self.x0,
        }
    }
}

/// Whole-state invariant tallies, maintained incrementally.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalTally {
    pub components: usize,
    pub remark1_violations: usize,
    pub lemma1_violations: usize,
    pub lemma3_violations: usize,
    /// Number of live components by count of distinct colours present.
    pub colour_histogram: Vec<usize>,
    /// Largest coloured-leaf list ever observed.
    pub max_leaves_seen: usize,
}

impl GlobalTally {
    pub fn max_colours(&self) -> usize {
        self.colour_histogram.iter().rposition(|&c| c > 0).unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitOutcome {
    pub old_label: Label,
    /// `(endpoint, label, retired)` for the `u` side then the `v` side.
    pub sides: [(Vertex, Label, bool); 2],
    pub moved_leaves: usize,
}

#[derive(Clone, Debug)]
pub struct GameState {
    forest: Arc<Forest>,
    lca: Arc<LcaIndex>,
    config: GameConfig,
    colour: Vec<Colour>,
    uncoloured_deg: Vec<usize>,
    uncoloured: Vec<EdgeId>,
    uncoloured_pos: Vec<usize>,
    dsf: DecrementalForest,
    comps: HashMap<Label, ComponentData>,
    buckets: Buckets,
    tally: GlobalTally,
    dead: BTreeSet<EdgeId>,
    turn: Player,
    move_no: usize,
    last_coloured: Option<(Player, EdgeId)>,
    last_touched: Vec<Label>,
    leaf_ops: u64,
}

impl GameState {
    pub fn new(forest: Arc<Forest>, config: GameConfig) -> Self {
        let lca = Arc::new(LcaIndex::build(&forest));
        Self::with_index(forest, lca, config)
    }

    /// Shares a prebuilt index between games on the same forest.
    pub fn with_index(forest: Arc<Forest>, lca: Arc<LcaIndex>, config: GameConfig) -> Self {
        assert!(config.k <= MAX_COLOURS, "at most {MAX_COLOURS} colours are supported");
        let n = forest.vertex_count();
        let m = forest.edge_count();
        let dsf = DecrementalForest::new(&forest, config.variant);
        let mut state = Self {
            colour: vec![0; m],
            uncoloured_deg: (0..n).map(|v| forest.degree(v)).collect(),
            uncoloured: (0..m).collect(),
            uncoloured_pos: (0..m).collect(),
            dsf,
            comps: HashMap::new(),
            buckets: Buckets::default(),
            tally: GlobalTally { colour_histogram: vec![0; config.k as usize + 2], ..Default::default() },
            dead: BTreeSet::new(),
            turn: config.first_player,
            move_no: 0,
            last_coloured: None,
            last_touched: Vec::new(),
            leaf_ops: 0,
            forest,
            lca,
            config,
        };
        for tree in state.forest.components() {
            let Some(min_edge) = tree.iter().flat_map(|&v| state.forest.incident(v).iter().copied()).min() else {
                continue;
            };
            let label = state.dsf.find(tree[0]);
            let view = component::view(label, &[], true, &state.forest, &state.lca, &state.colour);
            let data = ComponentData { label, leaves: Vec::new(), view, key: (min_edge, usize::MAX), prior_base: None };
            state.insert_component(data);
        }
        state
    }

    pub fn forest(&self) -> &Arc<Forest> {
        &self.forest
    }

    pub fn lca(&self) -> &Arc<LcaIndex> {
        &self.lca
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn k(&self) -> Colour {
        self.config.k
    }

    pub fn turn(&self) -> Player {
        self.turn
    }

    pub fn move_no(&self) -> usize {
        self.move_no
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colour
    }

    pub fn colour_of(&self, e: EdgeId) -> Option<Colour> {
        (self.colour[e] != 0).then_some(self.colour[e])
    }

    pub fn uncoloured_edges(&self) -> &[EdgeId] {
        &self.uncoloured
    }

    pub fn uncoloured_count(&self) -> usize {
        self.uncoloured.len()
    }

    pub fn uncoloured_degree(&self, v: Vertex) -> usize {
        self.uncoloured_deg[v]
    }

    pub fn last_coloured(&self) -> Option<(Player, EdgeId)> {
        self.last_coloured
    }

    /// Labels of the live components created by the most recent colouring.
    pub fn last_touched(&self) -> &[Label] {
        &self.last_touched
    }

    pub fn component(&self, label: Label) -> Option<&ComponentData> {
        self.comps.get(&label)
    }

    pub fn components(&self) -> impl Iterator<Item = &ComponentData> {
        self.comps.values()
    }

    pub fn component_count(&self) -> usize {
        self.comps.len()
    }

    /// Live component containing the uncoloured edge `e`.
    pub fn component_of_edge(&self, e: EdgeId) -> Option<&ComponentData> {
        if self.colour[e] != 0 {
            return None;
        }
        self.comps.get(&self.dsf.find(self.forest.endpoints(e).0))
    }

    pub fn component_of_vertex(&self, v: Vertex) -> Option<&ComponentData> {
        self.comps.get(&self.dsf.find(v))
    }

    pub fn buckets(&self) -> &Buckets {
        &self.buckets
    }

    pub fn tally(&self) -> &GlobalTally {
        &self.tally
    }

    pub fn decremental(&self) -> &DecrementalForest {
        &self.dsf
    }

    /// Coloured-leaf list element operations so far.
    pub fn leaf_ops(&self) -> u64 {
        self.leaf_ops
    }

    pub fn dead_edges(&self) -> &BTreeSet<EdgeId> {
        &self.dead
    }

    fn used_mask(&self, v: Vertex) -> u64 {
        self.forest.incident(v).iter().fold(0u64, |m, &f| if self.colour[f] != 0 { m | 1 << self.colour[f] } else { m })
    }

    /// Colours in `1..=k` absent from every coloured edge at either endpoint.
    pub fn feasible_colours(&self, e: EdgeId) -> Vec<Colour> {
        let (u, v) = self.forest.endpoints(e);
        let used = self.used_mask(u) | self.used_mask(v);
        (1..=self.config.k).filter(|&c| used & (1 << c) == 0).collect()
    }

    pub fn smallest_feasible(&self, e: EdgeId) -> Option<Colour> {
        let (u, v) = self.forest.endpoints(e);
        let used = self.used_mask(u) | self.used_mask(v);
        (1..=self.config.k).find(|&c| used & (1 << c) == 0)
    }

    pub fn winner(&self) -> Winner {
        if self.uncoloured.is_empty() {
            Winner::AliceWins
        } else if !self.dead.is_empty() {
            Winner::BobWins
        } else {
            Winner::Ongoing
        }
    }

    pub fn validate_colouring(&self, e: EdgeId, colour: Colour) -> Result<(), MoveError> {
        if e >= self.colour.len() {
            return Err(MoveError::UnknownEdge(e));
        }
        if self.colour[e] != 0 {
            return Err(MoveError::EdgeAlreadyColoured(e));
        }
        if colour == 0 || colour > self.config.k {
            return Err(MoveError::ColourOutOfRange { colour, k: self.config.k });
        }
        let (u, v) = self.forest.endpoints(e);
        for w in [u, v] {
            if self.used_mask(w) & (1 << colour) != 0 {
                return Err(MoveError::ImproperColour { edge: e, colour, vertex: w, feasible: self.feasible_colours(e) });
            }
        }
        Ok(())
    }

    /// Turn-checked move. Skips are only accepted from Bob when allowed.
    pub fn make_move(&mut self, player: Player, action: Action) -> Result<Option<SplitOutcome>, MoveError> {
        if self.winner() != Winner::Ongoing {
            return Err(MoveError::GameOver);
        }
        if player != self.turn {
            return Err(MoveError::NotYourTurn { expected: self.turn });
        }
        let outcome = match action {
            Action::Skip => {
                if player != Player::Bob || !self.config.bob_may_skip {
                    return Err(MoveError::SkipNotAllowed);
                }
                self.last_touched.clear();
                None
            }
            Action::Colour { edge, colour } => {
                let out = self.apply_colouring(edge, colour)?;
                self.last_coloured = Some((player, edge));
                Some(out)
            }
        };
        self.turn = self.turn.other();
        self.move_no += 1;
        Ok(outcome)
    }

    /// Colours `e` and performs the component split. Does not touch the turn.
    pub fn apply_colouring(&mut self, e: EdgeId, colour: Colour) -> Result<SplitOutcome, MoveError> {
        self.validate_colouring(e, colour)?;
        let (u, v) = self.forest.endpoints(e);

        self.colour[e] = colour;
        self.uncoloured_deg[u] -= 1;
        self.uncoloured_deg[v] -= 1;
        let pos = self.uncoloured_pos[e];
        self.uncoloured.swap_remove(pos);
        if let Some(&moved) = self.uncoloured.get(pos) {
            self.uncoloured_pos[moved] = pos;
        }

        let old_label = self.dsf.find(u);
        let old = self.remove_component(old_label).expect("an uncoloured edge lies in a live component");
        self.dsf.delete_edge_id(e).expect("edge was uncoloured, hence undeleted");
        let labels = [self.dsf.find(u), self.dsf.find(v)];

        let moved_leaves = old.leaves.len();
        let mut sides: [Vec<ColouredLeaf>; 2] = [Vec::new(), Vec::new()];
        for leaf in old.leaves {
            let side = usize::from(self.dsf.find(leaf.attach) != labels[0]);
            sides[side].push(leaf);
            self.leaf_ops += 1;
        }
        sides[0].push(ColouredLeaf { edge: e, attach: u });
        sides[1].push(ColouredLeaf { edge: e, attach: v });
        self.leaf_ops += 2;

        let prior_base = old.view.base();
        let mut report = [(u, labels[0], false), (v, labels[1], false)];
        self.last_touched.clear();
        for (i, leaves) in sides.into_iter().enumerate() {
            let endpoint = report[i].0;
            self.tally.max_leaves_seen = self.tally.max_leaves_seen.max(leaves.len());
            if self.uncoloured_deg[endpoint] == 0 {
                report[i].2 = true;
                continue;
            }
            let label = labels[i];
            let view = component::view(label, &leaves, true, &self.forest, &self.lca, &self.colour);
            let key = leaves.iter().map(|l| (l.edge, l.attach)).min().expect("side holds the new leaf");
            let prior_base = prior_base.filter(|&b| self.dsf.find(b) == label);
            self.insert_component(ComponentData { label, leaves, view, key, prior_base });
            self.last_touched.push(label);
        }

        for w in [u, v] {
            for &f in self.forest.incident(w) {
                if self.colour[f] == 0 && self.smallest_feasible(f).is_none() {
                    self.dead.insert(f);
                }
            }
        }

        Ok(SplitOutcome { old_label, sides: report, moved_leaves })
    }

    fn tally_delta(&mut self, view: &ComponentView, sign: isize) {
        let delta = self.forest.delta();
        let t = &mut self.tally;
        let add = |c: &mut usize| *c = (*c as isize + sign) as usize;
        add(&mut t.components);
        if view.unmatched_count() > 2 {
            add(&mut t.remark1_violations);
        }
        if view.s_ok && view.x > delta {
            add(&mut t.lemma1_violations);
        }
        if view.x == 3 && !(view.s_ok && view.m_ok) {
            add(&mut t.lemma3_violations);
        }
        let c = view.colours_present.len().min(t.colour_histogram.len() - 1);
        add(&mut t.colour_histogram[c]);
    }

    fn insert_component(&mut self, data: ComponentData) {
        let entry = (data.key, data.label);
        for b in Bucket::of(&data.view) {
            self.buckets.set_mut(b).insert(entry);
        }
        self.tally_delta(&data.view, 1);
        self.comps.insert(data.label, data);
    }

    fn remove_component(&mut self, label: Label) -> Option<ComponentData> {
        let data = self.comps.remove(&label)?;
        let entry = (data.key, data.label);
        for b in Bucket::of(&data.view) {
            self.buckets.set_mut(b).remove(&entry);
        }
        self.tally_delta(&data.view, -1);
        Some(data)
    }
}
