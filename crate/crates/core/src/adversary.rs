//! Bob policies: uniform random, skip-heavy, a greedy spoiler, and full
//! enumeration of Bob's options for exhaustive verification.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::component::{self, ColouredLeaf, Overlay};
use crate::error::AdversaryError;
use crate::forest::{EdgeId, Vertex};
use crate::game::{Action, Colour, GameState};

/// Default edge cap for exhaustive enumeration.
pub const EXHAUSTIVE_EDGE_CAP: usize = 8;

/// Above this many uncoloured edges the spoiler samples candidates instead of scoring all of them.
const SPOILER_FULL_SCAN: usize = 64;
const SPOILER_LOCAL: usize = 12;
const SPOILER_GLOBAL: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BobKind {
    Random,
    Spoiler,
    Skipper,
}

impl std::str::FromStr for BobKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(Self::Random),
            "spoiler" => Ok(Self::Spoiler),
            "skipper" => Ok(Self::Skipper),
            other => Err(format!("unknown Bob policy {other:?} (expected random, spoiler or skipper)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BobPolicy {
    pub kind: BobKind,
    pub seed: u64,
    /// Chance of skipping a turn when skipping is allowed.
    pub skip_probability: f64,
}

impl BobPolicy {
    pub fn new(kind: BobKind, seed: u64) -> Self {
        let skip_probability = match kind {
            BobKind::Random => 0.1,
            BobKind::Skipper => 0.7,
            BobKind::Spoiler => 0.0,
        };
        Self { kind, seed, skip_probability }
    }
}

#[derive(Clone, Debug)]
pub struct Bob {
    policy: BobPolicy,
    rng: ChaCha8Rng,
}

/// What a candidate Bob move would do to its component, compared lexicographically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpoilerScore {
    pub second_base: bool,
    pub more_unmatched: bool,
    pub new_colour: bool,
}

impl Bob {
    pub fn new(policy: BobPolicy) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(policy.seed), policy }
    }

    pub fn policy(&self) -> &BobPolicy {
        &self.policy
    }

    pub fn describe(&self) -> String {
        format!("{:?}(seed={}, skip={})", self.policy.kind, self.policy.seed, self.policy.skip_probability).to_lowercase()
    }

    pub fn next_move(&mut self, state: &GameState) -> Result<Action, AdversaryError> {
        let may_skip = state.config().bob_may_skip;
        if may_skip && self.policy.skip_probability > 0.0 && self.rng.gen_bool(self.policy.skip_probability.min(1.0)) {
            return Ok(Action::Skip);
        }
        let pick = match self.policy.kind {
            BobKind::Random | BobKind::Skipper => self.random_colouring(state),
            BobKind::Spoiler => self.spoiler_colouring(state),
        };
        match pick {
            Some(a) => Ok(a),
            None if may_skip => Ok(Action::Skip),
            None => Err(AdversaryError::BobStuck),
        }
    }

    fn random_colouring(&mut self, state: &GameState) -> Option<Action> {
        let edges = state.uncoloured_edges();
        if edges.is_empty() {
            return None;
        }
        for _ in 0..8 {
            let edge = edges[self.rng.gen_range(0..edges.len())];
            if let Some(&colour) = state.feasible_colours(edge).choose(&mut self.rng) {
                return Some(Action::Colour { edge, colour });
            }
        }
        let edge = edges.iter().copied().find(|&e| state.smallest_feasible(e).is_some())?;
        let colour = *state.feasible_colours(edge).choose(&mut self.rng)?;
        Some(Action::Colour { edge, colour })
    }

    fn spoiler_colouring(&mut self, state: &GameState) -> Option<Action> {
        let mut candidates = spoiler_candidates(state, &mut self.rng);
        candidates.shuffle(&mut self.rng);
        let mut best: Option<(SpoilerScore, Action)> = None;
        for edge in candidates {
            for colour in state.feasible_colours(edge) {
                let score = score_move(state, edge, colour);
                if best.as_ref().is_none_or(|(s, _)| score > *s) {
                    best = Some((score, Action::Colour { edge, colour }));
                }
            }
        }
        best.map(|(_, a)| a)
    }
}

fn spoiler_candidates(state: &GameState, rng: &mut ChaCha8Rng) -> Vec<EdgeId> {
    let all = state.uncoloured_edges();
    if all.len() <= SPOILER_FULL_SCAN {
        return all.to_vec();
    }
    let forest = state.forest();
    let mut hubs: Vec<Vertex> = Vec::new();
    for &label in state.last_touched() {
        if let Some(c) = state.component(label) {
            hubs.extend(c.leaves.iter().map(|l| l.attach));
            hubs.extend(c.view.base_nodes.iter().copied());
        }
    }
    let mut local: Vec<EdgeId> = Vec::new();
    for &x in &hubs {
        for &e in forest.incident(x) {
            if state.colour_of(e).is_some() {
                continue;
            }
            local.push(e);
            let y = forest.other_end(e, x);
            local.extend(forest.incident(y).iter().copied().filter(|&f| f != e && state.colour_of(f).is_none()));
        }
    }
    local.sort_unstable();
    local.dedup();
    local.shuffle(rng);
    local.truncate(SPOILER_LOCAL);
    for _ in 0..SPOILER_GLOBAL {
        local.push(all[rng.gen_range(0..all.len())]);
    }
    local
}

/// Scores Bob colouring `edge` with `colour` by simulating the split of its component.
pub fn score_move(state: &GameState, edge: EdgeId, colour: Colour) -> SpoilerScore {
    let Some(comp) = state.component_of_edge(edge) else {
        return SpoilerScore::default();
    };
    let forest = state.forest();
    let lca = state.lca();
    let (u, v) = forest.endpoints(edge);
    let lower = if lca.parent(v) == Some(u) { v } else { u };
    let mut sides: [Vec<ColouredLeaf>; 2] = [Vec::new(), Vec::new()];
    for &leaf in &comp.leaves {
        let on_lower = lca.is_ancestor(lower, leaf.attach);
        sides[usize::from(on_lower == (lower == v))].push(leaf);
    }
    sides[0].push(ColouredLeaf { edge, attach: u });
    sides[1].push(ColouredLeaf { edge, attach: v });

    let overlay = Overlay { base: state.colours(), edge, colour };
    let old_unmatched = comp.view.unmatched_count();
    let mut score = SpoilerScore { new_colour: !comp.view.colours_present.contains(&colour), ..Default::default() };
    for (side, endpoint) in sides.iter().zip([u, v]) {
        if state.uncoloured_degree(endpoint) <= 1 {
            continue; // that side would be fully coloured
        }
        let view = component::view(comp.label, side, true, forest, lca, &overlay);
        score.second_base |= view.base_nodes.len() >= 2;
        score.more_unmatched |= view.relevant() && (view.unmatched_count() > old_unmatched || !view.m_ok);
    }
    score
}

/// Every action available to Bob: each uncoloured edge with each feasible colour, plus skip.
pub fn legal_actions(state: &GameState) -> Vec<Action> {
    let mut edges = state.uncoloured_edges().to_vec();
    edges.sort_unstable();
    let mut out: Vec<Action> = edges
        .into_iter()
        .flat_map(|edge| state.feasible_colours(edge).into_iter().map(move |colour| Action::Colour { edge, colour }))
        .collect();
    if state.config().bob_may_skip {
        out.push(Action::Skip);
    }
    out
}

/// [`legal_actions`] restricted to forests small enough for exhaustive search.
pub fn exhaustive_actions(state: &GameState, cap: usize) -> Result<Vec<Action>, AdversaryError> {
    let edges = state.forest().edge_count();
    if edges > cap {
        return Err(AdversaryError::BudgetExceeded { edges, cap });
    }
    Ok(legal_actions(state))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::forest::Forest;
    use crate::game::{GameConfig, Player};

    fn state(forest: Forest, k: Colour) -> GameState {
        let cfg = GameConfig { k, ..GameConfig::for_forest(&forest) };
        GameState::new(Arc::new(forest), cfg)
    }

    #[test]
    fn single_edge_two_colours_three_branches() {
        let s = state(Forest::path(2), 2);
        assert_eq!(exhaustive_actions(&s, 8).unwrap().len(), 3);
    }

    #[test]
    fn shared_vertex_limits_colours() {
        let mut s = state(Forest::path(3), 3);
        s.apply_colouring(0, 1).unwrap();
        let acts = exhaustive_actions(&s, 8).unwrap();
        assert_eq!(acts, vec![Action::Colour { edge: 1, colour: 2 }, Action::Colour { edge: 1, colour: 3 }, Action::Skip]);
    }

    #[test]
    fn budget_is_enforced() {
        let s = state(Forest::path(12), 3);
        assert_eq!(exhaustive_actions(&s, 8), Err(AdversaryError::BudgetExceeded { edges: 11, cap: 8 }));
    }

    #[test]
    fn seeded_random_bob_replays() {
        let s = state(Forest::path(3), 3);
        let a = Bob::new(BobPolicy::new(BobKind::Random, 11)).next_move(&s).unwrap();
        let b = Bob::new(BobPolicy::new(BobKind::Random, 11)).next_move(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn certain_skipper_always_skips() {
        let s = state(Forest::path(3), 3);
        let mut bob = Bob::new(BobPolicy { skip_probability: 1.0, ..BobPolicy::new(BobKind::Skipper, 1) });
        for _ in 0..20 {
            assert_eq!(bob.next_move(&s).unwrap(), Action::Skip);
        }
    }

    #[test]
    fn spoiler_moves_are_legal() {
        let mut s = state(Forest::star(4), 5);
        let mut bob = Bob::new(BobPolicy::new(BobKind::Spoiler, 3));
        s.make_move(Player::Alice, Action::Colour { edge: 0, colour: 1 }).unwrap();
        let a = bob.next_move(&s).unwrap();
        let Action::Colour { edge, colour } = a else { panic!("spoiler skipped") };
        s.validate_colouring(edge, colour).unwrap();
    }
}
