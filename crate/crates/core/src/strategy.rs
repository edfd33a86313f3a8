//! Alice's move chooser for maximum degree 4 or 5 with `Δ + 1` colours.
//!
//! After every Alice move each component satisfies
//!
//! * (S) every component with at least three coloured edges has exactly one
//!   base node, and
//! * (M) a star whose base node has full degree `Δ` carries at most
//!   `max(3 - γ, 0)` unmatched edges, `γ` being the number of coloured edges
//!   at the base node.
//!
//! Bob's move can break at most one of them in one component; Alice repairs
//! it by colouring the edge at the base node that points towards the
//! offending part. Otherwise she grows a star at its base node, or extends the
//! small (at most two coloured edges) components so no second branching
//! vertex can appear. All lookups go through per-category ordered sets kept
//! by [`GameState`], so a decision uses a constant number of LCA queries.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::component::ColouredLeaf;
use crate::decremental::Label;
use crate::error::StrategyError;
use crate::forest::{EdgeId, Vertex};
use crate::game::{Colour, ComponentData, ComponentKey, GameState};

/// Components examined per bucket before moving to the next one.
const REPAIR_LOOKAHEAD: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    X0,
    X1,
    X2Path,
    X2Adj,
    StarAllIncident,
    StarTowardAb,
    RepairS,
    RepairM,
}

/// Which kind of component Alice serves when nothing needs repair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Priority {
    /// Stars first, then components with two, one, zero coloured edges.
    #[default]
    StarFirst,
    SmallFirst,
}

impl std::str::FromStr for Priority {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "star-first" => Ok(Self::StarFirst),
            "small-first" => Ok(Self::SmallFirst),
            other => Err(format!("unknown priority {other:?} (expected star-first or small-first)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub priority: Priority,
    /// Play outside `Δ ∈ {4, 5}` without any guarantee.
    pub best_effort: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    pub base: Option<Vertex>,
    /// The coloured edge being cut off (`ab`), when there is one.
    pub target_edge: Option<EdgeId>,
    /// The second base node `w` in an (S) repair.
    pub target_vertex: Option<Vertex>,
    /// Edges between the base node and the target.
    pub path_len: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDecision {
    pub case_tag: CaseTag,
    pub edge: EdgeId,
    pub colour: Colour,
    pub component: Label,
    pub audit: Audit,
}

pub fn choose_move(state: &GameState, cfg: &StrategyConfig) -> Result<StrategyDecision, StrategyError> {
    if state.uncoloured_count() == 0 {
        return Err(StrategyError::NoUncolouredEdge);
    }
    let delta = state.forest().delta();
    if !cfg.best_effort && !(4..=5).contains(&delta) {
        return Err(StrategyError::UnsupportedDelta(delta));
    }
    let b = state.buckets();
    if let Some(&(_, label)) = b.s_bad.first() {
        return repair_s(state, state.component(label).expect("bucketed component is live"));
    }

    // Candidates in priority order. A move that leaves (M) broken and pushes a
    // side to Δ colours is passed over while another candidate remains.
    type Mover = fn(&GameState, &ComponentData) -> Result<StrategyDecision, StrategyError>;
    type Candidates<'a> = (&'a BTreeSet<(ComponentKey, Label)>, Mover);
    let stars: [Candidates; 2] = [(&b.star_unmatched, star_move), (&b.star, star_move)];
    let small: [Candidates; 3] = [(&b.x2, two_leaves), (&b.x1, one_leaf), (&b.x0, untouched)];
    let mut order: Vec<Candidates> = vec![(&b.m_bad, repair_m), (&b.tight, star_move)];
    match cfg.priority {
        Priority::StarFirst => order.extend(stars.into_iter().chain(small)),
        Priority::SmallFirst => order.extend(small.into_iter().chain(stars)),
    }

    let mut passed: Vec<Label> = Vec::new();
    let mut fallback = None;
    for (set, mover) in order {
        let labels: Vec<Label> = set.iter().map(|&(_, l)| l).filter(|l| !passed.contains(l)).take(REPAIR_LOOKAHEAD).collect();
        for label in labels {
            let c = state.component(label).expect("bucketed component is live");
            let d = mover(state, c)?;
            if !futile(state, c, &d) {
                return Ok(d);
            }
            passed.push(label);
            fallback.get_or_insert(d);
        }
    }
    // Every live component is a star, an (S) violation, or has at most two coloured edges.
    Ok(fallback.expect("a live component exists while edges are uncoloured"))
}

/// Distinct colours on each side once `d.edge` (at the base) is coloured.
fn split_colours(state: &GameState, c: &ComponentData, v: Vertex, d: &StrategyDecision) -> (usize, usize) {
    let near = near_side(state, c, v, d.edge);
    let mut sides = [vec![d.colour], vec![d.colour]];
    for l in &c.leaves {
        let i = usize::from(!near.iter().any(|n| n.edge == l.edge));
        sides[i].push(state.colour_of(l.edge).expect("leaves are coloured"));
    }
    let [mut a, mut b] = sides;
    a.sort_unstable();
    a.dedup();
    b.sort_unstable();
    b.dedup();
    (a.len(), b.len())
}

fn futile(state: &GameState, c: &ComponentData, d: &StrategyDecision) -> bool {
    let Some(v) = d.audit.base else { return false };
    let delta = state.forest().delta();
    let (near, far) = split_colours(state, c, v, d);
    excess_after(state, c, v, d.edge, d.colour) > 0 && near.max(far) >= delta && c.view.colours_present.len() < delta
}

fn decide(
    state: &GameState,
    c: &ComponentData,
    case_tag: CaseTag,
    edge: EdgeId,
    colour: Option<Colour>,
    audit: Audit,
) -> Result<StrategyDecision, StrategyError> {
    let colour = colour
        .or_else(|| state.smallest_feasible(edge))
        .ok_or_else(|| StrategyError::StrategyStuck { edge, case: format!("{case_tag:?} in component {}", c.label) })?;
    Ok(StrategyDecision { case_tag, edge, colour, component: c.label, audit })
}

/// Edge at `v` on the path towards `target`, plus the path length.
fn step_towards(state: &GameState, v: Vertex, target: Vertex) -> (EdgeId, usize) {
    let lca = state.lca();
    let next = lca.next_on_path(v, target).expect("base and target share a component");
    let edge = lca.edge_between(v, next).expect("next_on_path returns a neighbour");
    let meet = lca.lca(v, target).expect("same tree");
    let len = lca.depth(v) + lca.depth(target) - 2 * lca.depth(meet);
    (edge, len)
}

fn smallest_uncoloured_at(state: &GameState, v: Vertex) -> EdgeId {
    state
        .forest()
        .incident(v)
        .iter()
        .copied()
        .filter(|&e| state.colour_of(e).is_none())
        .min()
        .expect("a vertex of a live component has an uncoloured edge")
}

fn repair_s(state: &GameState, c: &ComponentData) -> Result<StrategyDecision, StrategyError> {
    let bases = &c.view.base_nodes;
    let v = c.prior_base.filter(|b| bases.contains(b)).unwrap_or(bases[0]);
    let w = *bases.iter().find(|&&b| b != v).expect("an (S) violation has two base nodes");
    let (edge, len) = step_towards(state, v, w);
    let (colour, _) = matching_colour(state, c, v, edge);
    let audit = Audit { base: Some(v), target_edge: None, target_vertex: Some(w), path_len: Some(len) };
    decide(state, c, CaseTag::RepairS, edge, colour, audit)
}

fn repair_m(state: &GameState, c: &ComponentData) -> Result<StrategyDecision, StrategyError> {
    let class = c.view.classification.as_ref().expect("(M) is only violated in stars");
    let v = class.base;
    let t = toward_best(state, c, v, &class.unmatched);
    if let Some(colour) = t.colour {
        if excess_after(state, c, v, t.edge, colour) > 0 {
            // the prescribed cut cannot clear the excess; try every edge at the base
            if let Some((edge, colour)) = best_base_move(state, c, v) {
                if excess_after(state, c, v, edge, colour) < excess_after(state, c, v, t.edge, t.colour.unwrap()) {
                    let audit = Audit { base: Some(v), target_edge: None, target_vertex: None, path_len: Some(1) };
                    return decide(state, c, CaseTag::RepairM, edge, Some(colour), audit);
                }
            }
        }
    }
    let audit = Audit { base: Some(v), target_edge: Some(t.ab), target_vertex: None, path_len: Some(t.len) };
    decide(state, c, CaseTag::RepairM, t.edge, t.colour, audit)
}

/// (M) excess `u - max(3 - γ, 0)` of `v`'s side after colouring `edge` (at `v`) with `colour`.
fn excess_after(state: &GameState, c: &ComponentData, v: Vertex, edge: EdgeId, colour: Colour) -> isize {
    let side = near_side(state, c, v, edge);
    let colour_of = |e: EdgeId| state.colour_of(e).expect("leaves are coloured");
    let mut at_base: Vec<Colour> = side.iter().filter(|l| l.attach == v).map(|l| colour_of(l.edge)).collect();
    at_base.push(colour);
    let unmatched = side.iter().filter(|l| l.attach != v && !at_base.contains(&colour_of(l.edge))).count();
    unmatched as isize - 3isize.saturating_sub(at_base.len() as isize).max(0)
}

/// Edge at `v` and colour with the smallest resulting (M) excess, then fewest colours.
fn best_base_move(state: &GameState, c: &ComponentData, v: Vertex) -> Option<(EdgeId, Colour)> {
    let mut best: Option<((isize, usize), EdgeId, Colour)> = None;
    for &edge in state.forest().incident(v) {
        if state.colour_of(edge).is_some() {
            continue;
        }
        let side = near_side(state, c, v, edge);
        for colour in state.feasible_colours(edge) {
            let mut colours: Vec<Colour> = side.iter().map(|l| state.colour_of(l.edge).unwrap()).collect();
            colours.push(colour);
            colours.sort_unstable();
            colours.dedup();
            let rank = (excess_after(state, c, v, edge, colour), colours.len());
            if best.is_none_or(|(r, _, _)| rank < r) {
                best = Some((rank, edge, colour));
            }
        }
    }
    best.map(|(_, e, col)| (e, col))
}

/// Leaves of `c` that stay with `v` when `edge` (incident at `v`) is coloured.
fn near_side<'a>(state: &GameState, c: &'a ComponentData, v: Vertex, edge: EdgeId) -> Vec<&'a ColouredLeaf> {
    let lca = state.lca();
    let n = state.forest().other_end(edge, v);
    let below = lca.parent(n) == Some(v);
    c.leaves.iter().filter(|l| if below { !lca.is_ancestor(n, l.attach) } else { lca.is_ancestor(v, l.attach) }).collect()
}

fn attach_of(c: &ComponentData, edge: EdgeId) -> Vertex {
    c.leaves.iter().find(|l| l.edge == edge).expect("edge is a leaf of the component").attach
}

/// Feasible colour for `edge` (incident at base `v`) that turns the most
/// unmatched edges on `v`'s side into matched ones. Ties go to colours already
/// on that side, then to the smallest colour.
fn matching_colour(state: &GameState, c: &ComponentData, v: Vertex, edge: EdgeId) -> (Option<Colour>, usize) {
    let colour_of = |e: EdgeId| state.colour_of(e).expect("leaves are coloured");
    let side = near_side(state, c, v, edge);
    let at_base: Vec<Colour> = side.iter().filter(|l| l.attach == v).map(|l| colour_of(l.edge)).collect();
    let mut best: Option<(usize, bool, Colour)> = None;
    for col in state.feasible_colours(edge) {
        let matches = side.iter().filter(|l| l.attach != v && colour_of(l.edge) == col && !at_base.contains(&col)).count();
        let present = side.iter().any(|l| colour_of(l.edge) == col);
        if best.is_none_or(|(m, p, _)| (matches, present) > (m, p)) {
            best = Some((matches, present, col));
        }
    }
    best.map_or((None, 0), |(m, _, col)| (Some(col), m))
}

struct Target {
    ab: EdgeId,
    edge: EdgeId,
    len: usize,
    colour: Option<Colour>,
}

/// Among the coloured edges `targets`, the one whose first edge from `v`
/// admits the best matching colour (earliest on ties).
fn toward_best(state: &GameState, c: &ComponentData, v: Vertex, targets: &[EdgeId]) -> Target {
    let mut best: Option<(usize, Target)> = None;
    for &ab in targets {
        let (edge, len) = step_towards(state, v, attach_of(c, ab));
        let (colour, matches) = matching_colour(state, c, v, edge);
        let rank = matches + usize::from(colour.is_some());
        if best.as_ref().is_none_or(|(r, _)| rank > *r) {
            best = Some((rank, Target { ab, edge, len, colour }));
        }
    }
    best.expect("at least one target").1
}

fn star_move(state: &GameState, c: &ComponentData) -> Result<StrategyDecision, StrategyError> {
    let class = c.view.classification.as_ref().expect("stars are classified");
    let v = class.base;
    let off_base = class.matched.iter().copied().filter(|&e| attach_of(c, e) != v).min();
    if class.unmatched.is_empty() && off_base.is_none() {
        let edge = smallest_uncoloured_at(state, v);
        let audit = Audit { base: Some(v), target_edge: None, target_vertex: None, path_len: None };
        return decide(state, c, CaseTag::StarAllIncident, edge, None, audit);
    }
    let targets: Vec<EdgeId> = if class.unmatched.is_empty() { off_base.into_iter().collect() } else { class.unmatched.clone() };
    let t = toward_best(state, c, v, &targets);
    let audit = Audit { base: Some(v), target_edge: Some(t.ab), target_vertex: None, path_len: Some(t.len) };
    decide(state, c, CaseTag::StarTowardAb, t.edge, t.colour, audit)
}

fn two_leaves(state: &GameState, c: &ComponentData) -> Result<StrategyDecision, StrategyError> {
    let (l1, l2) = (c.leaves[0], c.leaves[1]);
    if l1.attach == l2.attach {
        let edge = smallest_uncoloured_at(state, l1.attach);
        let audit = Audit { base: Some(l1.attach), target_edge: None, target_vertex: None, path_len: Some(0) };
        return decide(state, c, CaseTag::X2Adj, edge, None, audit);
    }
    let lca = state.lca();
    let (e1, len) = step_towards(state, l1.attach, l2.attach);
    let n2 = lca.next_on_path(l2.attach, l1.attach).expect("same component");
    let e2 = lca.edge_between(l2.attach, n2).expect("neighbour");
    let edge = e1.min(e2);
    // a colour new to the component, if the endpoints allow one
    let present = &c.view.colours_present;
    let colour = state.feasible_colours(edge).into_iter().find(|col| !present.contains(col));
    let audit = Audit { base: None, target_edge: None, target_vertex: None, path_len: Some(len) };
    decide(state, c, CaseTag::X2Path, edge, colour, audit)
}

fn one_leaf(state: &GameState, c: &ComponentData) -> Result<StrategyDecision, StrategyError> {
    let edge = smallest_uncoloured_at(state, c.leaves[0].attach);
    let audit = Audit { base: None, target_edge: Some(c.leaves[0].edge), target_vertex: None, path_len: None };
    decide(state, c, CaseTag::X1, edge, None, audit)
}

fn untouched(state: &GameState, c: &ComponentData) -> Result<StrategyDecision, StrategyError> {
    let audit = Audit { base: None, target_edge: None, target_vertex: None, path_len: None };
    decide(state, c, CaseTag::X0, c.key.0, None, audit)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::forest::Forest;
    use crate::game::GameConfig;

    fn state(forest: Forest) -> GameState {
        let cfg = GameConfig::for_forest(&forest);
        GameState::new(Arc::new(forest), cfg)
    }

    fn best_effort() -> StrategyConfig {
        StrategyConfig { best_effort: true, ..Default::default() }
    }

    #[test]
    fn first_move_on_untouched_path() {
        let s = state(Forest::path(5));
        let d = choose_move(&s, &best_effort()).unwrap();
        assert_eq!((d.case_tag, d.edge, d.colour), (CaseTag::X0, 0, 1));
    }

    #[test]
    fn refuses_small_delta_by_default() {
        let s = state(Forest::path(5));
        assert_eq!(choose_move(&s, &StrategyConfig::default()), Err(StrategyError::UnsupportedDelta(2)));
    }

    #[test]
    fn adjacent_pair_at_star_centre() {
        let mut s = state(Forest::star(4));
        s.apply_colouring(0, 1).unwrap();
        s.apply_colouring(1, 2).unwrap();
        let d = choose_move(&s, &StrategyConfig::default()).unwrap();
        assert_eq!((d.case_tag, d.edge, d.colour), (CaseTag::X2Adj, 2, 3));
    }

    #[test]
    fn no_move_when_everything_is_coloured() {
        let mut s = state(Forest::star(4));
        for e in 0..4 {
            s.apply_colouring(e, e as Colour + 1).unwrap();
        }
        assert_eq!(choose_move(&s, &StrategyConfig::default()), Err(StrategyError::NoUncolouredEdge));
    }

    /// Base 0 of degree 4 (edges 0..4 to 1..4), with a path 1-5-6 hanging off 1
    /// and a pendant 7 at 2.
    fn broom() -> Forest {
        Forest::new(8, vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (5, 6), (2, 7)]).unwrap()
    }

    #[test]
    fn star_move_heads_for_unmatched_edge() {
        let mut s = state(broom());
        // γ = 1 at base 0 (edge 3, colour 1); far edge (5,6) colour 2 is unmatched,
        // far edge (2,7) colour 1 is matched.
        s.apply_colouring(3, 1).unwrap();
        s.apply_colouring(5, 2).unwrap();
        s.apply_colouring(6, 1).unwrap();
        let c = s.component_of_vertex(0).unwrap();
        assert_eq!(c.view.base_nodes, vec![0]);
        assert_eq!(c.view.classification.as_ref().unwrap().unmatched, vec![5]);
        let d = choose_move(&s, &StrategyConfig::default()).unwrap();
        assert_eq!(d.case_tag, CaseTag::StarTowardAb);
        assert_eq!(d.edge, 0, "edge from the base towards vertex 5");
        assert_eq!(d.audit.target_edge, Some(5));
        assert_eq!(d.audit.path_len, Some(2));
    }

    #[test]
    fn repairs_second_base_node() {
        // Base 0 holds colours 1, 2 and the far edge (5,6) has colour 3. Colouring
        // (7,8) makes vertex 1 branch towards 5, 8 and the base.
        let f = Forest::new(9, vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (5, 6), (1, 7), (7, 8)]).unwrap();
        let mut s = state(f);
        s.apply_colouring(1, 1).unwrap();
        s.apply_colouring(2, 2).unwrap();
        s.apply_colouring(5, 3).unwrap();
        assert_eq!(s.component_of_vertex(0).unwrap().view.base_nodes, vec![0]);
        s.apply_colouring(7, 1).unwrap();
        let c = s.component_of_vertex(0).unwrap();
        assert_eq!(c.view.base_nodes, vec![0, 1]);
        assert!(!c.view.s_ok);
        let d = choose_move(&s, &StrategyConfig::default()).unwrap();
        assert_eq!(d.case_tag, CaseTag::RepairS);
        assert_eq!(d.edge, 0);
        assert_eq!(d.audit.base, Some(0));
        assert_eq!(d.audit.target_vertex, Some(1));
        // colours 1 and 2 sit at vertex 0, nothing at vertex 1
        assert_eq!(d.colour, 3);
    }
}
