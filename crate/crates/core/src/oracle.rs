//! Exact small-forest ground truth: a minimax solver for the colouring game,
//! the game chromatic index, and isomorphism-free tree enumeration.
//!
//! Shares only [`Forest`] with the rest of the crate; the game rules are
//! re-implemented here from scratch.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::forest::{Forest, Vertex};
use crate::game::{Colour, Player, Winner};

pub const DEFAULT_CAP: usize = 9;
/// Colours are packed four bits per edge.
pub const MAX_SOLVER_COLOURS: usize = 15;
const PARALLEL_MIN_EDGES: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub k: usize,
    pub first_player: Player,
    pub bob_may_skip: bool,
    /// Largest edge count accepted.
    pub cap: usize,
}

impl SolveConfig {
    pub fn new(k: usize, first_player: Player, bob_may_skip: bool) -> Self {
        Self { k, first_player, bob_may_skip, cap: DEFAULT_CAP }
    }
}

struct Solver {
    k: usize,
    skip: bool,
    /// Edges sharing an endpoint with each edge.
    adj: Vec<Vec<usize>>,
    memo: HashMap<u64, bool>,
}

type Move = Option<(usize, u8)>;

impl Solver {
    fn new(forest: &Forest, k: usize, skip: bool) -> Self {
        let adj = (0..forest.edge_count())
            .map(|e| {
                let (u, v) = forest.endpoints(e);
                let mut a: Vec<usize> = forest.incident(u).iter().chain(forest.incident(v)).copied().filter(|&f| f != e).collect();
                a.sort_unstable();
                a.dedup();
                a
            })
            .collect();
        Self { k, skip, adj, memo: HashMap::new() }
    }

    fn blocked(&self, c: &[u8], e: usize) -> u32 {
        self.adj[e].iter().fold(0u32, |m, &f| m | (1u32 << c[f]))
    }

    /// Colours renamed in first-use order, four bits per edge, mover in the top bit.
    fn key(c: &[u8], turn: Player) -> u64 {
        let mut rename = [0u8; 16];
        let mut next = 1u8;
        let mut key = 0u64;
        for (i, &x) in c.iter().enumerate() {
            let y = if x == 0 {
                0
            } else {
                if rename[x as usize] == 0 {
                    rename[x as usize] = next;
                    next += 1;
                }
                rename[x as usize]
            };
            key |= u64::from(y) << (4 * i);
        }
        key | (u64::from(turn == Player::Bob) << 63)
    }

    /// None when some uncoloured edge has no proper colour left.
    fn moves(&self, c: &[u8], turn: Player) -> Option<Vec<Move>> {
        let used = c.iter().fold(0u32, |m, &x| m | (1u32 << x));
        // one representative for all colours not yet used anywhere
        let fresh = (1..=self.k as u8).find(|&x| used & (1 << x) == 0);
        let mut out = Vec::new();
        for e in 0..c.len() {
            if c[e] != 0 {
                continue;
            }
            let blocked = self.blocked(c, e);
            let mut any = false;
            for x in 1..=self.k as u8 {
                if blocked & (1 << x) != 0 {
                    continue;
                }
                any = true;
                if used & (1 << x) != 0 || Some(x) == fresh {
                    out.push(Some((e, x)));
                }
            }
            if !any {
                return None;
            }
        }
        if turn == Player::Bob && self.skip && !out.is_empty() {
            out.push(None);
        }
        Some(out)
    }

    fn alice_wins(&mut self, c: &mut [u8], turn: Player) -> bool {
        let Some(moves) = self.moves(c, turn) else {
            return false;
        };
        if moves.is_empty() {
            return true;
        }
        let key = Self::key(c, turn);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut child = |s: &mut Self, mv: Move| match mv {
            None => s.alice_wins(c, Player::Alice),
            Some((e, x)) => {
                c[e] = x;
                let r = s.alice_wins(c, turn.other());
                c[e] = 0;
                r
            }
        };
        let value = match turn {
            Player::Alice => moves.into_iter().any(|mv| child(self, mv)),
            Player::Bob => moves.into_iter().all(|mv| child(self, mv)),
        };
        self.memo.insert(key, value);
        value
    }
}

fn check(forest: &Forest, cfg: &SolveConfig) -> Result<(), OracleError> {
    if forest.edge_count() > cfg.cap {
        return Err(OracleError::CapExceeded { edges: forest.edge_count(), cap: cfg.cap });
    }
    if cfg.k > MAX_SOLVER_COLOURS {
        return Err(OracleError::TooManyColours { k: cfg.k, max: MAX_SOLVER_COLOURS });
    }
    Ok(())
}

/// Value of the game from the empty colouring under optimal play.
pub fn solve(forest: &Forest, cfg: &SolveConfig) -> Result<Winner, OracleError> {
    solve_position(forest, &vec![0; forest.edge_count()], cfg.first_player, cfg)
}

/// Value of the game from a partial proper colouring (0 = uncoloured) with `turn` to move.
pub fn solve_position(forest: &Forest, colours: &[Colour], turn: Player, cfg: &SolveConfig) -> Result<Winner, OracleError> {
    check(forest, cfg)?;
    assert_eq!(colours.len(), forest.edge_count(), "one colour slot per edge");
    let c = colours.to_vec();
    let root = Solver::new(forest, cfg.k, cfg.bob_may_skip);
    let Some(moves) = root.moves(&c, turn) else {
        return Ok(Winner::BobWins);
    };
    if moves.is_empty() {
        return Ok(Winner::AliceWins);
    }

    let eval = |mv: Move| {
        let mut s = Solver::new(forest, cfg.k, cfg.bob_may_skip);
        let mut c = c.clone();
        match mv {
            None => s.alice_wins(&mut c, Player::Alice),
            Some((e, x)) => {
                c[e] = x;
                s.alice_wins(&mut c, turn.other())
            }
        }
    };
    let results: Vec<bool> = if forest.edge_count() >= PARALLEL_MIN_EDGES {
        std::thread::scope(|scope| {
            let handles: Vec<_> = moves.iter().map(|&mv| scope.spawn(move || eval(mv))).collect();
            handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
        })
    } else {
        moves.iter().map(|&mv| eval(mv)).collect()
    };
    let alice = match turn {
        Player::Alice => results.iter().any(|&r| r),
        Player::Bob => results.iter().all(|&r| r),
    };
    Ok(if alice { Winner::AliceWins } else { Winner::BobWins })
}

/// Smallest `k` for which Alice wins with either player moving first.
pub fn game_chromatic_index(forest: &Forest, bob_may_skip: bool) -> Result<usize, OracleError> {
    if forest.edge_count() == 0 {
        return Ok(0);
    }
    for k in forest.delta()..=MAX_SOLVER_COLOURS {
        if alice_wins_both(forest, k, bob_may_skip)? {
            return Ok(k);
        }
    }
    Err(OracleError::TooManyColours { k: MAX_SOLVER_COLOURS + 1, max: MAX_SOLVER_COLOURS })
}

pub fn alice_wins_both(forest: &Forest, k: usize, bob_may_skip: bool) -> Result<bool, OracleError> {
    for first in [Player::Alice, Player::Bob] {
        if solve(forest, &SolveConfig::new(k, first, bob_may_skip))? != Winner::AliceWins {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rooted encoding of the subtree at `v` with sorted child encodings.
fn encode(forest: &Forest, v: Vertex, parent: Option<Vertex>) -> String {
    let mut kids: Vec<String> = forest
        .incident(v)
        .iter()
        .map(|&e| forest.other_end(e, v))
        .filter(|&w| Some(w) != parent)
        .map(|w| encode(forest, w, Some(v)))
        .collect();
    kids.sort_unstable();
    format!("({})", kids.concat())
}

fn centres(forest: &Forest) -> Vec<Vertex> {
    let n = forest.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| forest.degree(v)).collect();
    let mut layer: Vec<Vertex> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &e in forest.incident(v) {
                let w = forest.other_end(e, v);
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer
}

/// Canonical string of a tree: the smaller rooted encoding over its centres.
pub fn canonical_form(tree: &Forest) -> String {
    centres(tree).into_iter().map(|c| encode(tree, c, None)).min().unwrap_or_default()
}

/// Every unlabelled tree on exactly `n` vertices, in canonical-form order.
pub fn trees_with_n_vertices(n: usize) -> Vec<Forest> {
    let mut level = vec![Forest::new(1, Vec::new()).expect("single vertex")];
    if n == 0 {
        return Vec::new();
    }
    for size in 2..=n {
        let mut seen: BTreeMap<String, Forest> = BTreeMap::new();
        for t in &level {
            for v in 0..t.vertex_count() {
                let mut edges = t.edges().to_vec();
                edges.push((v, size - 1));
                let grown = Forest::new(size, edges).expect("adding a leaf keeps a tree");
                seen.entry(canonical_form(&grown)).or_insert(grown);
            }
        }
        level = seen.into_values().collect();
    }
    level
}

/// All unlabelled trees with `1..=n_max` vertices, optionally only those with maximum degree exactly `delta`.
pub fn enumerate_trees(n_max: usize, delta: Option<usize>) -> Vec<Forest> {
    (1..=n_max).flat_map(trees_with_n_vertices).filter(|t| delta.is_none_or(|d| t.delta() == d)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub delta: usize,
    pub k: usize,
    pub first_player: Player,
    pub bob_may_skip: bool,
    /// Edge-list text of the tree.
    pub tree: String,
}

/// Smallest tree (by edge count, then canonical order) with maximum degree
/// `delta` and at most `max_edges` edges where Bob wins with `delta` colours.
pub fn find_lower_bound_witness(delta: usize, max_edges: usize, bob_may_skip: bool) -> Result<Option<Witness>, OracleError> {
    for n in 2..=max_edges + 1 {
        for tree in trees_with_n_vertices(n).into_iter().filter(|t| t.delta() == delta) {
            for first_player in [Player::Alice, Player::Bob] {
                let cfg = SolveConfig { cap: max_edges, ..SolveConfig::new(delta, first_player, bob_may_skip) };
                if solve(&tree, &cfg)? == Winner::BobWins {
                    return Ok(Some(Witness { delta, k: delta, first_player, bob_may_skip, tree: tree.to_string() }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(f: &Forest, k: usize, first: Player, skip: bool) -> Winner {
        solve(f, &SolveConfig::new(k, first, skip)).unwrap()
    }

    #[test]
    fn single_edge_one_colour() {
        assert_eq!(value(&Forest::path(2), 1, Player::Alice, true), Winner::AliceWins);
    }

    #[test]
    fn p4_two_colours_alice_first() {
        assert_eq!(value(&Forest::path(4), 2, Player::Alice, false), Winner::AliceWins);
    }

    #[test]
    fn p6_two_colours_bob_wins() {
        assert_eq!(value(&Forest::path(6), 2, Player::Alice, false), Winner::BobWins);
    }

    #[test]
    fn cap_and_colour_limits() {
        let f = Forest::path(12);
        assert_eq!(solve(&f, &SolveConfig::new(3, Player::Alice, true)), Err(OracleError::CapExceeded { edges: 11, cap: 9 }));
        let g = Forest::path(3);
        assert!(matches!(solve(&g, &SolveConfig::new(16, Player::Alice, true)), Err(OracleError::TooManyColours { .. })));
    }

    #[test]
    fn key_ignores_colour_names() {
        assert_eq!(Solver::key(&[3, 0, 5, 3], Player::Bob), Solver::key(&[1, 0, 2, 1], Player::Bob));
        assert_ne!(Solver::key(&[1, 0, 2, 1], Player::Alice), Solver::key(&[1, 0, 2, 1], Player::Bob));
    }

    #[test]
    fn small_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| trees_with_n_vertices(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6]);
    }

    #[test]
    fn path_and_star_have_different_forms() {
        assert_ne!(canonical_form(&Forest::path(4)), canonical_form(&Forest::star(3)));
        let relabelled = Forest::new(4, vec![(2, 0), (0, 3), (3, 1)]).unwrap();
        assert_eq!(canonical_form(&Forest::path(4)), canonical_form(&relabelled));
    }
}
