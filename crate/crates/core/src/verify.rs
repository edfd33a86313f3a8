//! Exhaustive check of Alice's strategy: every Bob reply, every branch, with
//! invariant and consistency checks after each move.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adversary::exhaustive_actions;
use crate::engine::{audit, report};
use crate::error::{AdversaryError, StrategyError};
use crate::forest::{Forest, Vertex};
use crate::game::{Action, Colour, ComponentKey, GameConfig, GameState, Player, Winner};
use crate::oracle;
use crate::strategy::{choose_move, StrategyConfig};

/// Everything Alice's choice depends on: the colouring, the mover, and the
/// remembered base node of each component.
type StateKey = (Vec<Colour>, Player, Vec<(ComponentKey, Option<Vertex>)>);

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub trees: usize,
    pub states: usize,
    pub memo_hits: usize,
    pub alice_wins: usize,
    pub bob_wins: usize,
    pub strategy_stuck: usize,
    pub post_alice_failures: usize,
    pub post_bob_failures: usize,
    pub audit_failures: usize,
    /// Trees on which some branch did not end in an Alice win.
    pub losing_trees: Vec<String>,
    pub first_failure: Option<String>,
}

impl VerifyReport {
    pub fn clean(&self) -> bool {
        self.bob_wins == 0
            && self.strategy_stuck == 0
            && self.post_alice_failures == 0
            && self.post_bob_failures == 0
            && self.audit_failures == 0
            && self.losing_trees.is_empty()
    }

    pub fn merge(&mut self, other: VerifyReport) {
        self.trees += other.trees;
        self.states += other.states;
        self.memo_hits += other.memo_hits;
        self.alice_wins += other.alice_wins;
        self.bob_wins += other.bob_wins;
        self.strategy_stuck += other.strategy_stuck;
        self.post_alice_failures += other.post_alice_failures;
        self.post_bob_failures += other.post_bob_failures;
        self.audit_failures += other.audit_failures;
        self.losing_trees.extend(other.losing_trees);
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        if self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }
}

struct Explorer<'a> {
    strategy: &'a StrategyConfig,
    cap: usize,
    delta: usize,
    memo: HashMap<StateKey, bool>,
    rep: VerifyReport,
}

impl Explorer<'_> {
    fn key(state: &GameState) -> StateKey {
        let mut priors: Vec<_> = state.components().map(|c| (c.key, c.prior_base)).collect();
        priors.sort_unstable();
        (state.colours().to_vec(), state.turn(), priors)
    }

    fn check(&mut self, state: &GameState, mover: Player) {
        let r = report(state);
        let ok = match mover {
            Player::Alice => r.post_alice_ok(self.delta),
            Player::Bob => r.post_bob_ok(self.delta),
        };
        if !ok {
            match mover {
                Player::Alice => self.rep.post_alice_failures += 1,
                Player::Bob => self.rep.post_bob_failures += 1,
            }
            self.rep.fail(|| format!("invariants after {mover:?} at colouring {:?}: {r:?}", state.colours()));
        }
        if let Err(e) = audit(state) {
            self.rep.audit_failures += 1;
            self.rep.fail(|| format!("audit at colouring {:?}: {e}", state.colours()));
        }
    }

    /// True when every continuation ends in an Alice win.
    fn explore(&mut self, state: &GameState) -> Result<bool, AdversaryError> {
        match state.winner() {
            Winner::AliceWins => {
                self.rep.alice_wins += 1;
                return Ok(true);
            }
            Winner::BobWins => {
                self.rep.bob_wins += 1;
                self.rep.fail(|| format!("Bob wins at colouring {:?}", state.colours()));
                return Ok(false);
            }
            Winner::Ongoing => {}
        }
        let key = Self::key(state);
        if let Some(&v) = self.memo.get(&key) {
            self.rep.memo_hits += 1;
            return Ok(v);
        }
        self.rep.states += 1;
        let value = match state.turn() {
            Player::Alice => match choose_move(state, self.strategy) {
                Ok(d) => {
                    let mut next = state.clone();
                    next.make_move(Player::Alice, Action::Colour { edge: d.edge, colour: d.colour }).expect("strategy moves are legal");
                    self.check(&next, Player::Alice);
                    self.explore(&next)?
                }
                Err(e) => {
                    if matches!(e, StrategyError::StrategyStuck { .. }) {
                        self.rep.strategy_stuck += 1;
                    }
                    self.rep.fail(|| format!("strategy error at colouring {:?}: {e}", state.colours()));
                    false
                }
            },
            Player::Bob => {
                let mut all = true;
                for action in exhaustive_actions(state, self.cap)? {
                    let mut next = state.clone();
                    next.make_move(Player::Bob, action).expect("enumerated moves are legal");
                    self.check(&next, Player::Bob);
                    all &= self.explore(&next)?;
                }
                all
            }
        };
        self.memo.insert(key, value);
        Ok(value)
    }
}

/// Plays the strategy against every Bob line on one forest.
pub fn verify_tree(forest: Arc<Forest>, config: GameConfig, strategy: &StrategyConfig, cap: usize) -> Result<VerifyReport, AdversaryError> {
    let mut ex = Explorer { strategy, cap, delta: forest.delta(), memo: HashMap::new(), rep: VerifyReport::default() };
    let text = forest.to_string();
    let state = GameState::new(forest, config);
    let won = ex.explore(&state)?;
    ex.rep.trees = 1;
    if !won {
        ex.rep.losing_trees.push(text);
    }
    Ok(ex.rep)
}

/// [`verify_tree`] over every unlabelled tree with at most `max_edges` edges
/// and maximum degree `delta`, with `Δ + 1` colours and both first movers.
pub fn verify_all(max_edges: usize, delta: usize, bob_may_skip: bool, strategy: &StrategyConfig) -> Result<VerifyReport, AdversaryError> {
    let trees = oracle::enumerate_trees(max_edges + 1, Some(delta));
    let reports: Vec<Result<VerifyReport, AdversaryError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = trees
            .into_iter()
            .map(|t| {
                scope.spawn(move || {
                    let forest = Arc::new(t);
                    let mut rep = VerifyReport::default();
                    for first_player in [Player::Alice, Player::Bob] {
                        let cfg = GameConfig { first_player, bob_may_skip, ..GameConfig::for_forest(&forest) };
                        rep.merge(verify_tree(forest.clone(), cfg, strategy, max_edges)?);
                    }
                    rep.trees = 1;
                    Ok(rep)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verifier thread panicked")).collect()
    });
    let mut total = VerifyReport::default();
    for r in reports {
        total.merge(r?);
    }
    Ok(total)
}
