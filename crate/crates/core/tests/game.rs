use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use edgegame::adversary::{legal_actions, Bob, BobKind, BobPolicy};
use edgegame::engine::{self, AlicePolicy, Outcome, PlayOptions};
use edgegame::random::random_tree;
use edgegame::{Action, Forest, GameConfig, GameState, MoveError, Player, StrategyConfig, Variant, Winner};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Per component: uncoloured edges and (coloured edge, inner endpoint) pairs.
type Partition = BTreeSet<(BTreeSet<usize>, BTreeSet<(usize, usize)>)>;

/// Uncoloured-edge components by plain traversal: per component, its edge set
/// and its coloured edges with the endpoint inside.
fn fresh_components(state: &GameState) -> Partition {
    let f = state.forest();
    let n = f.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut out = BTreeMap::<usize, (BTreeSet<usize>, BTreeSet<(usize, usize)>)>::new();
    for s in 0..n {
        if comp[s] != usize::MAX || f.incident(s).iter().all(|&e| state.colour_of(e).is_some()) {
            continue;
        }
        comp[s] = s;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &e in f.incident(x) {
                let entry = out.entry(s).or_default();
                if state.colour_of(e).is_some() {
                    entry.1.insert((e, x));
                    continue;
                }
                entry.0.insert(e);
                let y = f.other_end(e, x);
                if comp[y] == usize::MAX {
                    comp[y] = s;
                    stack.push(y);
                }
            }
        }
    }
    out.into_values().collect()
}

fn tracked_components(state: &GameState) -> Partition {
    let mut by_label = BTreeMap::<u64, BTreeSet<usize>>::new();
    for &e in state.uncoloured_edges() {
        by_label.entry(state.component_of_edge(e).unwrap().label).or_default().insert(e);
    }
    by_label
        .into_iter()
        .map(|(label, edges)| {
            let c = state.component(label).unwrap();
            (edges, c.leaves.iter().map(|l| (l.edge, l.attach)).collect())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_matches_fresh_traversal(seed in any::<u64>(), cap in 2usize..=5, two_level in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Arc::new(random_tree(50, cap, &mut rng));
        let variant = if two_level { Variant::TwoLevel } else { Variant::Baseline };
        let cfg = GameConfig { k: 8, variant, ..GameConfig::for_forest(&f) };
        let mut state = GameState::new(f, cfg);
        while state.winner() == Winner::Ongoing {
            let actions: Vec<_> = legal_actions(&state).into_iter().filter(|a| *a != Action::Skip).collect();
            let Action::Colour { edge, colour } = *actions.choose(&mut rng).unwrap() else { unreachable!() };
            state.apply_colouring(edge, colour).unwrap();
            prop_assert_eq!(tracked_components(&state), fresh_components(&state));
            prop_assert_eq!(engine::audit(&state), Ok(()));
        }
    }

    #[test]
    fn replay_is_deterministic(seed in any::<u64>()) {
        let f = Arc::new(random_tree(300, 4, &mut ChaCha8Rng::seed_from_u64(seed)));
        let run = || {
            let mut bob = Bob::new(BobPolicy::new(BobKind::Random, seed));
            engine::play(f.clone(), GameConfig::for_forest(&f), &mut bob, AlicePolicy::Strategy(StrategyConfig::default()), PlayOptions::full())
        };
        let (a, b) = (run(), run());
        let (mut ja, mut jb) = (Vec::new(), Vec::new());
        a.write_jsonl(&mut ja).unwrap();
        b.write_jsonl(&mut jb).unwrap();
        prop_assert_eq!(ja, jb);
        let reports = engine::replay(f.clone(), GameConfig::for_forest(&f), &a.moves).unwrap();
        prop_assert_eq!(reports, a.moves.iter().map(|m| m.report.clone()).collect::<Vec<_>>());
    }
}

fn fresh(forest: Forest) -> GameState {
    let cfg = GameConfig::for_forest(&forest);
    GameState::new(Arc::new(forest), cfg)
}

#[test]
fn illegal_moves_are_rejected() {
    let mut s = fresh(Forest::path(4));
    assert_eq!(s.make_move(Player::Bob, Action::Skip), Err(MoveError::NotYourTurn { expected: Player::Alice }));
    assert_eq!(s.make_move(Player::Alice, Action::Skip), Err(MoveError::SkipNotAllowed));
    assert_eq!(s.make_move(Player::Alice, Action::Colour { edge: 9, colour: 1 }), Err(MoveError::UnknownEdge(9)));
    assert_eq!(s.make_move(Player::Alice, Action::Colour { edge: 0, colour: 4 }), Err(MoveError::ColourOutOfRange { colour: 4, k: 3 }));
    s.make_move(Player::Alice, Action::Colour { edge: 1, colour: 1 }).unwrap();
    assert_eq!(
        s.make_move(Player::Bob, Action::Colour { edge: 0, colour: 1 }),
        Err(MoveError::ImproperColour { edge: 0, colour: 1, vertex: 1, feasible: vec![2, 3] })
    );
    assert_eq!(s.make_move(Player::Bob, Action::Colour { edge: 1, colour: 2 }), Err(MoveError::EdgeAlreadyColoured(1)));
    s.make_move(Player::Bob, Action::Skip).unwrap();
    assert_eq!(s.turn(), Player::Alice);
}

#[test]
fn dead_edge_ends_the_game() {
    // P4 with two colours: colouring the ends differently kills the middle edge
    let f = Forest::path(4);
    let cfg = GameConfig { k: 2, bob_may_skip: false, ..GameConfig::for_forest(&f) };
    let mut s = GameState::new(Arc::new(f), cfg);
    s.make_move(Player::Alice, Action::Colour { edge: 0, colour: 1 }).unwrap();
    s.make_move(Player::Bob, Action::Colour { edge: 2, colour: 2 }).unwrap();
    assert_eq!(s.winner(), Winner::BobWins);
    assert_eq!(s.make_move(Player::Alice, Action::Colour { edge: 1, colour: 1 }), Err(MoveError::GameOver));
}

#[test]
fn star_with_four_colours_always_completes() {
    for seed in 0..50 {
        let f = Arc::new(Forest::star(4));
        for first_player in [Player::Alice, Player::Bob] {
            let cfg = GameConfig { k: 4, first_player, ..GameConfig::for_forest(&f) };
            let mut bob = Bob::new(BobPolicy::new(BobKind::Spoiler, seed));
            let trace = engine::play(f.clone(), cfg, &mut bob, AlicePolicy::Greedy, PlayOptions::default());
            assert_eq!(trace.outcome, Outcome::AliceWins);
        }
    }
}

#[test]
fn lone_alice_colours_everything() {
    let f = Arc::new(random_tree(2000, 5, &mut ChaCha8Rng::seed_from_u64(3)));
    let mut bob = Bob::new(BobPolicy { skip_probability: 1.0, ..BobPolicy::new(BobKind::Skipper, 0) });
    let t = engine::play(
        f.clone(),
        GameConfig::for_forest(&f),
        &mut bob,
        AlicePolicy::Strategy(StrategyConfig::default()),
        PlayOptions::default(),
    );
    assert_eq!(t.outcome, Outcome::AliceWins);
    assert_eq!(t.stats.alice_moves, f.edge_count());
    assert_eq!(t.stats.bob_skips, t.stats.bob_moves);
}

#[test]
fn trace_lines_have_header_moves_footer() {
    let f = Arc::new(Forest::star(4));
    let mut bob = Bob::new(BobPolicy::new(BobKind::Random, 1));
    let t = engine::play(
        f.clone(),
        GameConfig::for_forest(&f),
        &mut bob,
        AlicePolicy::Strategy(StrategyConfig::default()),
        PlayOptions::full(),
    );
    let mut buf = Vec::new();
    t.write_jsonl(&mut buf).unwrap();
    let lines: Vec<serde_json::Value> = String::from_utf8(buf).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["type"], "header");
    assert_eq!(lines.last().unwrap()["type"], "footer");
    assert_eq!(lines.len(), t.moves.len() + 2);
    assert_eq!(lines[1]["player"], "alice");
    assert!(lines[1]["report"]["components"].is_array());
}

#[test]
fn first_moves_follow_the_small_cases() {
    let f = Arc::new(Forest::star(4));
    let mut bob = Bob::new(BobPolicy { skip_probability: 1.0, ..BobPolicy::new(BobKind::Skipper, 0) });
    let t = engine::play(
        f.clone(),
        GameConfig::for_forest(&f),
        &mut bob,
        AlicePolicy::Strategy(StrategyConfig::default()),
        PlayOptions::full(),
    );
    let tags: Vec<String> = engine::case_sequence(&t).iter().map(|c| format!("{c:?}")).collect();
    assert_eq!(tags, ["X0", "X1", "X2Adj", "StarAllIncident"]);
}
