//! Python bindings: play games, query the oracle, enumerate trees.

use std::sync::Arc;

use edgegame::engine::{alice_action, full_report, AlicePolicy, InvariantReport};
use edgegame::oracle::{self, SolveConfig};
use edgegame::{Action, Colour, Forest, GameConfig, GameState, Player, StrategyConfig, Winner};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_player(s: &str) -> PyResult<Player> {
    s.parse().map_err(value_err)
}

fn to_py<'py>(py: Python<'py>, v: &InvariantReport) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn winner_name(w: Winner) -> &'static str {
    match w {
        Winner::Ongoing => "ongoing",
        Winner::AliceWins => "alice_wins",
        Winner::BobWins => "bob_wins",
    }
}

/// Tree in the edge-list file format.
fn forest(tree: &str) -> PyResult<Forest> {
    Forest::parse(tree).map_err(value_err)
}

/// A game where Python plays Bob and the engine plays Alice.
#[pyclass]
struct Game {
    state: GameState,
}

#[pymethods]
impl Game {
    #[new]
    #[pyo3(signature = (tree, k=None, first_player="alice", bob_may_skip=true))]
    fn new(tree: &str, k: Option<Colour>, first_player: &str, bob_may_skip: bool) -> PyResult<Self> {
        let f = Arc::new(forest(tree)?);
        let mut config = GameConfig { first_player: parse_player(first_player)?, bob_may_skip, ..GameConfig::for_forest(&f) };
        if let Some(k) = k {
            config.k = k;
        }
        Ok(Self { state: GameState::new(f, config) })
    }

    /// Colours `edge` for Bob.
    fn bob_colour(&mut self, edge: usize, colour: Colour) -> PyResult<()> {
        self.state.make_move(Player::Bob, Action::Colour { edge, colour }).map(drop).map_err(value_err)
    }

    fn bob_skip(&mut self) -> PyResult<()> {
        self.state.make_move(Player::Bob, Action::Skip).map(drop).map_err(value_err)
    }

    /// Lets the strategy move for Alice; returns `(edge, colour, case)`.
    fn alice_move(&mut self) -> PyResult<(usize, Colour, String)> {
        let policy = AlicePolicy::Strategy(StrategyConfig { best_effort: true, ..Default::default() });
        let (action, decision) = alice_action(&self.state, &policy).map_err(PyRuntimeError::new_err)?;
        self.state.make_move(Player::Alice, action).map_err(value_err)?;
        match (action, decision) {
            (Action::Colour { edge, colour }, Some(d)) => Ok((edge, colour, format!("{:?}", d.case_tag))),
            _ => Err(PyRuntimeError::new_err("strategy returned no colouring")),
        }
    }

    fn feasible(&self, edge: usize) -> Vec<u32> {
        self.state.feasible_colours(edge).into_iter().map(u32::from).collect()
    }

    #[getter]
    fn turn(&self) -> &'static str {
        match self.state.turn() {
            Player::Alice => "alice",
            Player::Bob => "bob",
        }
    }

    #[getter]
    fn winner(&self) -> &'static str {
        winner_name(self.state.winner())
    }

    #[getter]
    /// Colour per edge, 0 for uncoloured.
    fn colours(&self) -> Vec<u32> {
        self.state.colours().iter().map(|&c| u32::from(c)).collect()
    }

    #[getter]
    fn uncoloured(&self) -> Vec<usize> {
        let mut v = self.state.uncoloured_edges().to_vec();
        v.sort_unstable();
        v
    }

    /// Invariant report over every live component.
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &full_report(&self.state))
    }
}

/// Exact winner under optimal play.
#[pyfunction]
#[pyo3(signature = (tree, k, first_player="alice", bob_may_skip=true))]
fn solve(tree: &str, k: usize, first_player: &str, bob_may_skip: bool) -> PyResult<&'static str> {
    let cfg = SolveConfig::new(k, parse_player(first_player)?, bob_may_skip);
    oracle::solve(&forest(tree)?, &cfg).map(winner_name).map_err(value_err)
}

/// Game chromatic index.
#[pyfunction]
#[pyo3(signature = (tree, bob_may_skip=true))]
fn index(tree: &str, bob_may_skip: bool) -> PyResult<usize> {
    oracle::game_chromatic_index(&forest(tree)?, bob_may_skip).map_err(value_err)
}

/// Unlabelled trees with up to `n` vertices as edge lists.
#[pyfunction]
#[pyo3(signature = (n, delta=None))]
fn enumerate(n: usize, delta: Option<usize>) -> Vec<Vec<(usize, usize)>> {
    oracle::enumerate_trees(n, delta).iter().map(|t| t.edges().to_vec()).collect()
}

#[pymodule]
fn edgegame_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(index, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    Ok(())
}
