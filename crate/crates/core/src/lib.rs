//! Edge-colouring game on trees.
//!
//! Alice and Bob alternately colour edges of a forest with `k` colours so that
//! no two edges at a vertex share a colour; Alice wins if every edge ends up
//! coloured. For maximum degree 4 or 5 and `k = Δ + 1` the [`strategy`]
//! module plays a winning strategy for Alice (Bob may skip turns), choosing
//! each move with a constant number of LCA queries.

pub mod adversary;
pub mod component;
pub mod decremental;
pub mod engine;
pub mod error;
pub mod forest;
pub mod game;
pub mod lca;
pub mod oracle;
pub mod random;
pub mod strategy;
pub mod verify;

pub use component::{ColouredLeaf, ComponentView};
pub use decremental::{DecrementalForest, Label, Variant};
pub use engine::{play, GameTrace, MoveRecord, Outcome};
pub use error::*;
pub use forest::{EdgeId, Forest, Vertex};
pub use game::{Action, Colour, GameConfig, GameState, Player, Winner};
pub use lca::LcaIndex;
pub use strategy::{choose_move, StrategyConfig, StrategyDecision};
