use thiserror::Error;

use crate::forest::{EdgeId, Vertex};
use crate::game::{Colour, Player};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("edge {edge} closes a cycle")]
    CycleDetected { edge: EdgeId },
    #[error("edge {edge} references vertex {vertex} but n = {n}")]
    BadVertexIndex { edge: EdgeId, vertex: Vertex, n: usize },
    #[error("edge {edge} duplicates ({u}, {v})")]
    DuplicateEdge { edge: EdgeId, u: Vertex, v: Vertex },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {0} is already coloured")]
    EdgeAlreadyColoured(EdgeId),
    #[error("colour {colour} outside 1..={k}")]
    ColourOutOfRange { colour: Colour, k: Colour },
    #[error("improper: colour {colour} used at vertex {vertex}")]
    ImproperColour { edge: EdgeId, colour: Colour, vertex: Vertex, feasible: Vec<Colour> },
    #[error("skipping is not allowed for this player")]
    SkipNotAllowed,
    #[error("it is {expected:?}'s turn")]
    NotYourTurn { expected: Player },
    #[error("the game is already over")]
    GameOver,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LcaError {
    #[error("vertices {0} and {1} lie in different trees")]
    DifferentComponents(Vertex, Vertex),
    #[error("next_on_path needs two distinct vertices")]
    SameVertex,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecrementalError {
    #[error("edge {0} was already deleted")]
    EdgeAlreadyDeleted(EdgeId),
    #[error("({0}, {1}) is not an edge of the forest")]
    NotAnEdge(Vertex, Vertex),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("component has {0} base nodes; matched/unmatched needs exactly one")]
    NoUniqueBaseNode(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("no uncoloured edge is left")]
    NoUncolouredEdge,
    #[error("maximum degree {0} is outside the supported range 4..=5")]
    UnsupportedDelta(usize),
    #[error("no feasible colour for edge {edge} ({case})")]
    StrategyStuck { edge: EdgeId, case: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("Bob has no legal move and may not skip")]
    BobStuck,
    #[error("position has {edges} edges, above the exhaustive cap of {cap}")]
    BudgetExceeded { edges: usize, cap: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("forest has {edges} edges, above the solver cap of {cap}")]
    CapExceeded { edges: usize, cap: usize },
    #[error("solver packs colours into 4 bits; k={k} exceeds {max}")]
    TooManyColours { k: usize, max: usize },
}
