//! HTTP game service: a human plays Bob, the engine answers as Alice.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use edgegame::component::Classification;
use edgegame::engine::{alice_action, full_report, report, AlicePolicy, InvariantReport, MoveRecord};
use edgegame::game::MAX_COLOURS;
use edgegame::oracle::{self, SolveConfig};
use edgegame::{Action, Colour, EdgeId, Forest, GameConfig, GameState, MoveError, Player, StrategyConfig, Winner};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, msg: impl Into<String>) -> Self {
        Self { status, body: json!({ "error": msg.into() }) }
    }

    fn malformed(msg: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, msg)
    }

    fn conflict(msg: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, msg)
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::malformed(r.body_text())
    }
}

impl From<MoveError> for ApiError {
    fn from(e: MoveError) -> Self {
        let err = Self::conflict(e.to_string());
        match e {
            MoveError::ImproperColour { feasible, vertex, .. } => err.with("feasible", json!(feasible)).with("vertex", json!(vertex)),
            MoveError::NotYourTurn { expected } => err.with("expected", json!(expected)),
            _ => err,
        }
    }
}

/// Tree given as file text or as an explicit edge list.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TreeSpec {
    Text(String),
    Edges { n: usize, edges: Vec<(usize, usize)> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateGame {
    pub tree: TreeSpec,
    pub k: Option<Colour>,
    pub first_player: Option<Player>,
    pub bob_may_skip: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub move_no: usize,
    pub edge_id: Option<EdgeId>,
    pub colour: Option<Colour>,
    #[serde(default)]
    pub skip: bool,
}

#[derive(Debug, Serialize)]
pub struct ComponentAnnotation {
    pub label: u64,
    pub edges: Vec<EdgeId>,
    pub x: usize,
    pub base_nodes: Vec<usize>,
    pub classification: Option<Classification>,
    #[serde(rename = "S_ok")]
    pub s_ok: bool,
    #[serde(rename = "M_ok")]
    pub m_ok: bool,
}

#[derive(Debug, Serialize)]
pub struct Snapshot {
    pub id: String,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub config: GameConfig,
    pub move_no: usize,
    pub turn: Player,
    /// Colour per edge, 0 for uncoloured.
    pub colours: Vec<Colour>,
    pub winner: Winner,
    /// Feasible colours per uncoloured edge.
    pub feasible: HashMap<EdgeId, Vec<Colour>>,
    pub components: Vec<ComponentAnnotation>,
    pub report: InvariantReport,
    pub history: Vec<MoveRecord>,
    pub created: u64,
    pub updated: u64,
}

#[derive(Debug, Serialize)]
pub struct MoveResponse {
    pub records: Vec<MoveRecord>,
    pub report: InvariantReport,
    /// Invariants expected after an Alice move held after her reply.
    pub alice_invariants_ok: Option<bool>,
    pub outcome: Winner,
    pub snapshot: Snapshot,
}

pub struct Session {
    id: String,
    state: GameState,
    history: Vec<MoveRecord>,
    created: u64,
    updated: u64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn strategy() -> AlicePolicy {
    AlicePolicy::Strategy(StrategyConfig { best_effort: true, ..Default::default() })
}

impl Session {
    fn apply(&mut self, player: Player, action: Action, decision: Option<edgegame::StrategyDecision>) -> Result<MoveRecord, MoveError> {
        self.state.make_move(player, action)?;
        let rec = MoveRecord { move_no: self.state.move_no() - 1, player, action, decision, report: report(&self.state) };
        self.history.push(rec.clone());
        self.updated = now();
        Ok(rec)
    }

    /// Alice replies while it is her turn and the game is open.
    fn alice_reply(&mut self) -> Result<Option<MoveRecord>, ApiError> {
        if self.state.winner() != Winner::Ongoing || self.state.turn() != Player::Alice {
            return Ok(None);
        }
        let (action, decision) = alice_action(&self.state, &strategy())
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("Alice failed: {e}")))?;
        let rec = self
            .apply(Player::Alice, action, decision)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("Alice played an illegal move: {e}")))?;
        Ok(Some(rec))
    }

    fn snapshot(&self) -> Snapshot {
        let s = &self.state;
        let f = s.forest();
        let mut edges_by_label: HashMap<u64, Vec<EdgeId>> = HashMap::new();
        for &e in s.uncoloured_edges() {
            if let Some(c) = s.component_of_edge(e) {
                edges_by_label.entry(c.label).or_default().push(e);
            }
        }
        let mut components: Vec<ComponentAnnotation> = s
            .components()
            .map(|c| {
                let mut edges = edges_by_label.remove(&c.label).unwrap_or_default();
                edges.sort_unstable();
                ComponentAnnotation {
                    label: c.label,
                    edges,
                    x: c.view.x,
                    base_nodes: c.view.base_nodes.clone(),
                    classification: c.view.classification.clone(),
                    s_ok: c.view.s_ok,
                    m_ok: c.view.m_ok,
                }
            })
            .collect();
        components.sort_by_key(|c| c.edges.first().copied());
        Snapshot {
            id: self.id.clone(),
            n: f.vertex_count(),
            edges: f.edges().to_vec(),
            config: *s.config(),
            move_no: s.move_no(),
            turn: s.turn(),
            colours: s.colours().to_vec(),
            winner: s.winner(),
            feasible: s.uncoloured_edges().iter().map(|&e| (e, s.feasible_colours(e))).collect(),
            components,
            report: full_report(s),
            history: self.history.clone(),
            created: self.created,
            updated: self.updated,
        }
    }
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Arc<Mutex<Session>>>>>,
    next_id: Arc<AtomicU64>,
}

impl AppState {
    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let map = self.sessions.lock().expect("session map poisoned");
        map.get(id).cloned().ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown game {id}")))
    }
}

pub fn router() -> Router {
    router_with(AppState::default())
}

pub fn router_with(state: AppState) -> Router {
    Router::new()
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(get_game))
        .route("/api/games/{id}/moves", post(submit_move))
        .route("/api/games/{id}/hint", get(hint))
        .with_state(state)
}

fn build_forest(spec: TreeSpec) -> Result<Forest, ApiError> {
    let parsed = match spec {
        TreeSpec::Text(text) => Forest::parse(&text),
        TreeSpec::Edges { n, edges } => Forest::new(n, edges),
    };
    parsed.map_err(|e| ApiError::malformed(format!("bad tree: {e}")))
}

async fn create_game(
    State(app): State<AppState>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> Result<(StatusCode, Json<Snapshot>), ApiError> {
    let Json(req) = body?;
    let forest = Arc::new(build_forest(req.tree)?);
    let mut config = GameConfig::for_forest(&forest);
    if let Some(k) = req.k {
        if k == 0 || k > MAX_COLOURS {
            return Err(ApiError::malformed(format!("k must lie in 1..={MAX_COLOURS}")));
        }
        config.k = k;
    }
    if let Some(p) = req.first_player {
        config.first_player = p;
    }
    if let Some(skip) = req.bob_may_skip {
        config.bob_may_skip = skip;
    }
    let id = format!("g{}", app.next_id.fetch_add(1, Ordering::Relaxed) + 1);
    let t = now();
    let mut session = Session { id: id.clone(), state: GameState::new(forest, config), history: Vec::new(), created: t, updated: t };
    session.alice_reply()?;
    let snap = session.snapshot();
    app.sessions.lock().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(snap)))
}

async fn get_game(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Snapshot>, ApiError> {
    let session = app.session(&id)?;
    let snap = session.lock().expect("session poisoned").snapshot();
    Ok(Json(snap))
}

async fn submit_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<MoveResponse>, ApiError> {
    let session = app.session(&id)?;
    let Json(req) = body?;
    let action = match (req.skip, req.edge_id, req.colour) {
        (true, None, None) => Action::Skip,
        (false, Some(edge), Some(colour)) => Action::Colour { edge, colour },
        _ => return Err(ApiError::malformed("give either skip: true or both edge_id and colour")),
    };
    let mut s = session.lock().expect("session poisoned");
    if req.move_no != s.state.move_no() {
        return Err(ApiError::conflict("stale move_no").with("expected", json!(s.state.move_no())));
    }
    let mut records = vec![s.apply(Player::Bob, action, None)?];
    let alice = s.alice_reply()?;
    let alice_invariants_ok = alice.as_ref().map(|r| r.report.post_alice_ok(s.state.forest().delta()));
    records.extend(alice);
    Ok(Json(MoveResponse {
        report: records.last().expect("Bob's record").report.clone(),
        records,
        alice_invariants_ok,
        outcome: s.state.winner(),
        snapshot: s.snapshot(),
    }))
}

async fn hint(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let session = app.session(&id)?;
    let (forest, colours, turn, config) = {
        let s = session.lock().expect("session poisoned");
        (s.state.forest().clone(), s.state.colours().to_vec(), s.state.turn(), *s.state.config())
    };
    let cfg = SolveConfig::new(config.k as usize, turn, config.bob_may_skip);
    // the solver may take a while; keep the runtime responsive
    let verdict = tokio::task::spawn_blocking(move || oracle::solve_position(&forest, &colours, turn, &cfg))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| ApiError::conflict(e.to_string()))?;
    Ok(Json(json!({ "turn": turn, "winner": verdict })))
}
