//! HTTP API for live drafts against the engine.
//!
//! Sessions live in memory behind one async mutex each, so requests on a
//! session are serialized while different sessions proceed in parallel.
//! Engine searches run on the blocking pool. Under the budgeted policy a
//! reply that does not fit the node budget is finished in the background
//! while the session reports `engine_thinking`.

mod error;
pub mod session;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use tokio::sync::Mutex;

use draftgame::io::{instance_to_value, parse_instance, parse_position, position_to_value};
use draftgame::solver::{dominated_agents, dominating_agents, find_dominating_pair};
use draftgame::{engine_move, evaluate_moves, solve, DraftError, Instance, MoveValue, Player, SolveOptions};

pub use error::ApiError;
use draftgame::io::big_json as big;
use session::{move_value_json, Policy, Session, Status};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_ENGINE_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, Default)]
pub struct Config {
    /// Sessions are written here as JSON after every change.
    pub snapshot_dir: Option<PathBuf>,
    /// Node budget for budgeted sessions that do not name one.
    pub default_budget: Option<u64>,
    /// Budget for the background search after a budgeted reply overflows;
    /// `None` searches to the end.
    pub escalation_budget: Option<u64>,
    /// Static files (the browser client) served under `/`.
    pub static_dir: Option<PathBuf>,
}

impl Config {
    /// `DRAFTGAME_SNAPSHOT_DIR`, `DRAFTGAME_ENGINE_BUDGET`,
    /// `DRAFTGAME_ESCALATION_BUDGET`, `DRAFTGAME_STATIC_DIR`.
    pub fn from_env() -> Config {
        let path = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        let num = |k: &str| std::env::var(k).ok().and_then(|v| v.parse().ok());
        Config {
            snapshot_dir: path("DRAFTGAME_SNAPSHOT_DIR"),
            default_budget: num("DRAFTGAME_ENGINE_BUDGET"),
            escalation_budget: num("DRAFTGAME_ESCALATION_BUDGET"),
            static_dir: path("DRAFTGAME_STATIC_DIR"),
        }
    }
}

type Shared = Arc<Mutex<Session>>;

pub struct AppState {
    config: Config,
    instances: RwLock<HashMap<String, Instance>>,
    sessions: RwLock<HashMap<String, Shared>>,
}

impl AppState {
    pub fn new(config: Config) -> Arc<AppState> {
        Arc::new(AppState {
            config,
            instances: RwLock::new(HashMap::new()),
            sessions: RwLock::new(HashMap::new()),
        })
    }

    fn session(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session_not_found", format!("no session {id:?}")))
    }

    fn snapshot(&self, s: &Session) {
        let Some(dir) = &self.config.snapshot_dir else { return };
        let doc = json!({
            "id": s.id,
            "human_side": s.human.as_str(),
            "policy": s.policy.name(),
            "budget": s.policy.budget(),
            "start": position_to_value(&s.start),
            "move_log": s.log.iter().map(|&k| s.start.instance().agent(k).id.clone()).collect::<Vec<_>>(),
        });
        let tmp = dir.join(format!("{}.json.tmp", s.id));
        let path = dir.join(format!("{}.json", s.id));
        let write = std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(&tmp, serde_json::to_vec_pretty(&doc).unwrap()))
            .and_then(|_| std::fs::rename(&tmp, &path));
        if let Err(e) = write {
            eprintln!("snapshot {}: {e}", path.display());
        }
    }

    /// Reloads every session snapshot found in the snapshot directory,
    /// replaying its move log. Returns how many were restored.
    pub fn restore(&self) -> std::io::Result<usize> {
        let Some(dir) = &self.config.snapshot_dir else { return Ok(0) };
        let Ok(entries) = std::fs::read_dir(dir) else { return Ok(0) };
        let mut n = 0;
        for e in entries {
            let path = e?.path();
            if path.extension().and_then(|x| x.to_str()) != Some("json") {
                continue;
            }
            match restore_one(&std::fs::read(&path)?) {
                Ok(s) => {
                    self.sessions.write().unwrap().insert(s.id.clone(), Arc::new(Mutex::new(s)));
                    n += 1;
                }
                Err(e) => eprintln!("skipping snapshot {}: {e}", path.display()),
            }
        }
        Ok(n)
    }
}

/// Restarts the engine on restored sessions that were waiting for it.
pub async fn resume_stalled(st: &Arc<AppState>) {
    let all: Vec<Shared> = st.sessions.read().unwrap().values().cloned().collect();
    for shared in all {
        let s = shared.lock().await;
        if s.status == Status::EngineThinking && s.engine_to_move() {
            spawn_escalation(st.clone(), shared.clone(), s.position.clone(), s.log.len());
        }
    }
}

fn restore_one(bytes: &[u8]) -> Result<Session, String> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    let start = parse_position(doc["start"].to_string().as_bytes()).map_err(|e| e.to_string())?;
    let human: Player = doc["human_side"].as_str().unwrap_or("alice").parse().map_err(|e: DraftError| e.to_string())?;
    let policy = match (doc["policy"].as_str(), doc["budget"].as_u64()) {
        (Some("budgeted"), Some(budget)) => Policy::Budgeted { budget },
        _ => Policy::Exact,
    };
    let id = doc["id"].as_str().ok_or("missing id")?.to_string();
    let mut s = Session::new(id, start.instance().clone(), human, policy);
    for v in doc["move_log"].as_array().ok_or("missing move_log")? {
        let k = start.instance().require_index(v.as_str().unwrap_or("")).map_err(|e| e.to_string())?;
        s.apply(k).map_err(|e| e.to_string())?;
    }
    if s.engine_to_move() {
        // An interrupted background search; see `resume_stalled`.
        s.status = Status::EngineThinking;
    }
    Ok(s)
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/healthz", get(healthz))
        .route("/instances", post(create_instance))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", post(submit_move))
        .route("/sessions/{id}/hints", get(get_hints))
        .route("/sessions/{id}/whatif", get(what_if));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    };
    api.with_state(state)
}

async fn healthz() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

fn parse_body(body: &Bytes) -> Result<Value, ApiError> {
    if body.is_empty() {
        return Ok(json!({}));
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("invalid_json", e.to_string()))
}

async fn create_instance(State(st): State<Arc<AppState>>, body: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let inst = parse_instance(&body).map_err(|e| ApiError::bad_request("invalid_instance", e.to_string()))?;
    let id = format!("inst-{}", uuid::Uuid::new_v4().simple());
    let doc = json!({
        "id": id,
        "tasks": inst.tasks(),
        "agents": inst.len(),
        "instance": instance_to_value(&inst),
    });
    st.instances.write().unwrap().insert(id, inst);
    Ok((StatusCode::CREATED, Json(doc)))
}

async fn create_session(State(st): State<Arc<AppState>>, body: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let req = parse_body(&body)?;
    let inst = match (req.get("instance_id"), req.get("instance")) {
        (Some(Value::String(id)), None) => st
            .instances
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("instance_not_found", format!("no instance {id:?}")))?,
        (None, Some(doc)) => parse_instance(doc.to_string().as_bytes())
            .map_err(|e| ApiError::bad_request("invalid_instance", e.to_string()))?,
        _ => {
            return Err(ApiError::bad_request(
                "invalid_request",
                "give exactly one of instance_id (string) or instance (object)",
            ))
        }
    };
    let human: Player = match req.get("human_side") {
        None => Player::Alice,
        Some(Value::String(s)) => s.parse().map_err(|e: DraftError| ApiError::bad_request("invalid_request", e.to_string()))?,
        Some(_) => return Err(ApiError::bad_request("invalid_request", "human_side must be \"alice\" or \"bob\"")),
    };
    let policy = match req.get("policy").and_then(Value::as_str).unwrap_or("exact") {
        "exact" => Policy::Exact,
        "budgeted" => Policy::Budgeted {
            budget: req
                .get("budget")
                .and_then(Value::as_u64)
                .or(st.config.default_budget)
                .unwrap_or(DEFAULT_ENGINE_BUDGET),
        },
        other => {
            return Err(ApiError::bad_request(
                "invalid_request",
                format!("policy must be \"exact\" or \"budgeted\", got {other:?}"),
            ))
        }
    };
    if inst.len() > draftgame::solver::MAX_AGENTS {
        return Err(ApiError::bad_request(
            "instance_too_large",
            format!("at most {} agents", draftgame::solver::MAX_AGENTS),
        ));
    }
    let id = uuid::Uuid::new_v4().simple().to_string();
    let shared = Arc::new(Mutex::new(Session::new(id.clone(), inst, human, policy)));
    st.sessions.write().unwrap().insert(id, shared.clone());
    let mut s = shared.lock().await;
    engine_turn(&st, &shared, &mut s).await?;
    st.snapshot(&s);
    Ok((StatusCode::CREATED, Json(s.view())))
}

/// Plays the engine's reply if it is on move. Budgeted sessions that run out
/// of nodes hand the search to a background task and return at once.
async fn engine_turn(st: &Arc<AppState>, shared: &Shared, s: &mut Session) -> Result<(), ApiError> {
    if !s.engine_to_move() {
        return Ok(());
    }
    let pos = s.position.clone();
    let opts = SolveOptions {
        node_budget: s.policy.budget(),
        ..SolveOptions::default()
    };
    let budgeted = matches!(s.policy, Policy::Budgeted { .. });
    let reply = tokio::task::spawn_blocking(move || {
        if budgeted {
            solve(&pos, &opts).map(|r| (r.best_move.expect("engine on move"), MoveValue::Exact { value: r.score }))
        } else {
            engine_move(&pos, &opts)
        }
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?;
    match reply {
        Ok((mv, value)) => {
            s.apply(mv).map_err(ApiError::from)?;
            s.engine_value = Some(value);
            Ok(())
        }
        Err(DraftError::BudgetExceeded { .. }) => {
            s.status = Status::EngineThinking;
            spawn_escalation(st.clone(), shared.clone(), s.position.clone(), s.log.len());
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn spawn_escalation(st: Arc<AppState>, shared: Shared, pos: draftgame::Position, ply: usize) {
    let opts = SolveOptions {
        node_budget: st.config.escalation_budget,
        ..SolveOptions::default()
    };
    tokio::spawn(async move {
        let reply = tokio::task::spawn_blocking(move || engine_move(&pos, &opts)).await;
        let mut s = shared.lock().await;
        if s.log.len() != ply || s.status != Status::EngineThinking {
            return;
        }
        match reply {
            Ok(Ok((mv, value))) => {
                if s.apply(mv).is_ok() {
                    s.engine_value = Some(value);
                }
            }
            other => eprintln!("session {}: background engine failed: {other:?}", s.id),
        }
        st.snapshot(&s);
    });
}

async fn get_session(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let shared = st.session(&id)?;
    let s = shared.lock().await;
    Ok(Json(s.view()))
}

fn require_turn(s: &Session) -> Result<(), ApiError> {
    match s.status {
        Status::AwaitingHuman => Ok(()),
        Status::EngineThinking => Err(ApiError::conflict("engine_thinking", "the engine is still choosing its pick")),
        Status::Finished => Err(ApiError::conflict("finished", "the draft is over")),
    }
}

fn agent_index(s: &Session, id: &str) -> Result<usize, ApiError> {
    s.position
        .instance()
        .index_of(id)
        .ok_or_else(|| ApiError::not_found("unknown_agent", format!("no agent {id:?}")))
}

async fn submit_move(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req = parse_body(&body)?;
    let agent = req
        .get("agent")
        .and_then(Value::as_str)
        .ok_or_else(|| ApiError::bad_request("invalid_request", "body needs an \"agent\" id"))?;
    let shared = st.session(&id)?;
    let mut s = shared.lock().await;
    require_turn(&s)?;
    if let Some(ply) = req.get("ply").and_then(Value::as_u64) {
        if ply as usize != s.log.len() {
            return Err(ApiError::conflict(
                "stale_move",
                format!("move was made against ply {ply}, the session is at ply {}", s.log.len()),
            ));
        }
    }
    let k = agent_index(&s, agent)?;
    if !s.position.is_free(k) {
        return Err(ApiError::conflict("agent_taken", format!("agent {agent:?} is already taken")));
    }
    s.apply(k).map_err(ApiError::from)?;
    let human_ply = s.log.len() - 1;
    engine_turn(&st, &shared, &mut s).await?;
    st.snapshot(&s);
    let mut view = s.view();
    let m = view.as_object_mut().unwrap();
    m.insert("human_pick".into(), s.pick_json(human_ply));
    let engine_pick = (s.log.len() > human_ply + 1).then(|| s.pick_json(human_ply + 1));
    m.insert("engine_pick".into(), engine_pick.unwrap_or(Value::Null));
    Ok(Json(view))
}

fn session_opts(s: &Session) -> SolveOptions {
    SolveOptions {
        node_budget: s.policy.budget(),
        ..SolveOptions::default()
    }
}

async fn get_hints(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let shared = st.session(&id)?;
    let (pos, opts) = {
        let s = shared.lock().await;
        require_turn(&s)?;
        (s.position.clone(), session_opts(&s))
    };
    // Read-only work on a snapshot of the position.
    let doc = tokio::task::spawn_blocking(move || -> Result<Value, DraftError> {
        let evals = evaluate_moves(&pos, &opts)?;
        let dominating = dominating_agents(&pos);
        let dominated = dominated_agents(&pos);
        let pair = find_dominating_pair(&pos);
        let alice = pos.to_move() == Player::Alice;
        let exact: Vec<_> = evals.iter().filter_map(|e| e.value.exact()).collect();
        let best = if alice { exact.iter().max() } else { exact.iter().min() }.map(|v| (*v).clone());
        let moves: Vec<Value> = evals
            .iter()
            .map(|e| {
                let a = pos.instance().agent(e.agent);
                let mut badges = Vec::new();
                if dominating.contains(&e.agent) {
                    badges.push("dominating");
                }
                if dominated.contains(&e.agent) {
                    badges.push("dominated");
                }
                if pair.is_some_and(|(x, y)| x == e.agent || y == e.agent) {
                    badges.push("pair");
                }
                let mut v = move_value_json(&e.value);
                let m = v.as_object_mut().unwrap();
                m.insert("agent".into(), json!(a.id));
                m.insert("eff".into(), json!(a.to_string()));
                m.insert("badges".into(), json!(badges));
                m.insert("optimal".into(), json!(best.is_some() && e.value.exact() == best.as_ref()));
                v
            })
            .collect();
        Ok(json!({
            "to_move": pos.to_move().as_str(),
            "best": best.as_ref().map(big),
            "moves": moves,
        }))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(doc))
}

#[derive(serde::Deserialize)]
struct WhatIfQuery {
    agent: Option<String>,
}

async fn what_if(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<WhatIfQuery>,
) -> Result<Json<Value>, ApiError> {
    let agent = q
        .agent
        .ok_or_else(|| ApiError::bad_request("invalid_request", "query needs ?agent=<id>"))?;
    let shared = st.session(&id)?;
    let (child, opts) = {
        let s = shared.lock().await;
        let k = agent_index(&s, &agent)?;
        if s.position.is_terminal() {
            return Err(ApiError::conflict("finished", "the draft is over"));
        }
        if !s.position.is_free(k) {
            return Err(ApiError::conflict("agent_taken", format!("agent {agent:?} is already taken")));
        }
        (s.position.play(k).map_err(ApiError::from)?, session_opts(&s))
    };
    let value = tokio::task::spawn_blocking(move || match solve(&child, &opts) {
        Ok(r) => Ok(MoveValue::Exact { value: r.score }),
        Err(DraftError::BudgetExceeded { lower, upper, .. }) => Ok(MoveValue::Bounds { lower, upper }),
        Err(e) => Err(e),
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    let mut doc = move_value_json(&value);
    doc.as_object_mut().unwrap().insert("agent".into(), json!(agent));
    Ok(Json(doc))
}
