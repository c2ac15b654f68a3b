//! The solver in the browser. Three operations, each taking and returning
//! JSON text so the page needs no bindings beyond strings:
//!
//! * `solve`: score, best move and optimal line of an instance or position.
//! * `hints`: value of every legal pick, with dominance badges.
//! * `reduce`: draft instance and naming map of a QDIMACS formula.
//!
//! The plain functions are the tested surface; the `#[wasm_bindgen]`
//! wrappers only convert errors to JS strings.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use draftgame::io::{format_score, instance_to_value, parse_position, big_json};
use draftgame::reduction::{build_draft_instance, normalize_qbf, parse_qdimacs, to_qdimacs};
use draftgame::solver::{dominated_agents, dominating_agents, find_dominating_pair};
use draftgame::{evaluate_moves, provisional_values, solve, MoveValue, SolveOptions};

/// Keeps a runaway search from freezing the tab.
pub const NODE_BUDGET: u64 = 2_000_000;

fn opts(pv: bool) -> SolveOptions {
    SolveOptions {
        node_budget: Some(NODE_BUDGET),
        want_pv: pv,
        ..SolveOptions::default()
    }
}

fn agent_json(inst: &draftgame::Instance, k: usize) -> Value {
    json!({"index": k, "id": inst.agent(k).id, "eff": inst.agent(k).to_string()})
}

pub fn solve_json(doc: &str) -> Result<String, String> {
    let pos = parse_position(doc.as_bytes()).map_err(|e| e.to_string())?;
    let r = solve(&pos, &opts(true)).map_err(|e| e.to_string())?;
    let inst = pos.instance();
    let (a, b) = provisional_values(&pos);
    let out = json!({
        "score": big_json(&r.score),
        "display": format_score(&r.score, inst.scale_pow10),
        "to_move": pos.to_move().as_str(),
        "best": r.best_move.map(|k| agent_json(inst, k)),
        "pv": r.pv.unwrap_or_default().into_iter().map(|k| agent_json(inst, k)).collect::<Vec<_>>(),
        "provisional": {"alice": big_json(&a), "bob": big_json(&b)},
        "nodes": r.stats.nodes,
    });
    Ok(out.to_string())
}

pub fn hints_json(doc: &str) -> Result<String, String> {
    let pos = parse_position(doc.as_bytes()).map_err(|e| e.to_string())?;
    let evals = evaluate_moves(&pos, &opts(false)).map_err(|e| e.to_string())?;
    let inst = pos.instance();
    let dominating = dominating_agents(&pos);
    let dominated = dominated_agents(&pos);
    let pair = find_dominating_pair(&pos);
    let moves: Vec<Value> = evals
        .iter()
        .map(|e| {
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
            let mut v = agent_json(inst, e.agent);
            let m = v.as_object_mut().unwrap();
            match &e.value {
                MoveValue::Exact { value } => {
                    m.insert("value".into(), big_json(value));
                }
                MoveValue::Bounds { lower, upper } => {
                    m.insert("lower".into(), big_json(lower));
                    m.insert("upper".into(), big_json(upper));
                }
            }
            m.insert("badges".into(), json!(badges));
            v
        })
        .collect();
    Ok(json!({"to_move": pos.to_move().as_str(), "moves": moves}).to_string())
}

pub fn reduce_json(qdimacs: &str, normalize: bool) -> Result<String, String> {
    let mut f = parse_qdimacs(qdimacs).map_err(|e| e.to_string())?;
    if normalize {
        f = normalize_qbf(&f).map_err(|e| e.to_string())?;
    }
    let g = build_draft_instance(&f).map_err(|e| e.to_string())?;
    let mut names = serde_json::to_value(&g).map_err(|e| e.to_string())?;
    names.as_object_mut().unwrap().insert("formula".into(), json!(to_qdimacs(&f)));
    Ok(json!({"instance": instance_to_value(&g.instance), "names": names}).to_string())
}

#[wasm_bindgen]
pub fn solve_instance(doc: &str) -> Result<String, JsValue> {
    solve_json(doc).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn move_hints(doc: &str) -> Result<String, JsValue> {
    hints_json(doc).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn reduce_qbf(qdimacs: &str, normalize: bool) -> Result<String, JsValue> {
    reduce_json(qdimacs, normalize).map_err(|e| JsValue::from_str(&e))
}
