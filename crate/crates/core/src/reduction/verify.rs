use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gadget::GadgetInstance;
use crate::instance::{Player, Position};
use crate::solver::{dominating_agents, find_dominating_pair};

/// How the replay resolves the free choices: Alice's value for each `x_i`
/// (she takes all three agents of one polarity) and Bob's two picks in each
/// of his gadgets. Alice then answers Bob as in the sufficiency strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairPolicy {
    /// Always the un-negated agent.
    First,
    /// Seeded coins.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlyCheck {
    /// The expected agent is the only dominating agent.
    UniqueDominating,
    /// The two expected agents are reported as a dominating pair.
    DominatingPair,
    /// After one half of a pair is taken, the other is the only dominating
    /// agent.
    ForcedPartner,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlyReport {
    pub label: String,
    pub player: Player,
    pub check: PlyCheck,
    pub expected: Vec<String>,
    pub picked: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcedOrderReport {
    pub plies: Vec<PlyReport>,
    /// Every ply of the setup (steps A to C) had a unique dominating agent.
    pub setup_forced: bool,
    /// Every pair in the variable gadgets was detected, and every other
    /// variable-gadget ply was forced.
    pub pairs_detected: bool,
    pub first_failure: Option<String>,
}

enum Choice {
    /// Alice's polarity for the current variable.
    Variable,
    /// A fresh coin (Bob's choices).
    Coin,
    /// The un-negated agent iff Bob holds the named agent.
    Follow(String),
}

enum Step {
    Single(String),
    Pair(String, String, Choice),
}

fn script(g: &GadgetInstance) -> Vec<(String, Step)> {
    let m = g.task_index.iter().filter(|(s, _)| s.starts_with('S')).count();
    let n = g.agent_index.iter().filter(|(s, _)| s.starts_with("TA")).count();
    let mut out = vec![
        ("A".to_string(), Step::Single("A1".into())),
        ("B".to_string(), Step::Single("B1".into())),
    ];
    for j in 1..=m {
        out.push((format!("C.{j}.1"), Step::Single(format!("G{j}"))));
        out.push((format!("C.{j}.2"), Step::Single(format!("G{j}'"))));
    }
    for i in 1..=n {
        let pair = |s: String, c: Choice| Step::Pair(s.clone(), format!("n{s}"), c);
        let steps = [
            pair(format!("X{i}"), Choice::Variable),
            pair(format!("X{i}.1"), Choice::Variable),
            pair(format!("X{i}.2"), Choice::Variable),
            Step::Single(format!("TA{i}")),
            pair(format!("Y{i}"), Choice::Coin),
            pair(format!("Y{i}'"), Choice::Coin),
            Step::Single(format!("TB{i}")),
            pair(format!("Y{i}.1"), Choice::Follow(format!("Y{i}"))),
            pair(format!("Y{i}.2"), Choice::Follow(format!("Y{i}'"))),
        ];
        let mut k = 1;
        for step in steps {
            let width = if matches!(step, Step::Pair(..)) { 2 } else { 1 };
            out.push((format!("D.{i}.{k}"), step));
            k += width;
        }
    }
    out
}

/// Replays the intended optimal order from the opening, checking at each
/// ply that the dominance detectors force the scripted move.
pub fn verify_forced_order(gadget: &GadgetInstance, policy: PairPolicy) -> ForcedOrderReport {
    let mut rng = match policy {
        PairPolicy::First => None,
        PairPolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut coin = move || rng.as_mut().is_none_or(|r| r.random_bool(0.5));
    let mut polarity = true;
    let mut pos = Position::start(gadget.instance.clone());
    let mut plies: Vec<PlyReport> = Vec::new();
    let idx = |name: &str| gadget.agent(name).expect("scripted agent exists");
    let id = |k: usize| gadget.instance.agent(k).id.clone();
    for (label, step) in script(gadget) {
        match step {
            Step::Single(name) => {
                let k = idx(&name);
                let ok = dominating_agents(&pos) == vec![k];
                plies.push(PlyReport {
                    label,
                    player: pos.to_move(),
                    check: PlyCheck::UniqueDominating,
                    expected: vec![name.clone()],
                    picked: name,
                    ok,
                });
                pos = pos.play(k).expect("scripted agent is free");
            }
            Step::Pair(x, y, choice) => {
                let (kx, ky) = (idx(&x), idx(&y));
                let want: BTreeSet<usize> = [kx, ky].into();
                let found = find_dominating_pair(&pos).map(|(a, b)| BTreeSet::from([a, b]));
                let take_x = match choice {
                    Choice::Variable => {
                        if label.ends_with(".1") {
                            polarity = coin();
                        }
                        polarity
                    }
                    Choice::Coin => coin(),
                    Choice::Follow(name) => pos.owner(idx(&name)) == Some(Player::Bob),
                };
                let (first, second) = if take_x { (kx, ky) } else { (ky, kx) };
                plies.push(PlyReport {
                    label: label.clone(),
                    player: pos.to_move(),
                    check: PlyCheck::DominatingPair,
                    expected: vec![x.clone(), y.clone()],
                    picked: id(first),
                    ok: found.as_ref() == Some(&want),
                });
                pos = pos.play(first).expect("scripted agent is free");
                let ok = dominating_agents(&pos) == vec![second];
                let (head, last) = label.rsplit_once('.').unwrap();
                let next: usize = last.parse::<usize>().unwrap() + 1;
                plies.push(PlyReport {
                    label: format!("{head}.{next}"),
                    player: pos.to_move(),
                    check: PlyCheck::ForcedPartner,
                    expected: vec![id(second)],
                    picked: id(second),
                    ok,
                });
                pos = pos.play(second).expect("scripted agent is free");
            }
        }
    }
    let setup_forced = plies.iter().filter(|p| !p.label.starts_with('D')).all(|p| p.ok);
    let pairs_detected = plies.iter().filter(|p| p.label.starts_with('D')).all(|p| p.ok);
    let first_failure = plies.iter().find(|p| !p.ok).map(|p| p.label.clone());
    ForcedOrderReport {
        plies,
        setup_forced,
        pairs_detected,
        first_failure,
    }
}
