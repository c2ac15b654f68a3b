//! Session state. Everything here is synchronous; the HTTP layer owns
//! locking and the engine's background escalation.

use num_bigint::BigInt;
use serde_json::{json, Value};

use draftgame::io::{big_json as big, format_score, instance_to_value};
use draftgame::{final_score, provisional_values, Instance, MoveValue, Player, Position, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Exact,
    /// Reply within `budget` nodes, escalating in the background otherwise.
    Budgeted { budget: u64 },
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Exact => "exact",
            Policy::Budgeted { .. } => "budgeted",
        }
    }

    pub fn budget(self) -> Option<u64> {
        match self {
            Policy::Exact => None,
            Policy::Budgeted { budget } => Some(budget),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    AwaitingHuman,
    EngineThinking,
    Finished,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::AwaitingHuman => "awaiting_human",
            Status::EngineThinking => "engine_thinking",
            Status::Finished => "finished",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub start: Position,
    pub position: Position,
    pub human: Player,
    pub policy: Policy,
    pub log: Vec<usize>,
    pub status: Status,
    pub final_score: Option<BigInt>,
    /// Engine's value estimate for its most recent pick.
    pub engine_value: Option<MoveValue>,
}

pub fn move_value_json(v: &MoveValue) -> Value {
    match v {
        MoveValue::Exact { value } => json!({"exact": true, "value": big(value)}),
        MoveValue::Bounds { lower, upper } => {
            json!({"exact": false, "value": null, "lower": big(lower), "upper": big(upper)})
        }
    }
}

impl Session {
    /// Fresh draft with Alice opening. The engine has not moved yet even if
    /// it is its turn; see [`Session::engine_to_move`].
    pub fn new(id: String, instance: Instance, human: Player, policy: Policy) -> Session {
        let start = Position::start(instance);
        let mut s = Session {
            id,
            position: start.clone(),
            start,
            human,
            policy,
            log: Vec::new(),
            status: Status::AwaitingHuman,
            final_score: None,
            engine_value: None,
        };
        s.settle();
        s
    }

    pub fn engine_to_move(&self) -> bool {
        !self.position.is_terminal() && self.position.to_move() != self.human
    }

    fn settle(&mut self) {
        if self.position.is_terminal() {
            self.status = Status::Finished;
            self.final_score = Some(final_score(&self.position).expect("terminal position"));
        } else if self.position.to_move() == self.human {
            self.status = Status::AwaitingHuman;
        }
    }

    pub fn apply(&mut self, agent: usize) -> Result<()> {
        self.position = self.position.play(agent)?;
        self.log.push(agent);
        self.settle();
        Ok(())
    }

    /// Rebuilds the position from the start and the move log.
    pub fn replay(start: &Position, log: &[usize]) -> Result<Position> {
        log.iter().try_fold(start.clone(), |p, &k| p.play(k))
    }

    fn agent_json(&self, k: usize) -> Value {
        let a = self.position.instance().agent(k);
        json!({"id": a.id, "index": k, "eff": a.to_string()})
    }

    pub fn pick_json(&self, ply: usize) -> Value {
        let k = self.log[ply];
        let player = if ply % 2 == 0 { self.start.first() } else { self.start.first().other() };
        let mut v = self.agent_json(k);
        let m = v.as_object_mut().unwrap();
        m.insert("ply".into(), json!(ply));
        m.insert("player".into(), json!(player.as_str()));
        m.insert("by".into(), json!(if player == self.human { "human" } else { "engine" }));
        v
    }

    pub fn view(&self) -> Value {
        let inst = self.position.instance();
        let ids = |p: Player| -> Vec<String> {
            self.position.picked(p).iter().map(|&k| inst.agent(k).id.clone()).collect()
        };
        let (a, b) = provisional_values(&self.position);
        let score = &a - &b;
        json!({
            "id": self.id,
            "instance": instance_to_value(inst),
            "human_side": self.human.as_str(),
            "engine_side": self.human.other().as_str(),
            "policy": self.policy.name(),
            "budget": self.policy.budget(),
            "status": self.status.as_str(),
            "to_move": (!self.position.is_terminal()).then(|| self.position.to_move().as_str()),
            "ply": self.log.len(),
            "move_log": (0..self.log.len()).map(|k| self.pick_json(k)).collect::<Vec<_>>(),
            "picked_a": ids(Player::Alice),
            "picked_b": ids(Player::Bob),
            "free": self.position.free().iter().map(|&k| inst.agent(k).id.clone()).collect::<Vec<_>>(),
            "provisional": {
                "alice": big(&a),
                "bob": big(&b),
                "score": big(&score),
                "display": format_score(&score, inst.scale_pow10),
            },
            "final": self.final_score.as_ref().map(big),
            "engine_value": self.engine_value.as_ref().map(move_value_json),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1() -> Instance {
        Instance::from_rows(2, &[&[4, 7], &[5, 5], &[0, 4]]).unwrap()
    }

    #[test]
    fn status_follows_position() {
        let mut s = Session::new("s".into(), ex1(), Player::Alice, Policy::Exact);
        assert_eq!(s.status, Status::AwaitingHuman);
        assert!(!s.engine_to_move());
        s.apply(0).unwrap();
        assert!(s.engine_to_move());
        s.apply(1).unwrap();
        assert_eq!(s.status, Status::AwaitingHuman);
        s.apply(2).unwrap();
        assert_eq!(s.status, Status::Finished);
        assert_eq!(s.final_score, Some(BigInt::from(3)));
        assert_eq!(Session::replay(&s.start, &s.log).unwrap(), s.position);
        let v = s.view();
        assert_eq!(v["final"], 3);
        assert_eq!(v["move_log"][1]["by"], "engine");
        assert_eq!(v["provisional"]["alice"], 8);
    }

    #[test]
    fn empty_instance_is_finished() {
        let s = Session::new("e".into(), Instance::new(2, vec![]).unwrap(), Player::Bob, Policy::Exact);
        assert_eq!(s.status, Status::Finished);
        assert_eq!(s.final_score, Some(BigInt::from(0)));
    }

    #[test]
    fn taken_agent_rejected() {
        let mut s = Session::new("s".into(), ex1(), Player::Alice, Policy::Exact);
        s.apply(0).unwrap();
        assert!(s.apply(0).is_err());
        assert_eq!(s.log, vec![0]);
    }
}
