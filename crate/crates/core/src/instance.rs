//! Instances, agents and positions of the draft game.
//!
//! Agents are addressed by their index in [`Instance::agents`] everywhere in
//! the library; string ids only matter at the serialization boundary.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{DraftError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Agent {
    pub id: String,
    pub eff: Vec<BigUint>,
}

impl Agent {
    pub fn new(id: impl Into<String>, eff: Vec<BigUint>) -> Self {
        Agent { id: id.into(), eff }
    }

    pub fn from_u64(id: impl Into<String>, eff: &[u64]) -> Self {
        Agent::new(id, eff.iter().map(|&x| BigUint::from(x)).collect())
    }

    /// Largest efficiency over all tasks (zero for an agent with no tasks).
    pub fn max_eff(&self) -> BigUint {
        self.eff.iter().max().cloned().unwrap_or_default()
    }

    pub fn nonzero_count(&self) -> usize {
        self.eff.iter().filter(|x| !x.is_zero()).count()
    }

    /// `true` if `self` is at least as efficient as `other` on every task.
    pub fn dominates(&self, other: &Agent) -> bool {
        self.eff.iter().zip(&other.eff).all(|(x, y)| x >= y)
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.eff.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A multiset of agents over a fixed number of tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    tasks: usize,
    agents: Vec<Agent>,
    /// Decision threshold carried by the file format, if any.
    pub threshold: Option<BigInt>,
    /// Efficiencies were multiplied by `10^scale_pow10` when read from decimals.
    pub scale_pow10: u32,
}

impl Instance {
    pub fn new(tasks: usize, agents: Vec<Agent>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(agents.len());
        for a in &agents {
            if a.eff.len() != tasks {
                return Err(DraftError::DimensionMismatch {
                    agent: a.id.clone(),
                    expected: tasks,
                    got: a.eff.len(),
                });
            }
            if !seen.insert(a.id.as_str()) {
                return Err(DraftError::DuplicateId(a.id.clone()));
            }
        }
        Ok(Instance {
            tasks,
            agents,
            threshold: None,
            scale_pow10: 0,
        })
    }

    /// Builds an instance from small integer rows, naming agents `X1, X2, ...`.
    pub fn from_rows(tasks: usize, rows: &[&[u64]]) -> Result<Self> {
        let agents = rows
            .iter()
            .enumerate()
            .map(|(k, r)| Agent::from_u64(format!("X{}", k + 1), r))
            .collect();
        Instance::new(tasks, agents)
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agent(&self, idx: usize) -> &Agent {
        &self.agents[idx]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.id == id)
    }

    pub fn require_index(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| DraftError::UnknownAgent(id.to_string()))
    }

    pub fn max_eff(&self) -> BigUint {
        self.agents
            .iter()
            .map(Agent::max_eff)
            .max()
            .unwrap_or_default()
    }

    /// Same instance with every efficiency multiplied by `factor`.
    pub fn scaled(&self, factor: &BigUint) -> Instance {
        let agents = self
            .agents
            .iter()
            .map(|a| Agent::new(a.id.clone(), a.eff.iter().map(|x| x * factor).collect()))
            .collect();
        Instance {
            tasks: self.tasks,
            agents,
            threshold: self.threshold.clone(),
            scale_pow10: self.scale_pow10,
        }
    }

    /// Applies `perm` to the task axis: new task `k` is old task `perm[k]`.
    pub fn permute_tasks(&self, perm: &[usize]) -> Instance {
        assert_eq!(perm.len(), self.tasks);
        let agents = self
            .agents
            .iter()
            .map(|a| Agent::new(a.id.clone(), perm.iter().map(|&k| a.eff[k].clone()).collect()))
            .collect();
        Instance {
            tasks: self.tasks,
            agents,
            threshold: self.threshold.clone(),
            scale_pow10: self.scale_pow10,
        }
    }

    /// Drops the agents at the given indices, keeping the order of the rest.
    pub fn without(&self, drop: &BTreeSet<usize>) -> Instance {
        let agents = self
            .agents
            .iter()
            .enumerate()
            .filter(|(k, _)| !drop.contains(k))
            .map(|(_, a)| a.clone())
            .collect();
        Instance {
            tasks: self.tasks,
            agents,
            threshold: self.threshold.clone(),
            scale_pow10: self.scale_pow10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Alice => Player::Bob,
            Player::Bob => Player::Alice,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Player::Alice => "alice",
            Player::Bob => "bob",
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Alice => "Alice",
            Player::Bob => "Bob",
        })
    }
}

impl std::str::FromStr for Player {
    type Err = DraftError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alice" | "a" => Ok(Player::Alice),
            "bob" | "b" => Ok(Player::Bob),
            _ => Err(DraftError::parse("player", format!("expected alice or bob, got {s:?}"))),
        }
    }
}

/// An instance together with the agents each player already holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Position {
    instance: Instance,
    picked_a: BTreeSet<usize>,
    picked_b: BTreeSet<usize>,
    first: Player,
    to_move: Player,
}

impl Position {
    /// Starting position, Alice to move.
    pub fn start(instance: Instance) -> Position {
        Position {
            instance,
            picked_a: BTreeSet::new(),
            picked_b: BTreeSet::new(),
            first: Player::Alice,
            to_move: Player::Alice,
        }
    }

    /// Starting position with an explicit first player.
    pub fn start_with(instance: Instance, first: Player) -> Position {
        Position {
            first,
            to_move: first,
            ..Position::start(instance)
        }
    }

    /// Validated position; `first` is the player who opened the draft and
    /// determines whose turn it is from the pick counts.
    pub fn new(
        instance: Instance,
        picked_a: BTreeSet<usize>,
        picked_b: BTreeSet<usize>,
        first: Player,
        to_move: Player,
    ) -> Result<Position> {
        let n = instance.len();
        if let Some(&bad) = picked_a.iter().chain(&picked_b).find(|&&k| k >= n) {
            return Err(DraftError::InvalidPosition(format!(
                "agent index {bad} out of range"
            )));
        }
        if let Some(k) = picked_a.intersection(&picked_b).next() {
            return Err(DraftError::InvalidPosition(format!(
                "agent {:?} picked by both players",
                instance.agent(*k).id
            )));
        }
        let (mine, theirs) = match first {
            Player::Alice => (picked_a.len(), picked_b.len()),
            Player::Bob => (picked_b.len(), picked_a.len()),
        };
        let expected = match mine.checked_sub(theirs) {
            Some(0) => first,
            Some(1) => first.other(),
            _ => {
                return Err(DraftError::InvalidPosition(format!(
                    "pick counts {} (Alice) / {} (Bob) impossible when {first} opens",
                    picked_a.len(),
                    picked_b.len()
                )))
            }
        };
        if expected != to_move {
            return Err(DraftError::InvalidPosition(format!(
                "{to_move} cannot be on move after these picks"
            )));
        }
        Ok(Position {
            instance,
            picked_a,
            picked_b,
            first,
            to_move,
        })
    }

    /// Position built from agent ids, Alice having opened.
    pub fn from_ids(instance: Instance, alice: &[&str], bob: &[&str]) -> Result<Position> {
        let a = alice
            .iter()
            .map(|id| instance.require_index(id))
            .collect::<Result<BTreeSet<_>>>()?;
        let b = bob
            .iter()
            .map(|id| instance.require_index(id))
            .collect::<Result<BTreeSet<_>>>()?;
        let to_move = if a.len() > b.len() {
            Player::Bob
        } else {
            Player::Alice
        };
        Position::new(instance, a, b, Player::Alice, to_move)
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn picked(&self, p: Player) -> &BTreeSet<usize> {
        match p {
            Player::Alice => &self.picked_a,
            Player::Bob => &self.picked_b,
        }
    }

    pub fn picked_a(&self) -> &BTreeSet<usize> {
        &self.picked_a
    }

    pub fn picked_b(&self) -> &BTreeSet<usize> {
        &self.picked_b
    }

    pub fn first(&self) -> Player {
        self.first
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn owner(&self, idx: usize) -> Option<Player> {
        if self.picked_a.contains(&idx) {
            Some(Player::Alice)
        } else if self.picked_b.contains(&idx) {
            Some(Player::Bob)
        } else {
            None
        }
    }

    pub fn is_free(&self, idx: usize) -> bool {
        idx < self.instance.len() && self.owner(idx).is_none()
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.instance.len()).filter(|&k| self.owner(k).is_none()).collect()
    }

    pub fn free_count(&self) -> usize {
        self.instance.len() - self.picked_a.len() - self.picked_b.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.free_count() == 0
    }

    /// Plays `idx` for the player on move.
    pub fn play(&self, idx: usize) -> Result<Position> {
        if idx >= self.instance.len() {
            return Err(DraftError::InvalidPosition(format!(
                "agent index {idx} out of range"
            )));
        }
        if !self.is_free(idx) {
            return Err(DraftError::InvalidPosition(format!(
                "agent {:?} is already taken",
                self.instance.agent(idx).id
            )));
        }
        let mut next = self.clone();
        match self.to_move {
            Player::Alice => next.picked_a.insert(idx),
            Player::Bob => next.picked_b.insert(idx),
        };
        next.to_move = self.to_move.other();
        Ok(next)
    }

    pub fn play_id(&self, id: &str) -> Result<Position> {
        self.play(self.instance.require_index(id)?)
    }
}
