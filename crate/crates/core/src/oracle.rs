//! Ground truth for tests: an exhaustive game solver that shares no code with
//! [`crate::solver`], game sums, the copy-pairing strategy and seeded
//! instance generators.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DraftError, Result};
use crate::instance::{Agent, Instance, Player, Position};

pub const BRUTE_MAX_AGENTS: usize = 12;
pub const BRUTE_MAX_TASKS: usize = 4;

/// Default efficiency range of the random generators.
pub const DEFAULT_MAX_EFF: u64 = 10;

struct Brute {
    rows: Vec<Vec<i128>>,
    tasks: usize,
    all: u32,
    leaf: HashMap<u32, i128>,
    memo: HashMap<(u32, u32), i128>,
}

impl Brute {
    /// Best assignment of the agents in `set`, by enumerating every injective
    /// partial map from tasks to agents.
    fn side(&mut self, set: u32) -> i128 {
        if let Some(&v) = self.leaf.get(&set) {
            return v;
        }
        let members: Vec<usize> = (0..self.rows.len()).filter(|&k| set >> k & 1 == 1).collect();
        let mut used = vec![false; members.len()];
        let v = self.enumerate(&members, 0, &mut used);
        self.leaf.insert(set, v);
        v
    }

    fn enumerate(&self, members: &[usize], task: usize, used: &mut [bool]) -> i128 {
        if task == self.tasks {
            return 0;
        }
        let mut best = self.enumerate(members, task + 1, used);
        for p in 0..members.len() {
            if !used[p] {
                used[p] = true;
                let v = self.rows[members[p]][task] + self.enumerate(members, task + 1, used);
                used[p] = false;
                best = best.max(v);
            }
        }
        best
    }

    fn value(&mut self, a: u32, b: u32, alice: bool) -> i128 {
        let free = self.all & !a & !b;
        if free == 0 {
            return self.side(a) - self.side(b);
        }
        if let Some(&v) = self.memo.get(&(a, b)) {
            return v;
        }
        let mut best: Option<i128> = None;
        for k in 0..self.rows.len() {
            if free >> k & 1 == 0 {
                continue;
            }
            let v = if alice {
                self.value(a | 1 << k, b, false)
            } else {
                self.value(a, b | 1 << k, true)
            };
            best = Some(match best {
                None => v,
                Some(x) if alice => x.max(v),
                Some(x) => x.min(v),
            });
        }
        let v = best.unwrap();
        self.memo.insert((a, b), v);
        v
    }
}

/// Exact value of `position` by exhausting every pick order (no pruning).
pub fn brute_force_position(position: &Position) -> Result<BigInt> {
    let inst = position.instance();
    if inst.len() > BRUTE_MAX_AGENTS || inst.tasks() > BRUTE_MAX_TASKS {
        return Err(DraftError::TooLarge(format!(
            "brute force handles at most {BRUTE_MAX_AGENTS} agents and {BRUTE_MAX_TASKS} tasks, got {} and {}",
            inst.len(),
            inst.tasks()
        )));
    }
    let limit = BigUint::from(1u32) << 100u32;
    let rows = inst
        .agents()
        .iter()
        .map(|a| {
            a.eff
                .iter()
                .map(|x| {
                    if *x >= limit {
                        Err(DraftError::TooLarge("efficiency beyond brute-force range".into()))
                    } else {
                        Ok(x.to_i128().unwrap())
                    }
                })
                .collect::<Result<Vec<i128>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut brute = Brute {
        rows,
        tasks: inst.tasks(),
        all: (1u32 << inst.len()) - 1,
        leaf: HashMap::new(),
        memo: HashMap::new(),
    };
    let a = position.picked_a().iter().fold(0u32, |s, &k| s | 1 << k);
    let b = position.picked_b().iter().fold(0u32, |s, &k| s | 1 << k);
    Ok(BigInt::from(brute.value(a, b, position.to_move() == Player::Alice)))
}

/// Optimal score of the starting position, Alice first.
pub fn brute_force_score(instance: &Instance) -> Result<BigInt> {
    brute_force_position(&Position::start(instance.clone()))
}

/// Disjoint sum: task axes are concatenated and every agent is padded with
/// zeros on the other games' tasks. Agent ids become `g<k>.<id>`.
pub fn game_sum(instances: &[Instance]) -> Instance {
    let tasks: usize = instances.iter().map(Instance::tasks).sum();
    let mut agents = Vec::new();
    let mut offset = 0;
    for (k, g) in instances.iter().enumerate() {
        for a in g.agents() {
            let mut eff = vec![BigUint::default(); tasks];
            eff[offset..offset + g.tasks()].clone_from_slice(&a.eff);
            agents.push(Agent::new(format!("g{}.{}", k + 1, a.id), eff));
        }
        offset += g.tasks();
    }
    Instance::new(tasks, agents).expect("prefixed ids are unique and rows have full width")
}

/// For a sum of `2n` copies of one instance, the partner of each agent copy:
/// copies are paired (1,2), (3,4), ... and an agent's partner is the same
/// agent in the paired copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingTable {
    partner: Vec<usize>,
}

impl PairingTable {
    /// Builds `copies` copies of `base` (laid out copy by copy) and the table.
    pub fn for_copies(base: &Instance, copies: usize) -> Result<(Instance, PairingTable)> {
        if copies == 0 || copies % 2 != 0 {
            return Err(DraftError::Precondition(format!(
                "pairing needs a positive even number of copies, got {copies}"
            )));
        }
        let sum = game_sum(&vec![base.clone(); copies]);
        let n = base.len();
        let partner = (0..copies * n)
            .map(|idx| {
                let (copy, agent) = (idx / n, idx % n);
                (copy ^ 1) * n + agent
            })
            .collect();
        Ok((sum, PairingTable { partner }))
    }

    pub fn partner(&self, idx: usize) -> usize {
        self.partner[idx]
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }
}

/// Bob's reply under the pairing strategy: the partner of Alice's last pick.
pub fn pairing_bob_move(position: &Position, table: &PairingTable, alice_last: usize) -> Result<usize> {
    if table.len() != position.instance().len() {
        return Err(DraftError::InvalidPosition(
            "pairing table does not match the instance".into(),
        ));
    }
    if position.to_move() != Player::Bob {
        return Err(DraftError::InvalidPosition("Bob is not on move".into()));
    }
    if !position.picked_a().contains(&alice_last) {
        return Err(DraftError::InvalidPosition(format!(
            "agent {alice_last} is not held by Alice"
        )));
    }
    let reply = table.partner(alice_last);
    if !position.is_free(reply) {
        return Err(DraftError::InvalidPosition(format!(
            "partner {:?} of Alice's pick is not free",
            position.instance().agent(reply).id
        )));
    }
    Ok(reply)
}

/// Uniform efficiencies in `[0, max_eff]`, deterministic per seed.
pub fn random_instance(n: usize, t: usize, max_eff: u64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agents = (0..n)
        .map(|k| {
            let eff: Vec<u64> = (0..t).map(|_| rng.random_range(0..=max_eff)).collect();
            Agent::from_u64(format!("X{}", k + 1), &eff)
        })
        .collect();
    Instance::new(t, agents).unwrap()
}

/// Like [`random_instance`], but each agent keeps only one uniformly chosen
/// task.
pub fn random_otp_instance(n: usize, t: usize, max_eff: u64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agents = (0..n)
        .map(|k| {
            let mut eff = vec![0u64; t];
            if t > 0 {
                let task = rng.random_range(0..t);
                eff[task] = rng.random_range(0..=max_eff);
            }
            Agent::from_u64(format!("X{}", k + 1), &eff)
        })
        .collect();
    Instance::new(t, agents).unwrap()
}

/// `sc(copies * G) / copies`, exactly.
pub fn mean_estimate(instance: &Instance, copies: usize) -> Result<BigRational> {
    if copies == 0 {
        return Err(DraftError::Precondition("need at least one copy".into()));
    }
    let sum = game_sum(&vec![instance.clone(); copies]);
    let sc = brute_force_score(&sum)?;
    Ok(BigRational::new(sc, BigInt::from(copies)))
}
