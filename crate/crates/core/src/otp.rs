//! Exact algorithms for instances where every agent has at most one nonzero
//! efficiency ("one-trick" agents).
//!
//! Two facts drive both algorithms. Some optimal move always takes the best
//! free agent of some task, so within a task agents leave in decreasing
//! order and only counts matter. Once both players hold an agent of a task,
//! the remaining agents of that task can never change the score and are
//! dropped from the game.

use std::collections::{BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::Serialize;

use crate::error::{DraftError, Result};
use crate::instance::{Instance, Player, Position};
use crate::weight::{with_weight, Weight};

/// Default cap on the task count accepted by [`solve_otp_xp`].
pub const DEFAULT_MAX_XP_TASKS: usize = 6;

/// Nonzero agents of each task, best first (ties by agent index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtpGrouping {
    pub per_task: Vec<Vec<(BigUint, usize)>>,
}

impl OtpGrouping {
    pub fn counts(&self) -> Vec<usize> {
        self.per_task.iter().map(Vec::len).collect()
    }

    /// `2 * prod_j 4 n_j` over the tasks that have agents.
    pub fn state_bound(&self) -> BigUint {
        self.per_task
            .iter()
            .filter(|l| !l.is_empty())
            .fold(BigUint::from(2u32), |acc, l| acc * BigUint::from(4 * l.len()))
    }
}

/// Groups the agents by their nonzero task, or `None` if some agent has two
/// or more nonzero efficiencies. All-zero agents are left out.
pub fn is_otp_instance(instance: &Instance) -> Option<OtpGrouping> {
    let mut per_task: Vec<Vec<(BigUint, usize)>> = vec![Vec::new(); instance.tasks()];
    for (k, a) in instance.agents().iter().enumerate() {
        let mut nonzero = a.eff.iter().enumerate().filter(|(_, x)| !x.is_zero());
        match (nonzero.next(), nonzero.next()) {
            (None, _) => {}
            (Some((task, x)), None) => per_task[task].push((x.clone(), k)),
            (Some(_), Some(_)) => return None,
        }
    }
    for list in &mut per_task {
        list.sort_by(|(x, i), (y, j)| y.cmp(x).then(i.cmp(j)));
    }
    Some(OtpGrouping { per_task })
}

fn require_otp(instance: &Instance) -> Result<OtpGrouping> {
    is_otp_instance(instance).ok_or_else(|| {
        DraftError::Precondition("some agent has more than one nonzero efficiency".into())
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OtpSolution {
    #[serde(serialize_with = "crate::io::big::int")]
    pub value: BigInt,
    /// An optimal opening pick, `None` for an instance with no agents.
    pub best_move: Option<usize>,
    /// Distinct reduced states evaluated (zero for the linear algorithm).
    pub visited_states: u64,
}

/// `B(1)`: value when Alice opens with the top agent of `x`, both lists
/// padded to the same length `m >= 1` and sorted decreasingly.
fn opening_value(x: &[BigInt], y: &[BigInt]) -> BigInt {
    let m = x.len();
    debug_assert_eq!(m, y.len());
    let (x1, y1) = (&x[0], &y[0]);
    // 1-based accessors.
    let xi = |i: usize| &x[i - 1];
    let yi = |i: usize| &y[i - 1];
    let base = x1 - y1;
    if m == 1 {
        return base;
    }
    // b = B(i), walking i from m down to 2, then B(1) = min(alpha, A(2)).
    let mut b = base;
    let mut a_next;
    let mut i = m;
    loop {
        let cross = x1 - xi(i) + yi(i) - y1;
        a_next = if cross > b { cross } else { b };
        if i == 2 {
            break;
        }
        let bob_cross = x1 - xi(i) + yi(i - 1) - y1;
        b = if bob_cross < a_next { bob_cross } else { a_next.clone() };
        i -= 1;
    }
    let alpha = x1 - xi(2) + y1 - yi(2);
    if alpha < a_next {
        alpha
    } else {
        a_next
    }
}

/// Linear-time optimal score for two tasks (after sorting).
pub fn solve_two_task_otp(instance: &Instance) -> Result<BigInt> {
    Ok(solve_two_task_otp_detailed(instance)?.value)
}

pub fn solve_two_task_otp_detailed(instance: &Instance) -> Result<OtpSolution> {
    if instance.tasks() != 2 {
        return Err(DraftError::Precondition(format!(
            "the linear algorithm needs exactly 2 tasks, instance has {}",
            instance.tasks()
        )));
    }
    let g = require_otp(instance)?;
    let (xs, ys) = (&g.per_task[0], &g.per_task[1]);
    let m = xs.len().max(ys.len());
    if m == 0 {
        return Ok(OtpSolution {
            value: BigInt::zero(),
            best_move: (!instance.is_empty()).then_some(0),
            visited_states: 0,
        });
    }
    let pad = |l: &[(BigUint, usize)]| -> Vec<BigInt> {
        let mut v: Vec<BigInt> = l.iter().map(|(x, _)| BigInt::from(x.clone())).collect();
        v.resize(m, BigInt::zero());
        v
    };
    let (x, y) = (pad(xs), pad(ys));
    let open_x = opening_value(&x, &y);
    let open_y = opening_value(&y, &x);
    let take_x = match (xs.first(), ys.first()) {
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (Some(&(_, i)), Some(&(_, j))) => open_x > open_y || (open_x == open_y && i < j),
        (None, None) => unreachable!(),
    };
    let (value, best) = if take_x {
        (open_x, xs[0].1)
    } else {
        (open_y, ys[0].1)
    };
    Ok(OtpSolution {
        value,
        best_move: Some(best),
        visited_states: 0,
    })
}

/// Per-task status in the reduced game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TaskStatus {
    /// Nobody has picked in this task; all `n_j` agents remain.
    Untouched,
    /// Only `owner` has picked here (so they hold its best agent); `left`
    /// agents remain.
    Open { owner: Player, left: u32 },
    /// Both players hold agents of this task; `owner` holds the best one
    /// and the opponent's best is the `second`-th (1-based, `>= 2`).
    Closed { owner: Player, second: u32 },
}

/// State of the reduced game: side to move plus one status per task that
/// has agents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OtpReducedState {
    pub to_move: Player,
    pub tasks: Vec<TaskStatus>,
}

impl OtpReducedState {
    /// Mixed-radix code in `[0, 2 * prod 4 n_j)`.
    fn key(&self, counts: &[u32]) -> u128 {
        let mut key: u128 = 0;
        for (s, &n) in self.tasks.iter().zip(counts).rev() {
            let code = match *s {
                TaskStatus::Untouched => 0,
                TaskStatus::Open { owner: Player::Alice, left } => 1 + left,
                TaskStatus::Open { owner: Player::Bob, left } => 1 + n + left,
                TaskStatus::Closed { owner: Player::Alice, second } => 2 * n + second - 1,
                TaskStatus::Closed { owner: Player::Bob, second } => 3 * n + second - 2,
            };
            key = key * (4 * n as u128) + code as u128;
        }
        key * 2 + (self.to_move == Player::Bob) as u128
    }
}

fn step(status: TaskStatus, n: u32, mover: Player) -> Option<TaskStatus> {
    match status {
        TaskStatus::Untouched => Some(TaskStatus::Open {
            owner: mover,
            left: n - 1,
        }),
        TaskStatus::Open { left: 0, .. } | TaskStatus::Closed { .. } => None,
        TaskStatus::Open { owner, left } if owner == mover => Some(TaskStatus::Open {
            owner,
            left: left - 1,
        }),
        TaskStatus::Open { owner, left } => Some(TaskStatus::Closed {
            owner,
            second: n - left + 1,
        }),
    }
}

struct Xp<W> {
    /// Efficiencies per active task, best first.
    lists: Vec<Vec<W>>,
    counts: Vec<u32>,
    memo: HashMap<u128, W>,
}

impl<W: Weight> Xp<W> {
    fn terminal(&self, st: &OtpReducedState) -> W {
        let mut total = W::zero();
        for (j, s) in st.tasks.iter().enumerate() {
            let list = &self.lists[j];
            let (owner, gain) = match *s {
                TaskStatus::Untouched => continue,
                TaskStatus::Open { owner, .. } => (owner, list[0].clone()),
                TaskStatus::Closed { owner, second } => {
                    (owner, list[0].clone() - list[second as usize - 1].clone())
                }
            };
            total = match owner {
                Player::Alice => total + gain,
                Player::Bob => total - gain,
            };
        }
        total
    }

    fn value(&mut self, st: &mut OtpReducedState) -> W {
        let key = st.key(&self.counts);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mover = st.to_move;
        let mut best: Option<W> = None;
        for j in 0..st.tasks.len() {
            let Some(next) = step(st.tasks[j], self.counts[j], mover) else {
                continue;
            };
            let old = std::mem::replace(&mut st.tasks[j], next);
            st.to_move = mover.other();
            let v = self.value(st);
            st.to_move = mover;
            st.tasks[j] = old;
            let better = match &best {
                None => true,
                Some(b) => (mover == Player::Alice && v > *b) || (mover == Player::Bob && v < *b),
            };
            if better {
                best = Some(v);
            }
        }
        let v = best.unwrap_or_else(|| self.terminal(st));
        self.memo.insert(key, v.clone());
        v
    }
}

fn xp_with<W: Weight>(g: &OtpGrouping, instance: &Instance) -> OtpSolution {
    let active: Vec<&Vec<(BigUint, usize)>> = g.per_task.iter().filter(|l| !l.is_empty()).collect();
    let mut xp = Xp::<W> {
        lists: active
            .iter()
            .map(|l| l.iter().map(|(x, _)| W::from_biguint(x)).collect())
            .collect(),
        counts: active.iter().map(|l| l.len() as u32).collect(),
        memo: HashMap::new(),
    };
    let mut st = OtpReducedState {
        to_move: Player::Alice,
        tasks: vec![TaskStatus::Untouched; active.len()],
    };
    let value = xp.value(&mut st);
    // Opening: first task (in agent-index order of its top agent) whose
    // child attains the value.
    let mut order: Vec<usize> = (0..active.len()).collect();
    order.sort_by_key(|&j| active[j][0].1);
    let mut best_move = None;
    for j in order {
        st.tasks[j] = step(TaskStatus::Untouched, xp.counts[j], Player::Alice).unwrap();
        st.to_move = Player::Bob;
        let v = xp.value(&mut st);
        st.tasks[j] = TaskStatus::Untouched;
        st.to_move = Player::Alice;
        if v == value {
            best_move = Some(active[j][0].1);
            break;
        }
    }
    if best_move.is_none() && !instance.is_empty() {
        best_move = Some(0);
    }
    OtpSolution {
        value: value.to_bigint(),
        best_move,
        visited_states: xp.memo.len() as u64,
    }
}

/// Optimal score via memoised search over reduced states, `O(n^t)` states.
pub fn solve_otp_xp(instance: &Instance) -> Result<BigInt> {
    Ok(solve_otp_xp_detailed(instance, DEFAULT_MAX_XP_TASKS)?.value)
}

pub fn solve_otp_xp_detailed(instance: &Instance, max_tasks: usize) -> Result<OtpSolution> {
    let g = require_otp(instance)?;
    let active = g.per_task.iter().filter(|l| !l.is_empty()).count();
    if active > max_tasks {
        return Err(DraftError::TooLarge(format!(
            "{active} tasks with agents; the reduced-state search is capped at {max_tasks}"
        )));
    }
    Ok(with_weight!(instance, W => xp_with::<W>(&g, instance)))
}

/// Drops every free one-task agent whose task already has an agent from
/// both players. Only meaningful for positions reached under optimal play.
pub fn reduce_same_task(position: &Position) -> Position {
    let inst = position.instance();
    let contested: Vec<bool> = (0..inst.tasks())
        .map(|task| {
            let holds = |p: Player| {
                position
                    .picked(p)
                    .iter()
                    .any(|&k| !inst.agent(k).eff[task].is_zero())
            };
            holds(Player::Alice) && holds(Player::Bob)
        })
        .collect();
    let drop: BTreeSet<usize> = position
        .free()
        .into_iter()
        .filter(|&k| {
            let a = inst.agent(k);
            a.nonzero_count() == 1 && a.eff.iter().enumerate().any(|(t, x)| !x.is_zero() && contested[t])
        })
        .collect();
    if drop.is_empty() {
        return position.clone();
    }
    let remap = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
        set.iter()
            .map(|&k| k - drop.range(..k).count())
            .collect()
    };
    Position::new(
        inst.without(&drop),
        remap(position.picked_a()),
        remap(position.picked_b()),
        position.first(),
        position.to_move(),
    )
    .expect("dropping free agents keeps a valid position")
}

/// `true` when `value` respects `0 <= value <= max efficiency`.
pub fn within_bounds(instance: &Instance, value: &BigInt) -> bool {
    *value >= BigInt::zero() && *value <= BigInt::from(instance.max_eff())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_score, random_otp_instance};

    fn two_task(x: &[u64], y: &[u64]) -> Instance {
        let mut rows: Vec<Vec<u64>> = x.iter().map(|&v| vec![v, 0]).collect();
        rows.extend(y.iter().map(|&v| vec![0, v]));
        let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
        Instance::from_rows(2, &refs).unwrap()
    }

    #[test]
    fn grouping() {
        let g = is_otp_instance(&Instance::from_rows(2, &[&[5, 0], &[0, 4]]).unwrap()).unwrap();
        assert_eq!(g.counts(), vec![1, 1]);
        assert!(is_otp_instance(&Instance::from_rows(2, &[&[1, 1]]).unwrap()).is_none());
        let g = is_otp_instance(&Instance::from_rows(2, &[&[0, 0], &[3, 0]]).unwrap()).unwrap();
        assert_eq!(g.counts(), vec![1, 0]);
    }

    #[test]
    fn two_task_worked_values() {
        // Frozen from the brute-force oracle over all 4! pick orders.
        let inst = two_task(&[5, 3], &[4, 2]);
        assert_eq!(brute_force_score(&inst).unwrap(), BigInt::from(1));
        assert_eq!(solve_two_task_otp(&inst).unwrap(), BigInt::from(1));
        assert_eq!(solve_two_task_otp(&two_task(&[7], &[])).unwrap(), BigInt::from(7));
        assert_eq!(solve_two_task_otp(&two_task(&[6], &[6])).unwrap(), BigInt::from(0));
    }

    #[test]
    fn two_task_preconditions() {
        let three = Instance::from_rows(3, &[&[1, 0, 0]]).unwrap();
        assert!(matches!(solve_two_task_otp(&three), Err(DraftError::Precondition(_))));
        let ttp = Instance::from_rows(2, &[&[1, 1]]).unwrap();
        assert!(matches!(solve_two_task_otp(&ttp), Err(DraftError::Precondition(_))));
        assert!(matches!(solve_otp_xp(&ttp), Err(DraftError::Precondition(_))));
    }

    #[test]
    fn xp_worked_values() {
        assert_eq!(solve_otp_xp(&two_task(&[5, 3], &[4, 2])).unwrap(), BigInt::from(1));
        let single = Instance::from_rows(1, &[&[9], &[4], &[1]]).unwrap();
        assert_eq!(brute_force_score(&single).unwrap(), BigInt::from(5));
        assert_eq!(solve_otp_xp(&single).unwrap(), BigInt::from(5));
        // One agent of value c per task: Alice gets ceil(t/2) of them.
        for t in 1..=3usize {
            let rows: Vec<Vec<u64>> = (0..t)
                .map(|j| (0..t).map(|k| if k == j { 4 } else { 0 }).collect())
                .collect();
            let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
            let inst = Instance::from_rows(t, &refs).unwrap();
            let oracle = brute_force_score(&inst).unwrap();
            assert_eq!(oracle, BigInt::from(if t % 2 == 1 { 4 } else { 0 }));
            assert_eq!(solve_otp_xp(&inst).unwrap(), oracle);
        }
    }

    #[test]
    fn xp_task_guard() {
        let rows: Vec<Vec<u64>> = (0..7).map(|j| (0..7).map(|k| (k == j) as u64).collect()).collect();
        let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
        let inst = Instance::from_rows(7, &refs).unwrap();
        assert!(matches!(solve_otp_xp(&inst), Err(DraftError::TooLarge(_))));
        assert!(solve_otp_xp_detailed(&inst, 7).is_ok());
    }

    #[test]
    fn best_moves_attain_value() {
        for seed in 0..40 {
            let inst = random_otp_instance(7, 2, 10, seed);
            for sol in [
                solve_two_task_otp_detailed(&inst).unwrap(),
                solve_otp_xp_detailed(&inst, 6).unwrap(),
            ] {
                let mv = sol.best_move.unwrap();
                let child = Position::start(inst.clone()).play(mv).unwrap();
                let v = crate::oracle::brute_force_position(&child).unwrap();
                assert_eq!(v, sol.value, "seed {seed}");
            }
        }
    }

    #[test]
    fn same_task_removal() {
        let inst = Instance::from_rows(2, &[&[5, 0], &[3, 0], &[2, 0], &[0, 1]]).unwrap();
        let p = Position::from_ids(inst, &["X1"], &["X2"]).unwrap();
        let r = reduce_same_task(&p);
        assert_eq!(r.free_count(), 1);
        let free = r.free()[0];
        assert_eq!(r.instance().agent(free).id, "X4");
        assert_eq!(r.picked_a().len(), 1);

        let inst = Instance::from_rows(2, &[&[5, 0], &[0, 3], &[2, 0]]).unwrap();
        let p = Position::from_ids(inst, &["X1"], &["X2"]).unwrap();
        assert_eq!(reduce_same_task(&p), p);

        let inst = Instance::from_rows(2, &[&[5, 0], &[0, 3], &[4, 0], &[0, 2], &[1, 0], &[0, 1]]).unwrap();
        let p = Position::from_ids(inst, &["X1", "X2"], &["X3", "X4"]).unwrap();
        assert!(reduce_same_task(&p).is_terminal());
    }
}
