//! Exact minimax over pick sequences.
//!
//! The search keeps full picked sets (a general assignment value cannot be
//! summarised by per-task maxima), memoises on (free set, Alice's set, side
//! to move) with identical agents relabelled canonically, and narrows the
//! move list with the dominance rules in [`prune`] before branching.

pub(crate) mod prune;
mod search;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{DraftError, Result};
use crate::instance::{Agent, Instance, Player, Position};
use crate::weight::{with_weight, Matrix, Weight};
use prune::{bit, Set};
pub(crate) use search::Searcher;

/// Largest instance the bitset search accepts.
pub const MAX_AGENTS: usize = 128;

/// Which value-preserving move filters the search applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pruning {
    pub dominating_agent: bool,
    pub dominating_pair: bool,
    pub two_task: bool,
    pub pareto: bool,
}

impl Pruning {
    pub const ALL: Pruning = Pruning {
        dominating_agent: true,
        dominating_pair: true,
        two_task: true,
        pareto: true,
    };
    pub const NONE: Pruning = Pruning {
        dominating_agent: false,
        dominating_pair: false,
        two_task: false,
        pareto: false,
    };
}

impl Default for Pruning {
    fn default() -> Self {
        Pruning::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub pruning: Pruning,
    pub alpha_beta: bool,
    /// Abort after visiting this many nodes.
    pub node_budget: Option<u64>,
    pub want_pv: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            pruning: Pruning::ALL,
            alpha_beta: true,
            node_budget: None,
            want_pv: false,
        }
    }
}

impl SolveOptions {
    pub fn unpruned() -> Self {
        SolveOptions {
            pruning: Pruning::NONE,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    /// Nodes whose move list was generated (not answered by the table or
    /// the endgame shortcut).
    pub expanded: u64,
    pub memo_hits: u64,
    pub leaf_evals: u64,
    pub dominating_agent_hits: u64,
    pub dominating_pair_hits: u64,
    pub two_task_hits: u64,
    pub pareto_removed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub score: BigInt,
    /// Agent index of an optimal move; `None` at a finished position.
    pub best_move: Option<usize>,
    /// Optimal continuation to the end of the draft, when requested.
    pub pv: Option<Vec<usize>>,
    pub stats: SearchStats,
}

struct Masks {
    rem: Set,
    a: Set,
    alice: bool,
}

fn masks(position: &Position) -> Result<Masks> {
    let n = position.instance().len();
    if n > MAX_AGENTS {
        return Err(DraftError::TooLarge(format!(
            "{n} agents; exact search supports at most {MAX_AGENTS}"
        )));
    }
    let a: Set = position.picked_a().iter().fold(0, |s, &k| s | bit(k));
    let b: Set = position.picked_b().iter().fold(0, |s, &k| s | bit(k));
    let all: Set = if n == 128 { !0 } else { (1u128 << n) - 1 };
    Ok(Masks {
        rem: all & !a & !b,
        a,
        alice: position.to_move() == Player::Alice,
    })
}

fn budget_error<W: Weight>(s: &mut Searcher<'_, W>, mk: &Masks, budget: u64) -> DraftError {
    let (lo, hi) = s.trivial_bounds(mk.rem, mk.a);
    DraftError::BudgetExceeded {
        budget,
        lower: lo.to_bigint(),
        upper: hi.to_bigint(),
    }
}

fn solve_with<W: Weight>(position: &Position, opts: &SolveOptions) -> Result<SolveResult> {
    let mk = masks(position)?;
    let m = Matrix::<W>::new(position.instance());
    let mut s = Searcher::new(&m, opts.pruning, opts.alpha_beta, opts.node_budget);
    let budget = opts.node_budget.unwrap_or(0);
    let abort = |s: &mut Searcher<'_, W>| budget_error(s, &mk, budget);

    let fresh = mk.rem == s.all_agents();
    let root = if fresh {
        s.opening(mk.alice)
    } else {
        s.full_window(mk.rem, mk.a, mk.alice)
    };
    let score = match root {
        Ok(v) => v,
        Err(_) => return Err(abort(&mut s)),
    };
    if mk.rem == 0 {
        return Ok(SolveResult {
            score: score.to_bigint(),
            best_move: None,
            pv: opts.want_pv.then(Vec::new),
            stats: s.stats,
        });
    }
    let best = match s.best_move(mk.rem, mk.a, mk.alice, &score) {
        Ok(mv) => mv,
        Err(_) => return Err(abort(&mut s)),
    };
    let pv = if opts.want_pv {
        let mut line = vec![best];
        let (mut rem, mut a, mut alice) = (mk.rem & !bit(best), mk.a, mk.alice);
        if alice {
            a |= bit(best);
        }
        alice = !alice;
        while rem != 0 {
            let step = s
                .full_window(rem, a, alice)
                .and_then(|v| s.best_move(rem, a, alice, &v));
            let mv = match step {
                Ok(mv) => mv,
                Err(_) => return Err(abort(&mut s)),
            };
            line.push(mv);
            rem &= !bit(mv);
            if alice {
                a |= bit(mv);
            }
            alice = !alice;
        }
        Some(line)
    } else {
        None
    };
    Ok(SolveResult {
        score: score.to_bigint(),
        best_move: Some(best),
        pv,
        stats: s.stats,
    })
}

/// Game value of `position` under optimal play by both sides.
pub fn solve(position: &Position, opts: &SolveOptions) -> Result<SolveResult> {
    with_weight!(position.instance(), W => solve_with::<W>(position, opts))
}

/// Optimal score of an instance's starting position (Alice first).
pub fn solve_instance(instance: &Instance, opts: &SolveOptions) -> Result<BigInt> {
    Ok(solve(&Position::start(instance.clone()), opts)?.score)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveValue {
    Exact {
        #[serde(serialize_with = "crate::io::big::int")]
        value: BigInt,
    },
    /// The node budget ran out; the value lies in `[lower, upper]`.
    Bounds {
        #[serde(serialize_with = "crate::io::big::int")]
        lower: BigInt,
        #[serde(serialize_with = "crate::io::big::int")]
        upper: BigInt,
    },
}

impl MoveValue {
    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            MoveValue::Exact { value } => Some(value),
            MoveValue::Bounds { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveEval {
    pub agent: usize,
    pub value: MoveValue,
}

fn evaluate_with<W: Weight>(position: &Position, opts: &SolveOptions) -> Result<Vec<MoveEval>> {
    let mk = masks(position)?;
    if mk.rem == 0 {
        return Err(DraftError::Precondition("no free agent to evaluate".into()));
    }
    let m = Matrix::<W>::new(position.instance());
    let mut s = Searcher::new(&m, opts.pruning, opts.alpha_beta, None);
    let mut out: Vec<MoveEval> = Vec::new();
    for j in position.free() {
        if let Some(twin) = out.iter().find(|e| m.rows[e.agent] == m.rows[j]) {
            out.push(MoveEval {
                agent: j,
                value: twin.value.clone(),
            });
            continue;
        }
        let rem = mk.rem & !bit(j);
        let a = if mk.alice { mk.a | bit(j) } else { mk.a };
        s.reset_budget(opts.node_budget);
        let value = match s.full_window(rem, a, !mk.alice) {
            Ok(v) => MoveValue::Exact { value: v.to_bigint() },
            Err(_) => {
                let (lo, hi) = s.trivial_bounds(rem, a);
                MoveValue::Bounds {
                    lower: lo.to_bigint(),
                    upper: hi.to_bigint(),
                }
            }
        };
        out.push(MoveEval { agent: j, value });
    }
    Ok(out)
}

/// Value of every legal move for the player on move, in agent index order.
pub fn evaluate_moves(position: &Position, opts: &SolveOptions) -> Result<Vec<MoveEval>> {
    with_weight!(position.instance(), W => evaluate_with::<W>(position, opts))
}

/// The pick an engine plays at `position`: the solver's move, or once the
/// node budget runs out, the move with the best guaranteed bound for the
/// side on move.
pub fn engine_move(position: &Position, opts: &SolveOptions) -> Result<(usize, MoveValue)> {
    match solve(position, opts) {
        Ok(r) => {
            let mv = r
                .best_move
                .ok_or_else(|| DraftError::Precondition("the draft is over".into()))?;
            Ok((mv, MoveValue::Exact { value: r.score }))
        }
        Err(DraftError::BudgetExceeded { .. }) => {
            let evals = evaluate_moves(position, opts)?;
            let alice = position.to_move() == Player::Alice;
            let bounds = |v: &MoveValue| match v {
                MoveValue::Exact { value } => (value.clone(), value.clone()),
                MoveValue::Bounds { lower, upper } => (lower.clone(), upper.clone()),
            };
            let best = evals
                .into_iter()
                .reduce(|best, e| {
                    let (bl, bu) = bounds(&best.value);
                    let (el, eu) = bounds(&e.value);
                    let better = if alice { (el, eu) > (bl, bu) } else { (eu, el) < (bu, bl) };
                    if better {
                        e
                    } else {
                        best
                    }
                })
                .expect("a position with a budget error has free agents");
            Ok((best.agent, best.value))
        }
        Err(e) => Err(e),
    }
}

/// Componentwise-maximal agents of `free`, one per class of identical
/// vectors (the lowest index). Indices refer to `free`.
pub fn pareto_candidates(free: &[Agent]) -> Vec<usize> {
    (0..free.len())
        .filter(|&j| {
            !free.iter().enumerate().any(|(k, x)| {
                k != j && x.dominates(&free[j]) && (x.eff != free[j].eff || k < j)
            })
        })
        .collect()
}

/// Free agents strictly dominated by another free agent.
pub fn dominated_agents(position: &Position) -> Vec<usize> {
    let inst = position.instance();
    let free = position.free();
    free.iter()
        .copied()
        .filter(|&j| {
            free.iter().any(|&k| {
                k != j && inst.agent(k).dominates(inst.agent(j)) && inst.agent(k).eff != inst.agent(j).eff
            })
        })
        .collect()
}

fn bob_mask(position: &Position) -> Set {
    position.picked_b().iter().fold(0, |s, &k| s | bit(k))
}

/// Runs a bitset filter on the position with the matching integer width.
macro_rules! on_position {
    ($position:expr, |$m:ident, $rem:ident, $a:ident, $b:ident| $body:expr) => {{
        let position: &Position = $position;
        masks(position).map(|mk| {
            let ($rem, $a, $b) = (mk.rem, mk.a, bob_mask(position));
            with_weight!(position.instance(), W => {
                let owned = Matrix::<W>::new(position.instance());
                let $m = &owned;
                $body
            })
        })
    }};
}

/// A free agent whose edge on some task exceeds twice the total potential of
/// every other free agent; picking it is optimal for the next player.
pub fn find_dominating_agent(position: &Position) -> Option<usize> {
    on_position!(position, |m, rem, a, b| prune::first_dominating(m, rem, a, b))
        .ok()
        .flatten()
}

/// Every free agent satisfying the dominating-agent inequality.
pub fn dominating_agents(position: &Position) -> Vec<usize> {
    on_position!(position, |m, rem, a, b| prune::dominating_agents(m, rem, a, b)).unwrap_or_default()
}

/// Two free agents such that, whichever is taken by whichever player, the
/// other becomes dominating. The detector is sound but not complete.
pub fn find_dominating_pair(position: &Position) -> Option<(usize, usize)> {
    on_position!(position, |m, rem, a, b| prune::dominating_pair(m, rem, a, b))
        .ok()
        .flatten()
}

pub fn is_dominating_pair(position: &Position, x: usize, y: usize) -> bool {
    on_position!(position, |m, rem, a, b| prune::is_dominating_pair(m, rem, a, b, x, y)).unwrap_or(false)
}

/// For a two-task position, the free agents that maximise each task.
pub fn two_task_candidates(position: &Position) -> Result<Vec<usize>> {
    let t = position.instance().tasks();
    if t != 2 {
        return Err(DraftError::Precondition(format!(
            "two-task candidates need exactly 2 tasks, instance has {t}"
        )));
    }
    on_position!(position, |m, rem, _a, _b| prune::two_task(m, rem))
}

#[cfg(test)]
mod tests;
