use std::collections::HashMap;

use super::prune::{self, bit, bits, Set};
use super::{Pruning, SearchStats};
use crate::matching::assignment_of;
use crate::weight::{Matrix, Weight};

#[derive(Debug)]
pub(crate) struct Abort;

#[derive(Debug, Clone)]
struct Bound<W> {
    lo: W,
    hi: W,
}

/// One search over a fixed matrix: private transposition table, leaf cache
/// and counters.
pub(crate) struct Searcher<'m, W> {
    m: &'m Matrix<W>,
    all: Set,
    /// Members of each class of identical agents, ascending.
    classes: Vec<Vec<usize>>,
    has_twins: bool,
    pruning: Pruning,
    alpha_beta: bool,
    budget: Option<u64>,
    inf: W,
    tt: HashMap<(Set, Set, bool), Bound<W>>,
    leaves: HashMap<Set, W>,
    pub(crate) stats: SearchStats,
}

impl<'m, W: Weight> Searcher<'m, W> {
    pub(crate) fn new(m: &'m Matrix<W>, pruning: Pruning, alpha_beta: bool, budget: Option<u64>) -> Self {
        let n = m.len();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for k in 0..n {
            match classes.iter_mut().find(|c| m.rows[c[0]] == m.rows[k]) {
                Some(c) => c.push(k),
                None => classes.push(vec![k]),
            }
        }
        let has_twins = classes.len() < n;
        let inf = m.row_max.iter().fold(W::one(), |acc, x| acc + x.clone());
        Searcher {
            m,
            all: if n == 128 { !0 } else { (1u128 << n) - 1 },
            classes,
            has_twins,
            pruning,
            alpha_beta,
            budget,
            inf,
            tt: HashMap::new(),
            leaves: HashMap::new(),
            stats: SearchStats::default(),
        }
    }

    pub(crate) fn all_agents(&self) -> Set {
        self.all
    }

    pub(crate) fn reset_budget(&mut self, budget: Option<u64>) {
        self.budget = budget.map(|b| self.stats.nodes + b);
    }

    /// Relabels identical agents so that equivalent states share one key.
    fn canon(&self, rem: Set, a: Set) -> (Set, Set) {
        if !self.has_twins {
            return (rem, a);
        }
        let (mut cr, mut ca) = (0, 0);
        for c in &self.classes {
            if c.len() == 1 {
                cr |= rem & bit(c[0]);
                ca |= a & bit(c[0]);
                continue;
            }
            let r = c.iter().filter(|&&k| rem & bit(k) != 0).count();
            let x = c.iter().filter(|&&k| a & bit(k) != 0).count();
            for &k in &c[..r] {
                cr |= bit(k);
            }
            for &k in &c[r..r + x] {
                ca |= bit(k);
            }
        }
        (cr, ca)
    }

    fn side_value(&mut self, set: Set) -> W {
        let key = self.canon(set, 0).0;
        if let Some(v) = self.leaves.get(&key) {
            return v.clone();
        }
        self.stats.leaf_evals += 1;
        let rows: Vec<usize> = bits(key).collect();
        let v = assignment_of(self.m, &rows);
        self.leaves.insert(key, v.clone());
        v
    }

    pub(crate) fn terminal_value(&mut self, a: Set) -> W {
        let b = self.all & !a;
        self.side_value(a) - self.side_value(b)
    }

    /// Bounds on the value valid by monotonicity of assignment values.
    pub(crate) fn trivial_bounds(&mut self, rem: Set, a: Set) -> (W, W) {
        let b = self.all & !rem & !a;
        let lo = self.side_value(a) - self.side_value(b | rem);
        let hi = self.side_value(a | rem) - self.side_value(b);
        (lo, hi)
    }

    /// Candidate moves after the enabled pruning rules, best-first.
    pub(crate) fn candidates(&mut self, rem: Set, a: Set) -> Vec<usize> {
        if rem.count_ones() == 1 {
            return vec![rem.trailing_zeros() as usize];
        }
        let b = self.all & !rem & !a;
        let m = self.m;
        if self.pruning.dominating_agent {
            if let Some(j) = prune::first_dominating(m, rem, a, b) {
                self.stats.dominating_agent_hits += 1;
                return vec![j];
            }
        }
        if self.pruning.dominating_pair {
            if let Some((x, y)) = prune::dominating_pair(m, rem, a, b) {
                self.stats.dominating_pair_hits += 1;
                let mut c = prune::dedup(m, bit(x) | bit(y));
                self.order(&mut c);
                return c;
            }
        }
        let mut c = if self.pruning.two_task && m.tasks == 2 {
            self.stats.two_task_hits += 1;
            prune::two_task(m, rem)
        } else if self.pruning.pareto {
            let c = prune::pareto(m, rem);
            self.stats.pareto_removed += rem.count_ones() as u64 - c.len() as u64;
            c
        } else {
            prune::dedup(m, rem)
        };
        self.order(&mut c);
        c
    }

    fn order(&self, c: &mut [usize]) {
        let m = self.m;
        c.sort_by(|&x, &y| m.row_max[y].cmp(&m.row_max[x]).then(x.cmp(&y)));
    }

    /// Value of a fresh draft. It lies in `[0, U]` when Alice opens and in
    /// `[-U, 0]` when Bob does, `U` the largest efficiency, so the window
    /// starts there instead of at infinity.
    pub(crate) fn opening(&mut self, alice: bool) -> Result<W, Abort> {
        if !self.alpha_beta {
            return self.full_window(self.all, 0, alice);
        }
        let u = self.m.row_max.iter().max().cloned().unwrap_or_else(W::zero);
        let (lo, hi) = if alice {
            (-W::one(), u + W::one())
        } else {
            (-u - W::one(), W::one())
        };
        self.search(self.all, 0, alice, lo, hi)
    }

    pub(crate) fn full_window(&mut self, rem: Set, a: Set, alice: bool) -> Result<W, Abort> {
        let (lo, hi) = (-self.inf.clone(), self.inf.clone());
        self.search(rem, a, alice, lo, hi)
    }

    /// Fail-soft minimax with alpha-beta windows over a bounds table.
    pub(crate) fn search(&mut self, rem: Set, a: Set, alice: bool, mut alpha: W, mut beta: W) -> Result<W, Abort> {
        self.stats.nodes += 1;
        if let Some(limit) = self.budget {
            if self.stats.nodes > limit {
                return Err(Abort);
            }
        }
        if rem == 0 {
            return Ok(self.terminal_value(a));
        }
        // Plain minimax (alpha-beta off) expands every ply down to the end.
        match if self.alpha_beta { rem.count_ones() } else { 0 } {
            1 => return Ok(self.terminal_value(if alice { a | rem } else { a })),
            // Whoever moves takes one agent and the other player the last.
            2 => {
                let x = rem & rem.wrapping_neg();
                let (vx, vy) = (self.terminal_value(a | x), self.terminal_value(a | (rem ^ x)));
                return Ok(if alice == (vx >= vy) { vx } else { vy });
            }
            _ => {}
        }
        let (cr, ca) = self.canon(rem, a);
        let key = (cr, ca, alice);
        if let Some(e) = self.tt.get(&key) {
            self.stats.memo_hits += 1;
            if e.lo == e.hi || e.lo >= beta {
                return Ok(e.lo.clone());
            }
            if e.hi <= alpha {
                return Ok(e.hi.clone());
            }
            if self.alpha_beta {
                if e.lo > alpha {
                    alpha = e.lo.clone();
                }
                if e.hi < beta {
                    beta = e.hi.clone();
                }
            }
        }
        let (alpha0, beta0) = (alpha.clone(), beta.clone());
        self.stats.expanded += 1;
        let moves = self.candidates(rem, a);
        let mut best: Option<W> = None;
        for mv in moves {
            let nrem = rem & !bit(mv);
            let na = if alice { a | bit(mv) } else { a };
            let v = if self.alpha_beta {
                self.search(nrem, na, !alice, alpha.clone(), beta.clone())?
            } else {
                self.full_window(nrem, na, !alice)?
            };
            let better = match &best {
                None => true,
                Some(b) => (alice && v > *b) || (!alice && v < *b),
            };
            if better {
                best = Some(v.clone());
            }
            if alice && v > alpha {
                alpha = v;
            } else if !alice && v < beta {
                beta = v;
            }
            if self.alpha_beta && alpha >= beta {
                break;
            }
        }
        let best = best.expect("a nonterminal position has a move");
        let inf = self.inf.clone();
        let e = self.tt.entry(key).or_insert_with(|| Bound { lo: -inf.clone(), hi: inf });
        if !self.alpha_beta || (best > alpha0 && best < beta0) {
            e.lo = best.clone();
            e.hi = best.clone();
        } else if best <= alpha0 {
            if best < e.hi {
                e.hi = best.clone();
            }
        } else if best > e.lo {
            e.lo = best.clone();
        }
        Ok(best)
    }

    /// Lowest-index candidate whose subtree attains `value`.
    pub(crate) fn best_move(&mut self, rem: Set, a: Set, alice: bool, value: &W) -> Result<usize, Abort> {
        let mut cands = self.candidates(rem, a);
        cands.sort_unstable();
        for mv in cands {
            let nrem = rem & !bit(mv);
            let na = if alice { a | bit(mv) } else { a };
            let attains = if alice {
                // Null window around `value`: result >= value iff child >= value.
                let v = self.search(nrem, na, false, value.clone() - W::one(), value.clone())?;
                v >= *value
            } else {
                let v = self.search(nrem, na, true, value.clone(), value.clone() + W::one())?;
                v <= *value
            };
            if attains {
                return Ok(mv);
            }
        }
        unreachable!("some candidate attains the minimax value")
    }
}
