//! Move filters licensed by the dominance lemmas, on agent bitsets.
//!
//! Each filter returns a subset of the free agents that still contains an
//! optimal move for whoever is next to play.

use crate::weight::{Matrix, Weight};

pub(crate) type Set = u128;

pub(crate) fn bits(mut s: Set) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let k = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(k)
        }
    })
}

pub(crate) fn bit(k: usize) -> Set {
    1u128 << k
}

/// Best efficiency per task among the agents of `set` (zero if none).
pub(crate) fn best_per_task<W: Weight>(m: &Matrix<W>, set: Set) -> Vec<W> {
    let mut best = vec![W::zero(); m.tasks];
    for k in bits(set) {
        for (b, x) in best.iter_mut().zip(&m.rows[k]) {
            if x > b {
                *b = x.clone();
            }
        }
    }
    best
}

fn sum_max<W: Weight>(m: &Matrix<W>, set: Set) -> W {
    bits(set).fold(W::zero(), |acc, k| acc + m.row_max[k].clone())
}

/// Whether free agent `j` satisfies the dominating-agent inequality
/// `max(x_i - alpha_i, x_i - beta_i) >= 2 * others` for some task `i`.
fn satisfies<W: Weight>(m: &Matrix<W>, j: usize, alpha: &[W], beta: &[W], others: &W) -> bool {
    let need = others.clone() + others.clone();
    if m.row_max[j] < need {
        return false;
    }
    m.rows[j].iter().enumerate().any(|(i, x)| {
        let floor = if alpha[i] < beta[i] { &alpha[i] } else { &beta[i] };
        x.clone() - floor.clone() >= need
    })
}

/// All dominating free agents, in index order.
pub(crate) fn dominating_agents<W: Weight>(m: &Matrix<W>, rem: Set, a: Set, b: Set) -> Vec<usize> {
    let alpha = best_per_task(m, a);
    let beta = best_per_task(m, b);
    let total = sum_max(m, rem);
    bits(rem)
        .filter(|&j| {
            let others = total.clone() - m.row_max[j].clone();
            satisfies(m, j, &alpha, &beta, &others)
        })
        .collect()
}

pub(crate) fn first_dominating<W: Weight>(m: &Matrix<W>, rem: Set, a: Set, b: Set) -> Option<usize> {
    let alpha = best_per_task(m, a);
    let beta = best_per_task(m, b);
    let total = sum_max(m, rem);
    bits(rem).find(|&j| {
        let others = total.clone() - m.row_max[j].clone();
        satisfies(m, j, &alpha, &beta, &others)
    })
}

fn raised<W: Weight>(m: &Matrix<W>, base: &[W], k: usize) -> Vec<W> {
    base.iter()
        .zip(&m.rows[k])
        .map(|(b, x)| if x > b { x.clone() } else { b.clone() })
        .collect()
}

/// `{x, y}` is a dominating pair if, once either is taken by either player,
/// the other one is a dominating agent.
pub(crate) fn is_dominating_pair<W: Weight>(
    m: &Matrix<W>,
    rem: Set,
    a: Set,
    b: Set,
    x: usize,
    y: usize,
) -> bool {
    if x == y || rem & bit(x) == 0 || rem & bit(y) == 0 {
        return false;
    }
    let alpha = best_per_task(m, a);
    let beta = best_per_task(m, b);
    let others = sum_max(m, rem & !bit(x) & !bit(y));
    pair_check(m, &alpha, &beta, &others, x, y)
}

fn pair_check<W: Weight>(m: &Matrix<W>, alpha: &[W], beta: &[W], others: &W, x: usize, y: usize) -> bool {
    let after = |taken: usize, other: usize| {
        let a2 = raised(m, alpha, taken);
        let b2 = raised(m, beta, taken);
        satisfies(m, other, &a2, beta, others) && satisfies(m, other, alpha, &b2, others)
    };
    after(x, y) && after(y, x)
}

/// First dominating pair in lexicographic index order.
pub(crate) fn dominating_pair<W: Weight>(m: &Matrix<W>, rem: Set, a: Set, b: Set) -> Option<(usize, usize)> {
    if rem.count_ones() < 2 {
        return None;
    }
    let alpha = best_per_task(m, a);
    let beta = best_per_task(m, b);
    let total = sum_max(m, rem);
    let free: Vec<usize> = bits(rem).collect();
    for (p, &x) in free.iter().enumerate() {
        for &y in &free[p + 1..] {
            let others = total.clone() - m.row_max[x].clone() - m.row_max[y].clone();
            let need = others.clone() + others.clone();
            if m.row_max[x] < need || m.row_max[y] < need {
                continue;
            }
            if pair_check(m, &alpha, &beta, &others, x, y) {
                return Some((x, y));
            }
        }
    }
    None
}

/// One representative (the lowest index) per class of identical agents.
pub(crate) fn dedup<W: Weight>(m: &Matrix<W>, rem: Set) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for k in bits(rem) {
        if !out.iter().any(|&o| m.rows[o] == m.rows[k]) {
            out.push(k);
        }
    }
    out
}

/// Componentwise-maximal free agents, one per class of identical vectors.
pub(crate) fn pareto<W: Weight>(m: &Matrix<W>, rem: Set) -> Vec<usize> {
    let free: Vec<usize> = bits(rem).collect();
    free.iter()
        .copied()
        .filter(|&j| {
            !free.iter().any(|&k| {
                k != j
                    && m.rows[k].iter().zip(&m.rows[j]).all(|(x, y)| x >= y)
                    && (m.rows[k] != m.rows[j] || k < j)
            })
        })
        .collect()
}

/// For each of the two tasks, a free agent of maximum efficiency there.
/// Ties prefer the larger efficiency on the other task, then the lower index,
/// so the chosen agent is never dominated by another top agent.
pub(crate) fn two_task<W: Weight>(m: &Matrix<W>, rem: Set) -> Vec<usize> {
    debug_assert_eq!(m.tasks, 2);
    let mut out = Vec::with_capacity(2);
    for task in 0..2 {
        let best = bits(rem).fold(None::<usize>, |best, k| match best {
            None => Some(k),
            Some(b) => {
                let key_k = (&m.rows[k][task], &m.rows[k][1 - task]);
                let key_b = (&m.rows[b][task], &m.rows[b][1 - task]);
                if key_k > key_b {
                    Some(k)
                } else {
                    Some(b)
                }
            }
        });
        if let Some(k) = best {
            if !out.contains(&k) {
                out.push(k);
            }
        }
    }
    out
}
