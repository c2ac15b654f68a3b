//! Maximum-weight assignment of tasks to agents.
//!
//! Potentials-based shortest augmenting path (Hungarian method) on the
//! rectangular matrix with the smaller side as rows. Weights are
//! nonnegative, so a perfect assignment of the smaller side has the same
//! value as the best partial one: a zero entry stands for "unassigned".

use num_bigint::BigInt;

use crate::error::{DraftError, Result};
use crate::instance::Agent;
use crate::weight::{with_weight, Matrix, Weight};

/// Value of the best assignment using only the agents listed in `rows`.
pub(crate) fn assignment_of<W: Weight>(m: &Matrix<W>, rows: &[usize]) -> W {
    let t = m.tasks;
    if rows.is_empty() || t == 0 {
        return W::zero();
    }
    if rows.len() == 1 {
        return m.row_max[rows[0]].clone();
    }
    if t == 1 {
        return rows.iter().map(|&r| m.row_max[r].clone()).max().unwrap();
    }
    // Orient so that `n <= k`; `w(i, j)` reads the efficiency in that frame.
    if rows.len() <= t {
        hungarian_max(rows.len(), t, |i, j| m.rows[rows[i]][j].clone())
    } else {
        hungarian_max(t, rows.len(), |i, j| m.rows[rows[j]][i].clone())
    }
}

/// Maximum weight perfect matching of `n` rows into `k >= n` columns.
fn hungarian_max<W: Weight>(n: usize, k: usize, w: impl Fn(usize, usize) -> W) -> W {
    debug_assert!(n <= k);
    // Minimise cost = -weight; arrays are 1-based with sentinel column 0.
    let mut u = vec![W::zero(); n + 1];
    let mut v = vec![W::zero(); k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<W>> = vec![None; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<W> = None;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = -w(i0 - 1, j - 1) - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|mv| cur < *mv) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().unwrap();
                if delta.as_ref().is_none_or(|d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column always exists when n <= k");
            for j in 0..=k {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(mv) = minv[j].take() {
                    minv[j] = Some(mv - delta.clone());
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = W::zero();
    for j in 1..=k {
        if p[j] != 0 {
            total = total + w(p[j] - 1, j - 1);
        }
    }
    total
}

/// Best total efficiency obtainable by assigning distinct agents to distinct
/// tasks; unassigned tasks contribute nothing.
pub fn assignment_value(agents: &[Agent], tasks: usize) -> Result<BigInt> {
    if let Some(bad) = agents.iter().find(|a| a.eff.len() != tasks) {
        return Err(DraftError::DimensionMismatch {
            agent: bad.id.clone(),
            expected: tasks,
            got: bad.eff.len(),
        });
    }
    // Ids are irrelevant here and may repeat; build the matrix directly.
    let inst = crate::instance::Instance::new(
        tasks,
        agents
            .iter()
            .enumerate()
            .map(|(k, a)| Agent::new(k.to_string(), a.eff.clone()))
            .collect(),
    )?;
    let rows: Vec<usize> = (0..agents.len()).collect();
    Ok(with_weight!(&inst, W => {
        let m = Matrix::<W>::new(&inst);
        assignment_of(&m, &rows).to_bigint()
    }))
}
