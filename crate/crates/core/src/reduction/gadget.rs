use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use super::qbf::QbfFormula;
use crate::error::{DraftError, Result};
use crate::instance::{Agent, Instance};

/// A generated draft instance with the names of its tasks, agents and
/// efficiency symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetInstance {
    #[serde(skip)]
    pub instance: Instance,
    #[serde(serialize_with = "crate::io::big::int")]
    pub threshold: BigInt,
    /// Task names (`A`, `B`, `S1`.., `U1`, `nU1`, `V1`, `nV1`, `W1`, `nW1`, ..)
    /// with their column index.
    pub task_index: Vec<(String, usize)>,
    /// Agent names, in row order.
    pub agent_index: Vec<(String, usize)>,
    /// Chain symbols (`alpha`, `beta`, `gamma1`, `gamma1'`, `a1`, .., `g<n>`)
    /// and their values.
    pub efficiency_table: Vec<ChainSymbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainSymbol {
    pub name: String,
    #[serde(serialize_with = "crate::io::big::uint")]
    pub value: BigUint,
}

impl GadgetInstance {
    pub fn task(&self, name: &str) -> Option<usize> {
        self.task_index.iter().find(|(s, _)| s == name).map(|&(_, k)| k)
    }

    pub fn agent(&self, name: &str) -> Option<usize> {
        self.agent_index.iter().find(|(s, _)| s == name).map(|&(_, k)| k)
    }

    pub fn symbol(&self, name: &str) -> Option<&BigUint> {
        self.efficiency_table.iter().find(|c| c.name == name).map(|c| &c.value)
    }
}

/// Chain symbols, largest first, ending just above `a_{n+1} = 1`.
fn chain_symbols(n: usize, m: usize) -> Vec<String> {
    let mut names = vec!["alpha".to_string(), "beta".to_string()];
    for j in 1..=m {
        names.push(format!("gamma{j}"));
        names.push(format!("gamma{j}'"));
    }
    for i in 1..=n {
        for s in ["a", "b", "c", "tA", "d", "e", "tB", "f", "g"] {
            names.push(format!("{s}{i}"));
        }
    }
    names
}

struct Builder {
    tasks: usize,
    agents: Vec<Agent>,
}

impl Builder {
    fn push(&mut self, id: String, entries: &[(usize, &BigUint)]) {
        let mut eff = vec![BigUint::zero(); self.tasks];
        for &(task, v) in entries {
            eff[task] = v.clone();
        }
        self.agents.push(Agent::new(id, eff));
    }
}

/// Builds the draft instance whose optimal score reaches `alpha - beta`
/// exactly when Satisfier wins the formula's game.
pub fn build_draft_instance(formula: &QbfFormula) -> Result<GadgetInstance> {
    if !formula.is_normalized() {
        return Err(DraftError::Precondition(
            "formula is not normalized (every present variable needs one negative and one or two positive occurrences)".into(),
        ));
    }
    let (n, m) = (formula.n, formula.m());
    let names = chain_symbols(n, m);
    let five = BigUint::from(5u32);
    let mut value = BigUint::one();
    let mut table: Vec<ChainSymbol> = Vec::with_capacity(names.len());
    for name in names.into_iter().rev() {
        value = &value * &five;
        table.push(ChainSymbol {
            name,
            value: value.clone(),
        });
    }
    table.reverse();
    let sym = |name: &str| -> &BigUint { &table.iter().find(|c| c.name == name).unwrap().value };

    let mut task_index: Vec<(String, usize)> = vec![("A".into(), 0), ("B".into(), 1)];
    for j in 1..=m {
        task_index.push((format!("S{j}"), 1 + j));
    }
    for i in 1..=n {
        for name in ["U", "nU", "V", "nV", "W", "nW"] {
            let k = task_index.len();
            task_index.push((format!("{name}{i}"), k));
        }
    }
    let tasks = task_index.len();
    let col = |name: String| task_index.iter().find(|(s, _)| *s == name).unwrap().1;
    let (ta, tb) = (0, 1);
    let clause_col = |j: usize| 2 + j;
    let one = BigUint::one();

    let mut b = Builder {
        tasks,
        agents: Vec::new(),
    };
    b.push("A1".into(), &[(ta, sym("alpha"))]);
    b.push("B1".into(), &[(tb, sym("beta"))]);
    for j in 1..=m {
        b.push(format!("G{j}"), &[(ta, sym(&format!("gamma{j}")))]);
        b.push(format!("G{j}'"), &[(tb, sym(&format!("gamma{j}'"))), (clause_col(j - 1), &one)]);
    }
    for i in 1..=n {
        // Clause roles; an absent variable gets no clause entries.
        let roles = |var: usize| -> (Option<usize>, Option<usize>, Option<usize>) {
            match formula.roles(var) {
                Some((j, k, l)) => (Some(clause_col(j)), k.map(clause_col), Some(clause_col(l))),
                None => (None, None, None),
            }
        };
        let push = |b: &mut Builder, id: String, task: usize, s: &str, clause: Option<usize>| {
            let v = sym(&format!("{s}{i}")).clone();
            match clause {
                Some(c) => b.push(id, &[(task, &v), (c, &one)]),
                None => b.push(id, &[(task, &v)]),
            }
        };

        let (j, k, l) = roles(2 * (i - 1));
        let (u, nu) = (col(format!("U{i}")), col(format!("nU{i}")));
        push(&mut b, format!("X{i}"), u, "a", None);
        push(&mut b, format!("nX{i}"), nu, "a", None);
        push(&mut b, format!("X{i}.1"), u, "b", j);
        push(&mut b, format!("nX{i}.1"), nu, "b", l);
        push(&mut b, format!("X{i}.2"), u, "c", k);
        push(&mut b, format!("nX{i}.2"), nu, "c", None);
        push(&mut b, format!("TA{i}"), ta, "tA", None);

        let (j, k, l) = roles(2 * (i - 1) + 1);
        let (v, nv) = (col(format!("V{i}")), col(format!("nV{i}")));
        let (w, nw) = (col(format!("W{i}")), col(format!("nW{i}")));
        push(&mut b, format!("Y{i}"), v, "d", None);
        push(&mut b, format!("nY{i}"), nv, "d", None);
        push(&mut b, format!("Y{i}'"), w, "e", None);
        push(&mut b, format!("nY{i}'"), nw, "e", None);
        push(&mut b, format!("TB{i}"), tb, "tB", None);
        push(&mut b, format!("Y{i}.1"), v, "f", j);
        push(&mut b, format!("nY{i}.1"), nv, "f", l);
        push(&mut b, format!("Y{i}.2"), w, "g", k);
        push(&mut b, format!("nY{i}.2"), nw, "g", l);
    }

    let threshold = BigInt::from(sym("alpha").clone()) - BigInt::from(sym("beta").clone());
    let agent_index = b
        .agents
        .iter()
        .enumerate()
        .map(|(k, a)| (a.id.clone(), k))
        .collect();
    let mut instance = Instance::new(tasks, b.agents)?;
    instance.threshold = Some(threshold.clone());
    Ok(GadgetInstance {
        instance,
        threshold,
        task_index,
        agent_index,
        efficiency_table: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::qbf::Lit;

    fn sample() -> QbfFormula {
        let (x, y) = (|n| Lit::x(1, n), |n| Lit::y(1, n));
        QbfFormula::new(1, vec![vec![x(false), y(false)], vec![x(false), y(true)], vec![x(true), y(false)]]).unwrap()
    }

    #[test]
    fn sizes_and_chain() {
        let g = build_draft_instance(&sample()).unwrap();
        assert_eq!(g.instance.len(), 24);
        assert_eq!(g.instance.tasks(), 11);
        let p5 = |k: u32| BigUint::from(5u32).pow(k);
        assert_eq!(g.symbol("alpha").unwrap(), &p5(17));
        assert_eq!(g.threshold, BigInt::from(p5(17)) - BigInt::from(p5(16)));
        assert_eq!(g.symbol("g1").unwrap(), &p5(1));
        for w in g.efficiency_table.windows(2) {
            assert_eq!(&w[0].value, &(&w[1].value * 5u32));
        }
        assert_eq!(g.instance.threshold.as_ref(), Some(&g.threshold));
    }

    #[test]
    fn rows_follow_figure() {
        let g = build_draft_instance(&sample()).unwrap();
        let inst = &g.instance;
        let eff = |agent: &str, task: &str| inst.agent(g.agent(agent).unwrap()).eff[g.task(task).unwrap()].clone();
        // x1 is positive in clauses 1, 2 and negative in 3.
        assert_eq!(eff("X1.1", "S1"), BigUint::one());
        assert_eq!(eff("X1.2", "S2"), BigUint::one());
        assert_eq!(eff("nX1.1", "S3"), BigUint::one());
        assert_eq!(inst.agent(g.agent("nX1.2").unwrap()).nonzero_count(), 1);
        // y1 is positive in clauses 1, 3 and negative in 2.
        assert_eq!(eff("Y1.1", "S1"), BigUint::one());
        assert_eq!(eff("Y1.2", "S3"), BigUint::one());
        assert_eq!(eff("nY1.1", "S2"), BigUint::one());
        assert_eq!(eff("nY1.2", "S2"), BigUint::one());
        assert_eq!(eff("G2'", "S2"), BigUint::one());
        assert_eq!(&eff("TA1", "A"), g.symbol("tA1").unwrap());
        assert_eq!(&eff("TB1", "B"), g.symbol("tB1").unwrap());
        for a in inst.agents() {
            assert!(a.nonzero_count() <= 2, "{}", a.id);
        }
    }

    #[test]
    fn degenerate() {
        let g = build_draft_instance(&QbfFormula::new(0, vec![]).unwrap()).unwrap();
        assert_eq!(g.instance.len(), 2);
        assert_eq!(g.instance.tasks(), 2);
        assert_eq!(g.symbol("alpha").unwrap(), &BigUint::from(25u32));
        assert_eq!(g.threshold, BigInt::from(20));
    }

    #[test]
    fn rejects_unnormalized() {
        let x = |n| Lit::x(1, n);
        let f = QbfFormula::new(1, vec![vec![x(true)], vec![x(true)], vec![x(false)]]).unwrap();
        assert!(matches!(build_draft_instance(&f), Err(DraftError::Precondition(_))));
    }
}
