use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::gadget::build_draft_instance;
use super::qbf::{qbf_game_winner, Lit, QbfFormula, QbfPlayer};
use crate::error::Result;
use crate::solver::{solve, SolveOptions};
use crate::Position;

/// Every formula over `x_1, y_1` in which each variable occurs twice
/// positively and once negatively, spread over `m` nonempty clauses of at
/// most three literals with no literal repeated inside a clause. Formulas
/// equal up to clause order are listed once, clauses sorted.
pub fn single_pair_corpus(m: usize) -> Vec<QbfFormula> {
    let lits = [
        Lit::x(1, false),
        Lit::x(1, false),
        Lit::x(1, true),
        Lit::y(1, false),
        Lit::y(1, false),
        Lit::y(1, true),
    ];
    let mut seen: BTreeSet<Vec<Vec<Lit>>> = BTreeSet::new();
    if m == 0 {
        return Vec::new();
    }
    let total = m.pow(lits.len() as u32);
    for code in 0..total {
        let mut clauses: Vec<Vec<Lit>> = vec![Vec::new(); m];
        let mut c = code;
        for &l in &lits {
            clauses[c % m].push(l);
            c /= m;
        }
        let valid = clauses.iter().all(|cl| {
            let distinct: BTreeSet<&Lit> = cl.iter().collect();
            !cl.is_empty() && cl.len() <= 3 && distinct.len() == cl.len()
        });
        if !valid {
            continue;
        }
        for cl in &mut clauses {
            cl.sort();
        }
        clauses.sort();
        seen.insert(clauses);
    }
    seen.into_iter()
        .map(|clauses| QbfFormula::new(1, clauses).expect("corpus clauses are in range"))
        .collect()
}

/// The bundled corpus: all single-pair formulas with two or three clauses.
pub fn bundled_corpus() -> Vec<QbfFormula> {
    (2..=3).flat_map(single_pair_corpus).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusOutcome {
    pub formula: String,
    pub winner: QbfPlayer,
    #[serde(serialize_with = "crate::io::big::int")]
    pub score: BigInt,
    #[serde(serialize_with = "crate::io::big::int")]
    pub threshold: BigInt,
    /// `score >= threshold` exactly when Satisfier wins.
    pub agrees: bool,
}

/// Solves the gadget instance of `formula` and compares with the referee.
pub fn check_formula(formula: &QbfFormula, node_budget: Option<u64>) -> Result<CorpusOutcome> {
    let gadget = build_draft_instance(formula)?;
    let winner = qbf_game_winner(formula)?;
    let opts = SolveOptions {
        node_budget,
        ..SolveOptions::default()
    };
    let score = solve(&Position::start(gadget.instance), &opts)?.score;
    let reached = score >= gadget.threshold;
    Ok(CorpusOutcome {
        formula: formula.to_string(),
        winner,
        agrees: reached == (winner == QbfPlayer::Satisfier),
        score,
        threshold: gadget.threshold,
    })
}
