use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{DraftError, Result};

/// Default largest `n` accepted by [`qbf_game_winner`].
pub const DEFAULT_MAX_QBF_PAIRS: usize = 6;

/// A literal over the prefix `x_1 y_1 ... x_n y_n`. `var` is the 0-based
/// prefix position: `2(i-1)` is `x_i`, `2(i-1)+1` is `y_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Lit {
    pub var: usize,
    pub negated: bool,
}

impl Lit {
    pub fn x(i: usize, negated: bool) -> Lit {
        Lit { var: 2 * (i - 1), negated }
    }

    pub fn y(i: usize, negated: bool) -> Lit {
        Lit {
            var: 2 * (i - 1) + 1,
            negated,
        }
    }

    pub fn is_universal(self) -> bool {
        self.var % 2 == 1
    }

    /// 1-based pair index `i` of `x_i` / `y_i`.
    pub fn pair(self) -> usize {
        self.var / 2 + 1
    }

    fn holds(self, valuation: u64) -> bool {
        (valuation >> self.var & 1 == 1) != self.negated
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.is_universal() { 'y' } else { 'x' };
        write!(f, "{}{}{}", if self.negated { "~" } else { "" }, name, self.pair())
    }
}

/// `exists x_1 forall y_1 ... exists x_n forall y_n . C_1 and ... and C_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QbfFormula {
    pub n: usize,
    pub clauses: Vec<Vec<Lit>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QbfPlayer {
    Satisfier,
    Falsifier,
}

impl fmt::Display for QbfPlayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QbfPlayer::Satisfier => "satisfier",
            QbfPlayer::Falsifier => "falsifier",
        })
    }
}

/// Positive and negative occurrence counts of `var`.
pub(crate) fn occurrences(clauses: &[Vec<Lit>], var: usize) -> (usize, usize) {
    let mut pos = 0;
    let mut neg = 0;
    for l in clauses.iter().flatten().filter(|l| l.var == var) {
        if l.negated {
            neg += 1;
        } else {
            pos += 1;
        }
    }
    (pos, neg)
}

impl QbfFormula {
    pub fn new(n: usize, clauses: Vec<Vec<Lit>>) -> Result<QbfFormula> {
        for (j, c) in clauses.iter().enumerate() {
            if c.len() > 3 {
                return Err(DraftError::Precondition(format!(
                    "clause {} has {} literals, at most 3 allowed",
                    j + 1,
                    c.len()
                )));
            }
            if let Some(l) = c.iter().find(|l| l.var >= 2 * n) {
                return Err(DraftError::Precondition(format!(
                    "literal {l} outside the prefix of {n} pairs"
                )));
            }
        }
        Ok(QbfFormula { n, clauses })
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Every variable occurs either not at all, or once negatively and once
    /// or twice positively.
    pub fn is_normalized(&self) -> bool {
        (0..2 * self.n).all(|v| matches!(occurrences(&self.clauses, v), (0, 0) | (1, 1) | (2, 1)))
    }

    /// Clause-membership roles of a variable: the first and (optional)
    /// second clause holding it positively, and the clause holding it
    /// negatively, all 0-based. `None` for an absent variable.
    pub fn roles(&self, var: usize) -> Option<(usize, Option<usize>, usize)> {
        let mut pos = Vec::new();
        let mut neg = None;
        for (j, c) in self.clauses.iter().enumerate() {
            for l in c.iter().filter(|l| l.var == var) {
                if l.negated {
                    neg = Some(j);
                } else {
                    pos.push(j);
                }
            }
        }
        Some((*pos.first()?, pos.get(1).copied(), neg?))
    }

    fn satisfied(&self, valuation: u64) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(valuation)))
    }
}

impl fmt::Display for QbfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            write!(f, "E x{i} A y{i} ")?;
        }
        f.write_str(":")?;
        for (j, c) in self.clauses.iter().enumerate() {
            let lits: Vec<String> = c.iter().map(Lit::to_string).collect();
            write!(f, "{}({})", if j == 0 { " " } else { " & " }, lits.join(" | "))?;
        }
        Ok(())
    }
}

/// Reads a QDIMACS-style formula. Comments start with `c`; the header is
/// `p cnf <vars> <clauses>`; the prefix is a strict alternation of single
/// variable `e v 0` and `a v 0` lines starting with `e`; then one clause per
/// line, 0-terminated.
pub fn parse_qdimacs(text: &str) -> Result<QbfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut prefix: Vec<usize> = Vec::new();
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let at = |line: usize| format!("line {line}");
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut words = line.split_whitespace();
        let first = words.next().unwrap();
        match first {
            "p" => {
                if header.is_some() {
                    return Err(DraftError::parse(at(line_no), "duplicate header"));
                }
                let rest: Vec<&str> = words.collect();
                let [fmt, v, c] = rest.as_slice() else {
                    return Err(DraftError::parse(at(line_no), "expected `p cnf <vars> <clauses>`"));
                };
                if *fmt != "cnf" {
                    return Err(DraftError::parse(at(line_no), "expected `p cnf`"));
                }
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| DraftError::parse(at(line_no), format!("bad count {s:?}")))
                };
                header = Some((num(v)?, num(c)?));
            }
            "e" | "a" => {
                if header.is_none() {
                    return Err(DraftError::parse(at(line_no), "quantifier before header"));
                }
                if !clauses.is_empty() {
                    return Err(DraftError::parse(at(line_no), "quantifier after clauses"));
                }
                let expected = if prefix.len() % 2 == 0 { "e" } else { "a" };
                if first != expected {
                    return Err(DraftError::parse(
                        at(line_no),
                        format!("prefix must alternate e/a one variable at a time; expected `{expected}`"),
                    ));
                }
                let nums: Vec<&str> = words.collect();
                let [v, "0"] = nums.as_slice() else {
                    return Err(DraftError::parse(at(line_no), "expected exactly one variable then 0"));
                };
                let v: usize = v
                    .parse()
                    .ok()
                    .filter(|&v| v > 0)
                    .ok_or_else(|| DraftError::parse(at(line_no), format!("bad variable {v:?}")))?;
                if prefix.contains(&v) {
                    return Err(DraftError::parse(at(line_no), format!("variable {v} quantified twice")));
                }
                prefix.push(v);
            }
            _ => {
                if header.is_none() {
                    return Err(DraftError::parse(at(line_no), "clause before header"));
                }
                let mut clause = Vec::new();
                let mut closed = false;
                for w in std::iter::once(first).chain(words) {
                    if closed {
                        return Err(DraftError::parse(at(line_no), "text after terminating 0"));
                    }
                    let v: i64 = w
                        .parse()
                        .map_err(|_| DraftError::parse(at(line_no), format!("bad literal {w:?}")))?;
                    if v == 0 {
                        closed = true;
                        continue;
                    }
                    let pos = prefix
                        .iter()
                        .position(|&p| p as u64 == v.unsigned_abs())
                        .ok_or_else(|| {
                            DraftError::parse(at(line_no), format!("variable {} is not quantified", v.abs()))
                        })?;
                    clause.push(Lit {
                        var: pos,
                        negated: v < 0,
                    });
                }
                if !closed {
                    return Err(DraftError::parse(at(line_no), "clause not terminated by 0"));
                }
                clauses.push(clause);
            }
        }
    }
    let Some((_, declared)) = header else {
        return Err(DraftError::parse("input", "missing `p cnf` header"));
    };
    if declared != clauses.len() {
        return Err(DraftError::parse(
            "input",
            format!("header declares {declared} clauses, found {}", clauses.len()),
        ));
    }
    if prefix.len() % 2 != 0 {
        return Err(DraftError::parse("input", "prefix must end with a universal variable"));
    }
    QbfFormula::new(prefix.len() / 2, clauses)
}

/// QDIMACS text with variables numbered `1..=2n` in prefix order.
pub fn to_qdimacs(f: &QbfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", 2 * f.n, f.m());
    for v in 0..2 * f.n {
        out.push_str(&format!("{} {} 0\n", if v % 2 == 0 { 'e' } else { 'a' }, v + 1));
    }
    for c in &f.clauses {
        for l in c {
            let v = l.var as i64 + 1;
            out.push_str(&format!("{} ", if l.negated { -v } else { v }));
        }
        out.push_str("0\n");
    }
    out
}

/// Removes pure variables (repeatedly, as removals can make others pure) and
/// flips polarities so each remaining variable is positive at least as often
/// as negative. Absent variables stay in the prefix. The game value is
/// unchanged.
pub fn normalize_qbf(formula: &QbfFormula) -> Result<QbfFormula> {
    for v in 0..2 * formula.n {
        let (p, q) = occurrences(&formula.clauses, v);
        if p + q != 3 {
            let lit = Lit { var: v, negated: false };
            return Err(DraftError::Precondition(format!(
                "variable {lit} occurs {} times, expected exactly 3",
                p + q
            )));
        }
    }
    let mut clauses = formula.clauses.clone();
    loop {
        let pure = (0..2 * formula.n).find_map(|v| match occurrences(&clauses, v) {
            (0, 0) => None,
            (p, 0) => Some((v, p, false)),
            (0, q) => Some((v, q, true)),
            _ => None,
        });
        let Some((v, _, negated)) = pure else { break };
        let lit = Lit { var: v, negated };
        if lit.is_universal() {
            // Falsifier makes the literal false: drop it from its clauses.
            for c in &mut clauses {
                c.retain(|l| *l != lit);
            }
        } else {
            // Satisfier makes it true: its clauses are satisfied.
            clauses.retain(|c| !c.contains(&lit));
        }
    }
    for v in 0..2 * formula.n {
        let (p, q) = occurrences(&clauses, v);
        if q > p {
            for l in clauses.iter_mut().flatten().filter(|l| l.var == v) {
                l.negated = !l.negated;
            }
        }
    }
    QbfFormula::new(formula.n, clauses)
}

/// Winner of the QBF game with `n <= DEFAULT_MAX_QBF_PAIRS`.
pub fn qbf_game_winner(formula: &QbfFormula) -> Result<QbfPlayer> {
    qbf_game_winner_bounded(formula, DEFAULT_MAX_QBF_PAIRS)
}

pub fn qbf_game_winner_bounded(formula: &QbfFormula, max_pairs: usize) -> Result<QbfPlayer> {
    if formula.n > max_pairs {
        return Err(DraftError::TooLarge(format!(
            "{} variable pairs; exhaustive play is capped at {max_pairs}",
            formula.n
        )));
    }
    fn wins(f: &QbfFormula, var: usize, valuation: u64) -> bool {
        if var == 2 * f.n {
            return f.satisfied(valuation);
        }
        let lo = wins(f, var + 1, valuation);
        let hi = wins(f, var + 1, valuation | 1 << var);
        if var % 2 == 0 {
            lo || hi
        } else {
            lo && hi
        }
    }
    Ok(if wins(formula, 0, 0) {
        QbfPlayer::Satisfier
    } else {
        QbfPlayer::Falsifier
    })
}

/// Distinct variables touched by the clauses, in prefix order.
pub fn used_variables(formula: &QbfFormula) -> BTreeSet<usize> {
    formula.clauses.iter().flatten().map(|l| l.var).collect()
}
