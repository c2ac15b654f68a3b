//! Seeded self-check suites behind `draftgame verify`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{DraftError, Result};
use crate::oracle::{brute_force_score, game_sum, random_instance, random_otp_instance, DEFAULT_MAX_EFF};
use crate::otp::{solve_otp_xp, solve_two_task_otp};
use crate::reduction::{build_draft_instance, bundled_corpus, check_formula, verify_forced_order, PairPolicy};
use crate::score::score_upper_bound;
use crate::solver::{solve_instance, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Solver,
    Otp,
    Oracle,
    Reduction,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Solver, Suite::Otp, Suite::Oracle, Suite::Reduction];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Solver => "solver",
            Suite::Otp => "otp",
            Suite::Oracle => "oracle",
            Suite::Reduction => "reduction",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = DraftError;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| DraftError::parse("suite", format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub passed: bool,
    /// First failing case, with enough detail to reproduce it.
    pub failure: Option<String>,
    pub millis: u128,
}

/// Runs one suite with `cases` seeded instances starting at `seed`.
pub fn run_suite(suite: Suite, seed: u64, cases: usize) -> SuiteReport {
    let start = Instant::now();
    let outcome = match suite {
        Suite::Solver => solver_suite(seed, cases),
        Suite::Otp => otp_suite(seed, cases),
        Suite::Oracle => oracle_suite(seed, cases),
        Suite::Reduction => reduction_suite(),
    };
    let (cases, failure) = match outcome {
        Ok(n) => (n, None),
        Err((n, msg)) => (n, Some(msg)),
    };
    SuiteReport {
        suite,
        seed,
        cases,
        passed: failure.is_none(),
        failure,
        millis: start.elapsed().as_millis(),
    }
}

type Outcome = std::result::Result<usize, (usize, String)>;

fn fail(k: usize, msg: impl Into<String>) -> Outcome {
    Err((k, msg.into()))
}

fn solver_suite(seed: u64, cases: usize) -> Outcome {
    for k in 0..cases {
        let s = seed + k as u64;
        let n = 1 + (s % 8) as usize;
        let t = 1 + (s % 3) as usize;
        let inst = random_instance(n, t, DEFAULT_MAX_EFF, s);
        let want = brute_force_score(&inst).map_err(|e| (k, e.to_string()))?;
        for (label, opts) in [
            ("pruned", SolveOptions::default()),
            ("unpruned", SolveOptions::unpruned()),
        ] {
            let got = solve_instance(&inst, &opts).map_err(|e| (k, e.to_string()))?;
            if got != want {
                return fail(k, format!("seed {s} (n={n}, t={t}): {label} solver {got}, oracle {want}"));
            }
        }
    }
    Ok(cases)
}

fn otp_suite(seed: u64, cases: usize) -> Outcome {
    for k in 0..cases {
        let s = seed + k as u64;
        let n = 1 + (s % 10) as usize;
        let two = random_otp_instance(n, 2, DEFAULT_MAX_EFF, s);
        let want = brute_force_score(&two).map_err(|e| (k, e.to_string()))?;
        let linear = solve_two_task_otp(&two).map_err(|e| (k, e.to_string()))?;
        let xp = solve_otp_xp(&two).map_err(|e| (k, e.to_string()))?;
        if linear != want || xp != want {
            return fail(k, format!("seed {s} (n={n}, t=2): linear {linear}, xp {xp}, oracle {want}"));
        }
        let three = random_otp_instance(n.min(9), 3, DEFAULT_MAX_EFF, s);
        let want = brute_force_score(&three).map_err(|e| (k, e.to_string()))?;
        let xp = solve_otp_xp(&three).map_err(|e| (k, e.to_string()))?;
        if xp != want {
            return fail(k, format!("seed {s} (n={}, t=3): xp {xp}, oracle {want}", n.min(9)));
        }
    }
    Ok(cases)
}

fn oracle_suite(seed: u64, cases: usize) -> Outcome {
    for k in 0..cases {
        let s = seed + k as u64;
        let n = 1 + (s % 5) as usize;
        let t = 1 + (s % 2) as usize;
        let g = random_instance(n, t, DEFAULT_MAX_EFF, s);
        let sc = brute_force_score(&g).map_err(|e| (k, e.to_string()))?;
        if sc < BigInt::zero() || sc > score_upper_bound(&g) {
            return fail(k, format!("seed {s}: score {sc} outside [0, max efficiency]"));
        }
        let doubled = brute_force_score(&game_sum(&[g.clone(), g])).map_err(|e| (k, e.to_string()))?;
        if !doubled.is_zero() {
            return fail(k, format!("seed {s}: two copies score {doubled}, expected 0"));
        }
    }
    Ok(cases)
}

fn reduction_suite() -> Outcome {
    let corpus = bundled_corpus();
    for (k, f) in corpus.iter().enumerate() {
        let out = check_formula(f, None).map_err(|e| (k, e.to_string()))?;
        if !out.agrees {
            return fail(
                k,
                format!("{}: score {} vs threshold {}, winner {}", out.formula, out.score, out.threshold, out.winner),
            );
        }
        let gadget = build_draft_instance(f).map_err(|e| (k, e.to_string()))?;
        let report = verify_forced_order(&gadget, PairPolicy::Seeded(k as u64));
        if let Some(ply) = report.first_failure {
            return fail(k, format!("{}: forcing fails at ply {ply}", out.formula));
        }
    }
    Ok(corpus.len())
}
