use anyhow::Result;
use num_bigint::BigInt;

use draftgame::otp::{is_otp_instance, solve_otp_xp_detailed, solve_two_task_otp_detailed, DEFAULT_MAX_XP_TASKS};
use draftgame::solver::SearchStats;
use draftgame::{solve, Instance, Player, Position, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    TwoTaskLinear,
    OtpXp,
    Search,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TwoTaskLinear => "two_task_linear",
            Method::OtpXp => "otp_xp",
            Method::Search => "search",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Method::TwoTaskLinear => "two-task one-trick-pony recurrence (linear)",
            Method::OtpXp => "one-trick-pony reduced-state search",
            Method::Search => "alpha-beta search",
        }
    }
}

pub struct Outcome {
    pub method: Method,
    pub score: BigInt,
    pub best: Option<usize>,
    pub pv: Option<Vec<usize>>,
    pub stats: Option<SearchStats>,
    pub visited_states: Option<u64>,
}

/// One of the dedicated algorithms on a starting position, if it applies.
pub fn solve_otp(inst: &Instance, method: Method) -> Option<Outcome> {
    is_otp_instance(inst)?;
    let sol = match method {
        Method::TwoTaskLinear if inst.tasks() == 2 => solve_two_task_otp_detailed(inst).ok()?,
        Method::OtpXp => solve_otp_xp_detailed(inst, DEFAULT_MAX_XP_TASKS).ok()?,
        _ => return None,
    };
    Some(Outcome {
        method,
        score: sol.value,
        best: sol.best_move,
        pv: None,
        stats: None,
        visited_states: (method == Method::OtpXp).then_some(sol.visited_states),
    })
}

/// Cheapest exact method: the two-task linear recurrence, then the
/// reduced-state search, then the general solver. The dedicated algorithms
/// only cover fresh drafts with Alice opening.
pub fn solve_dispatch(pos: &Position, opts: &SolveOptions, dispatch: bool) -> Result<Outcome> {
    let fresh = pos.picked_a().is_empty() && pos.picked_b().is_empty() && pos.first() == Player::Alice;
    if dispatch && fresh {
        let inst = pos.instance();
        let hit = solve_otp(inst, Method::TwoTaskLinear).or_else(|| solve_otp(inst, Method::OtpXp));
        if let Some(mut out) = hit {
            if opts.want_pv {
                out.pv = Some(match out.best {
                    Some(first) => {
                        let child = pos.play(first)?;
                        let mut line = vec![first];
                        line.extend(solve(&child, opts)?.pv.unwrap_or_default());
                        line
                    }
                    None => Vec::new(),
                });
            }
            return Ok(out);
        }
    }
    let r = solve(pos, opts)?;
    Ok(Outcome {
        method: Method::Search,
        score: r.score,
        best: r.best_move,
        pv: r.pv,
        stats: Some(r.stats),
        visited_states: None,
    })
}
