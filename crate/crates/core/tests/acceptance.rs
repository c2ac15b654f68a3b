//! Acceptance run: one PASS/FAIL line per headline property. Runs as a plain
//! binary so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use draftgame::oracle::{
    brute_force_position, brute_force_score, game_sum, pairing_bob_move, random_instance, random_otp_instance,
    PairingTable,
};
use draftgame::otp::{is_otp_instance, solve_otp_xp_detailed, solve_two_task_otp, DEFAULT_MAX_XP_TASKS};
use draftgame::reduction::{
    build_draft_instance, bundled_corpus, check_formula, verify_forced_order, PairPolicy,
};
use draftgame::solver::solve_instance;
use draftgame::{
    evaluate_moves, final_score, provisional_values, score_upper_bound, solve, Agent, Instance, Player, Position,
    Pruning, SolveOptions,
};

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn ex1() -> Instance {
    Instance::from_rows(2, &[&[4, 7], &[5, 5], &[0, 4]]).unwrap()
}

fn ex2() -> Instance {
    Instance::from_rows(
        3,
        &[&[5, 0, 0], &[0, 5, 0], &[0, 0, 5], &[4, 4, 4], &[0, 3, 3], &[3, 0, 0]],
    )
    .unwrap()
}

fn eff(p: &Position, k: usize) -> String {
    p.instance().agent(k).to_string()
}

/// Moves attaining the position's value.
fn optimal_moves(p: &Position) -> (BigInt, Vec<usize>) {
    let r = solve(p, &SolveOptions::default()).unwrap();
    let evals = evaluate_moves(p, &SolveOptions::default()).unwrap();
    let best = evals
        .iter()
        .filter(|e| e.value.exact() == Some(&r.score))
        .map(|e| e.agent)
        .collect();
    (r.score, best)
}

fn small_example(rep: &mut Report) {
    let start = Instant::now();
    let mut p = Position::start(ex1());
    let (score, _) = optimal_moves(&p);
    let mut line = Vec::new();
    let mut unique = true;
    while !p.is_terminal() {
        let (v, best) = optimal_moves(&p);
        unique &= best.len() == 1 && v == score;
        line.push(eff(&p, best[0]));
        p = p.play(best[0]).unwrap();
    }
    let (alice, _) = provisional_values(&p);
    let elapsed = start.elapsed();
    let ok = score == BigInt::from(3)
        && unique
        && line == ["(4,7)", "(5,5)", "(0,4)"]
        && alice == BigInt::from(8)
        && final_score(&p).unwrap() == score
        && elapsed < Duration::from_secs(1);
    rep.line(
        "two-task example",
        ok,
        format!(
            "score {score}, unique line {} (unique at every ply: {unique}), Alice's assignment {alice}, {elapsed:.2?} (limit 1s)",
            line.join(" -> ")
        ),
    );
}

fn three_task_example(rep: &mut Report) {
    let start = Instant::now();
    let p = Position::start(ex2());
    let (score, best) = optimal_moves(&p);
    let elapsed = start.elapsed();
    let oracle = brute_force_score(&ex2()).unwrap();
    let best_ids: Vec<String> = best.iter().map(|&k| eff(&p, k)).collect();
    let ok = score == BigInt::from(2)
        && oracle == score
        && best_ids == ["(4,4,4)"]
        && elapsed < Duration::from_secs(10);
    rep.line(
        "three-task example",
        ok,
        format!(
            "score {score} (oracle {oracle}), optimal first picks [{}], {elapsed:.2?} (limit 10s)",
            best_ids.join(", ")
        ),
    );
}

/// Instances shared by the equivalence, bounds and pruning checks.
struct Corpus {
    general: Vec<Instance>,
    two_task_otp: Vec<Instance>,
}

fn corpus() -> Corpus {
    let general = (0..200u64)
        .map(|s| random_instance(1 + (s % 8) as usize, 1 + (s % 3) as usize, 10, 1000 + s))
        .collect();
    let two_task_otp = (0..500u64)
        .map(|s| random_otp_instance(1 + (s % 10) as usize, 2, 20, 5000 + s))
        .collect();
    Corpus { general, two_task_otp }
}

fn oracle_equivalence(rep: &mut Report, c: &Corpus) {
    let start = Instant::now();
    let mut bad_general = Vec::new();
    for (k, g) in c.general.iter().enumerate() {
        if solve_instance(g, &SolveOptions::default()).unwrap() != brute_force_score(g).unwrap() {
            bad_general.push(k);
        }
    }
    let mut bad_linear = Vec::new();
    let mut bad_xp = Vec::new();
    for (k, g) in c.two_task_otp.iter().enumerate() {
        let want = brute_force_score(g).unwrap();
        if solve_two_task_otp(g).unwrap() != want {
            bad_linear.push(k);
        }
        if solve_otp_xp_detailed(g, DEFAULT_MAX_XP_TASKS).unwrap().value != want {
            bad_xp.push(k);
        }
    }
    let elapsed = start.elapsed();
    let ok = bad_general.is_empty() && bad_linear.is_empty() && bad_xp.is_empty() && elapsed < Duration::from_secs(300);
    rep.line(
        "oracle equivalence",
        ok,
        format!(
            "{} general (n<=8, t<=3): {} mismatches; {} two-task one-trick (n<=10): linear {} / reduced-state {} mismatches; {elapsed:.2?} (limit 300s)",
            c.general.len(),
            bad_general.len(),
            c.two_task_otp.len(),
            bad_linear.len(),
            bad_xp.len()
        ),
    );
}

fn bounds(rep: &mut Report, c: &Corpus) {
    let mut checked = 0;
    let mut violations = 0;
    let extra = [ex1(), ex2()];
    for g in c.general.iter().chain(&c.two_task_otp).chain(&extra) {
        let v = solve_instance(g, &SolveOptions::default()).unwrap();
        checked += 1;
        if v < BigInt::zero() || v > score_upper_bound(g) {
            violations += 1;
        }
    }
    for s in 0..50u64 {
        let g = mean_zero_instance(s);
        let v = brute_force_score(&g).unwrap();
        checked += 1;
        if v < BigInt::zero() || v > score_upper_bound(&g) {
            violations += 1;
        }
    }
    rep.line(
        "score bounds",
        violations == 0,
        format!("0 <= score <= max efficiency on {checked} instances, {violations} violations"),
    );
}

fn mean_zero_instance(seed: u64) -> Instance {
    random_instance(1 + (seed % 5) as usize, 1 + (seed % 2) as usize, 10, 9000 + seed)
}

fn mean_zero(rep: &mut Report) {
    let mut nonzero_sums = 0;
    let mut playouts = 0;
    let mut nonzero_playouts = 0;
    for s in 0..50u64 {
        let g = mean_zero_instance(s);
        if !brute_force_score(&game_sum(&[g.clone(), g.clone()])).unwrap().is_zero() {
            nonzero_sums += 1;
        }
        let (sum, table) = PairingTable::for_copies(&g, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        for _ in 0..4 {
            let mut p = Position::start(sum.clone());
            while !p.is_terminal() {
                let free = p.free();
                let pick = free[rng.random_range(0..free.len())];
                p = p.play(pick).unwrap();
                let reply = pairing_bob_move(&p, &table, pick).unwrap();
                p = p.play(reply).unwrap();
            }
            playouts += 1;
            if !final_score(&p).unwrap().is_zero() {
                nonzero_playouts += 1;
            }
        }
        // Alice's optimal line against the pairing strategy too.
        let mut p = Position::start(sum.clone());
        while !p.is_terminal() {
            let pick = solve(&p, &SolveOptions::default()).unwrap().best_move.unwrap();
            p = p.play(pick).unwrap();
            let reply = pairing_bob_move(&p, &table, pick).unwrap();
            p = p.play(reply).unwrap();
        }
        playouts += 1;
        if !final_score(&p).unwrap().is_zero() {
            nonzero_playouts += 1;
        }
    }
    rep.line(
        "mean zero",
        nonzero_sums == 0 && nonzero_playouts == 0,
        format!(
            "50 doubled games: {nonzero_sums} with nonzero value; {playouts} pairing playouts: {nonzero_playouts} ending away from 0"
        ),
    );
}

fn pruning(rep: &mut Report, c: &Corpus) {
    let single_off = [
        Pruning {
            dominating_agent: false,
            ..Pruning::ALL
        },
        Pruning {
            dominating_pair: false,
            ..Pruning::ALL
        },
        Pruning {
            two_task: false,
            ..Pruning::ALL
        },
        Pruning {
            pareto: false,
            ..Pruning::ALL
        },
    ];
    let extra = [ex1(), ex2()];
    let mut changed = 0;
    let mut runs = 0;
    for g in c.general.iter().chain(c.two_task_otp.iter().take(100)).chain(&extra) {
        let base = solve_instance(g, &SolveOptions::default()).unwrap();
        for p in single_off {
            let o = SolveOptions {
                pruning: p,
                ..SolveOptions::default()
            };
            runs += 1;
            if solve_instance(g, &o).unwrap() != base {
                changed += 1;
            }
        }
    }
    let off = SolveOptions {
        pruning: Pruning::NONE,
        alpha_beta: false,
        ..SolveOptions::default()
    };
    let unpruned = solve(&Position::start(ex2()), &off).unwrap().stats.nodes;
    let pruned = solve(&Position::start(ex2()), &SolveOptions::default()).unwrap().stats.nodes;
    let ratio = unpruned as f64 / pruned as f64;
    rep.line(
        "pruning soundness",
        changed == 0 && ratio >= 5.0,
        format!(
            "{runs} single-rule-disabled solves, {changed} changed values; three-task example nodes {unpruned} unpruned vs {pruned} pruned = {ratio:.1}x (target 5x)"
        ),
    );
}

fn reduction(rep: &mut Report) {
    let start = Instant::now();
    let corpus = bundled_corpus();
    let mut disagree = Vec::new();
    let (mut sat, mut unsat) = (0, 0);
    for f in &corpus {
        let out = check_formula(f, Some(2_000_000)).unwrap();
        if out.score >= out.threshold {
            sat += 1;
        } else {
            unsat += 1;
        }
        if !out.agrees {
            disagree.push(out.formula);
        }
    }
    let mut forcing_failures = Vec::new();
    let mut plies = 0;
    for (k, f) in corpus.iter().enumerate() {
        let g = build_draft_instance(f).unwrap();
        for policy in [PairPolicy::First, PairPolicy::Seeded(k as u64)] {
            let r = verify_forced_order(&g, policy);
            plies += r.plies.len();
            if !(r.setup_forced && r.pairs_detected) {
                forcing_failures.push(format!("{f} at {}", r.first_failure.unwrap_or_default()));
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = disagree.is_empty() && forcing_failures.is_empty() && elapsed < Duration::from_secs(600);
    rep.line(
        "reduction soundness",
        ok,
        format!(
            "{} formulas ({sat} reach the threshold, {unsat} do not), {} disagree with the QBF referee; {plies} replayed plies, {} forcing failures; {elapsed:.2?} (limit 600s){}",
            corpus.len(),
            disagree.len(),
            forcing_failures.len(),
            disagree
                .first()
                .or(forcing_failures.first())
                .map(|s| format!("; first: {s}"))
                .unwrap_or_default()
        ),
    );
}

/// `n` one-task agents spread evenly over `t` tasks.
fn spread_otp(n: usize, t: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agents = (0..n)
        .map(|k| {
            let mut e = vec![0u64; t];
            e[k % t] = rng.random_range(1..=1000);
            Agent::from_u64(format!("X{}", k + 1), &e)
        })
        .collect();
    Instance::new(t, agents).unwrap()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn xp_growth(rep: &mut Report, c: &Corpus) {
    let mut over_bound = 0;
    let mut instances = 0;
    let mut check = |g: &Instance| -> u64 {
        let sol = solve_otp_xp_detailed(g, DEFAULT_MAX_XP_TASKS).unwrap();
        let bound = is_otp_instance(g).unwrap().state_bound();
        instances += 1;
        if num_bigint::BigUint::from(sol.visited_states) > bound {
            over_bound += 1;
        }
        sol.visited_states
    };
    for g in &c.two_task_otp {
        check(g);
    }
    for s in 0..100u64 {
        check(&random_otp_instance(1 + (s % 12) as usize, 3, 10, 7000 + s));
    }
    let sizes = [20usize, 40, 80, 160];
    let mut details = Vec::new();
    let mut slopes_ok = true;
    for t in [2usize, 3] {
        let mut times = Vec::new();
        let mut states = Vec::new();
        for &n in &sizes {
            let g = spread_otp(n, t, n as u64);
            let mut best = f64::INFINITY;
            let mut visited = 0;
            for _ in 0..3 {
                let start = Instant::now();
                visited = check(&g);
                best = best.min(start.elapsed().as_secs_f64());
            }
            times.push(best);
            states.push(visited as f64);
        }
        let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
        let time_slope = slope(&xs, &times.iter().map(|x| x.ln()).collect::<Vec<_>>());
        let state_slope = slope(&xs, &states.iter().map(|x| x.ln()).collect::<Vec<_>>());
        // Reachable states lose a dimension against the product bound, so the
        // measured growth sits near n^(t-1). O(n^t) is an upper bound: only
        // growth steeper than t + 0.5 fails.
        slopes_ok &= time_slope <= t as f64 + 0.5 && state_slope <= t as f64 + 0.5;
        details.push(format!(
            "t={t}: runtime slope {time_slope:.2}, state slope {state_slope:.2} (n=160: {:.0} states, {:.3}s)",
            states[3], times[3]
        ));
    }
    rep.line(
        "reduced-state growth",
        over_bound == 0 && slopes_ok,
        format!(
            "{instances} solves within 2*prod(4 n_j) states: {} over; {} (limit slope t + 0.5)",
            over_bound,
            details.join("; ")
        ),
    );
}

fn main() -> ExitCode {
    let mut rep = Report { failed: 0 };
    let c = corpus();
    small_example(&mut rep);
    three_task_example(&mut rep);
    oracle_equivalence(&mut rep, &c);
    bounds(&mut rep, &c);
    mean_zero(&mut rep);
    pruning(&mut rep, &c);
    reduction(&mut rep);
    xp_growth(&mut rep, &c);
    // A Bob-first start has the mirrored value bound; exercised so the
    // harness notices a sign slip.
    let bob = Position::start_with(ex1(), Player::Bob);
    let v = solve(&bob, &SolveOptions::default()).unwrap().score;
    assert_eq!(v, brute_force_position(&bob).unwrap());
    if rep.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} acceptance checks failed", rep.failed);
        ExitCode::FAILURE
    }
}
