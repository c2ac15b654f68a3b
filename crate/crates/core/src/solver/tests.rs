use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use super::*;
use crate::oracle::{brute_force_position, brute_force_score, random_instance};
use crate::score::score_upper_bound;

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

fn opts(pruning: Pruning, alpha_beta: bool) -> SolveOptions {
    SolveOptions {
        pruning,
        alpha_beta,
        ..SolveOptions::default()
    }
}

fn every_option() -> Vec<SolveOptions> {
    let mut out = Vec::new();
    for mask in 0..16u8 {
        let p = Pruning {
            dominating_agent: mask & 1 != 0,
            dominating_pair: mask & 2 != 0,
            two_task: mask & 4 != 0,
            pareto: mask & 8 != 0,
        };
        out.push(opts(p, true));
        out.push(opts(p, false));
    }
    out
}

#[test]
fn first_worked_example() {
    let o = SolveOptions {
        want_pv: true,
        ..SolveOptions::default()
    };
    let r = solve(&Position::start(ex1()), &o).unwrap();
    assert_eq!(r.score, BigInt::from(3));
    assert_eq!(r.best_move, Some(0));
    assert_eq!(r.pv, Some(vec![0, 1, 2]));
}

#[test]
fn second_worked_example() {
    for o in every_option() {
        let r = solve(&Position::start(ex2()), &o).unwrap();
        assert_eq!(r.score, BigInt::from(2), "{o:?}");
        assert_eq!(r.best_move, Some(3), "{o:?}");
    }
    let evals = evaluate_moves(&Position::start(ex2()), &SolveOptions::default()).unwrap();
    let best: Vec<usize> = evals
        .iter()
        .filter(|e| e.value.exact() == Some(&BigInt::from(2)))
        .map(|e| e.agent)
        .collect();
    assert_eq!(best, vec![3]);
}

#[test]
fn pruning_cuts_nodes_on_second_example() {
    let base = solve(&Position::start(ex2()), &opts(Pruning::NONE, false)).unwrap();
    let pruned = solve(&Position::start(ex2()), &SolveOptions::default()).unwrap();
    assert_eq!(base.score, pruned.score);
    assert!(
        base.stats.nodes >= 5 * pruned.stats.nodes,
        "{} vs {}",
        base.stats.nodes,
        pruned.stats.nodes
    );
}

#[test]
fn finished_and_single_positions() {
    let p = Position::from_ids(ex1(), &["X1", "X3"], &["X2"]).unwrap();
    let r = solve(&p, &SolveOptions { want_pv: true, ..Default::default() }).unwrap();
    assert_eq!(r.score, BigInt::from(3));
    assert_eq!(r.best_move, None);
    assert_eq!(r.pv, Some(vec![]));
    let empty = Instance::new(2, vec![]).unwrap();
    assert_eq!(solve_instance(&empty, &SolveOptions::default()).unwrap(), BigInt::from(0));
    let single = Instance::from_rows(3, &[&[2, 9, 4]]).unwrap();
    assert_eq!(solve_instance(&single, &SolveOptions::default()).unwrap(), BigInt::from(9));
}

#[test]
fn bob_to_move_and_bob_first() {
    let p = Position::start(ex1()).play(0).unwrap();
    let r = solve(&p, &SolveOptions::default()).unwrap();
    assert_eq!(r.score, BigInt::from(3));
    assert_eq!(r.best_move, Some(1));
    let bob_first = Position::start_with(ex1(), Player::Bob);
    assert_eq!(
        solve(&bob_first, &SolveOptions::default()).unwrap().score,
        brute_force_position(&bob_first).unwrap()
    );
}

#[test]
fn pareto_keeps_maximal_representatives() {
    let agents = Instance::from_rows(2, &[&[3, 0], &[5, 0], &[5, 0], &[0, 2], &[1, 1]]).unwrap();
    assert_eq!(pareto_candidates(agents.agents()), vec![1, 3, 4]);
    let p = Position::start(Instance::from_rows(2, &[&[3, 0], &[5, 0]]).unwrap());
    assert_eq!(dominated_agents(&p), vec![0]);
}

#[test]
fn dominating_agent_detection() {
    let inst = Instance::from_rows(2, &[&[100, 0], &[1, 2], &[2, 1]]).unwrap();
    let p = Position::start(inst);
    assert_eq!(find_dominating_agent(&p), Some(0));
    assert_eq!(dominating_agents(&p), vec![0]);
    assert_eq!(find_dominating_agent(&Position::start(ex1())), None);
    // Edge counts against the weaker holder: after Alice holds 100 in task 1,
    // a second 100 there no longer dominates for her.
    let inst = Instance::from_rows(2, &[&[100, 0], &[100, 0], &[1, 1]]).unwrap();
    let p = Position::start(inst);
    assert_eq!(find_dominating_agent(&p), None);
    let after = p.play(0).unwrap().play(2).unwrap();
    assert_eq!(dominating_agents(&after), vec![1]);
}

#[test]
fn dominating_pair_detection() {
    let inst = Instance::from_rows(2, &[&[100, 0], &[0, 100], &[1, 1], &[2, 0]]).unwrap();
    let p = Position::start(inst);
    assert_eq!(find_dominating_agent(&p), None);
    assert!(is_dominating_pair(&p, 0, 1));
    assert!(!is_dominating_pair(&p, 0, 2));
    let (x, y) = find_dominating_pair(&p).unwrap();
    assert_eq!((x.min(y), x.max(y)), (0, 1));
    assert_eq!(find_dominating_pair(&Position::start(ex2())), None);
}

#[test]
fn two_task_candidate_sets() {
    let p = Position::start(ex1());
    let mut c = two_task_candidates(&p).unwrap();
    c.sort();
    assert_eq!(c, vec![0, 1]);
    // Ties on a task's maximum prefer the better value on the other task.
    let inst = Instance::from_rows(2, &[&[5, 1], &[5, 3], &[0, 4]]).unwrap();
    let mut c = two_task_candidates(&Position::start(inst)).unwrap();
    c.sort();
    assert_eq!(c, vec![1, 2]);
    assert!(two_task_candidates(&Position::start(ex2())).is_err());
}

#[test]
fn budget_exhaustion_reports_bounds() {
    let inst = random_instance(10, 3, 10, 5);
    let exact = solve_instance(&inst, &SolveOptions::default()).unwrap();
    let o = SolveOptions {
        node_budget: Some(3),
        pruning: Pruning::NONE,
        ..SolveOptions::default()
    };
    match solve(&Position::start(inst.clone()), &o) {
        Err(DraftError::BudgetExceeded { budget, lower, upper }) => {
            assert_eq!(budget, 3);
            assert!(lower <= exact && exact <= upper);
        }
        other => panic!("expected budget error, got {other:?}"),
    }
    let evals = evaluate_moves(&Position::start(inst), &o).unwrap();
    assert!(evals.iter().any(|e| matches!(e.value, MoveValue::Bounds { .. })));
}

#[test]
fn too_many_agents_rejected() {
    let rows: Vec<Vec<u64>> = (0..129).map(|k| vec![k as u64]).collect();
    let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
    let inst = Instance::from_rows(1, &refs).unwrap();
    assert!(matches!(
        solve(&Position::start(inst), &SolveOptions::default()),
        Err(DraftError::TooLarge(_))
    ));
}

#[test]
fn wide_values_match_narrow() {
    // Same instance, scaled far beyond 64 and 128 bits.
    let base = random_instance(7, 3, 10, 42);
    let want = solve_instance(&base, &SolveOptions::default()).unwrap();
    for bits in [80u32, 200] {
        let f = BigUint::from(1u32) << bits;
        let got = solve_instance(&base.scaled(&f), &SolveOptions::default()).unwrap();
        assert_eq!(got, &want * BigInt::from(f));
    }
}

#[test]
fn matches_oracle_on_seeded_instances() {
    for seed in 0..200u64 {
        let n = 1 + (seed % 8) as usize;
        let t = 1 + (seed % 3) as usize;
        let inst = random_instance(n, t, 10, seed);
        let want = brute_force_score(&inst).unwrap();
        let got = solve(&Position::start(inst.clone()), &SolveOptions::default()).unwrap();
        assert_eq!(got.score, want, "seed {seed}");
        assert!(got.score >= BigInt::from(0) && got.score <= score_upper_bound(&inst));
        if let Some(mv) = got.best_move {
            let child = Position::start(inst).play(mv).unwrap();
            assert_eq!(brute_force_position(&child).unwrap(), want, "seed {seed}");
        }
    }
}

fn arb_instance(max_n: usize, max_t: usize) -> impl Strategy<Value = Instance> {
    (1..=max_t, 0..=max_n).prop_flat_map(|(t, n)| {
        proptest::collection::vec(proptest::collection::vec(0u64..=12, t), n).prop_map(move |rows| {
            let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
            Instance::from_rows(t, &refs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn each_rule_alone_preserves_value(inst in arb_instance(7, 3)) {
        let want = brute_force_score(&inst).unwrap();
        for o in every_option() {
            prop_assert_eq!(solve_instance(&inst, &o).unwrap(), want.clone());
        }
    }

    #[test]
    fn midgame_positions_match_oracle(inst in arb_instance(8, 3), picks in proptest::collection::vec(0usize..8, 0..5)) {
        let mut p = Position::start(inst);
        for k in picks {
            if p.is_free(k % p.instance().len().max(1)) && !p.is_terminal() {
                p = p.play(k % p.instance().len()).unwrap();
            }
        }
        let want = brute_force_position(&p).unwrap();
        let r = solve(&p, &SolveOptions { want_pv: true, ..Default::default() }).unwrap();
        prop_assert_eq!(&r.score, &want);
        let mut q = p.clone();
        for mv in r.pv.unwrap() {
            q = q.play(mv).unwrap();
        }
        prop_assert_eq!(crate::score::final_score(&q).unwrap(), want);
    }

    #[test]
    fn move_values_agree_with_solve(inst in arb_instance(7, 3)) {
        prop_assume!(!inst.is_empty());
        let p = Position::start(inst);
        let r = solve(&p, &SolveOptions::default()).unwrap();
        let evals = evaluate_moves(&p, &SolveOptions::default()).unwrap();
        let best = evals.iter().map(|e| e.value.exact().unwrap().clone()).max().unwrap();
        prop_assert_eq!(&best, &r.score);
        let chosen = evals.iter().find(|e| e.agent == r.best_move.unwrap()).unwrap();
        prop_assert_eq!(chosen.value.exact().unwrap(), &r.score);
        if let Some(d) = find_dominating_agent(&p) {
            let v = evals.iter().find(|e| e.agent == d).unwrap();
            prop_assert_eq!(v.value.exact().unwrap(), &r.score);
        }
        if let Some((x, y)) = find_dominating_pair(&p) {
            let vx = evals.iter().find(|e| e.agent == x).unwrap();
            let vy = evals.iter().find(|e| e.agent == y).unwrap();
            prop_assert!(vx.value.exact() == Some(&r.score) || vy.value.exact() == Some(&r.score));
        }
    }

    #[test]
    fn scaling_scales_value(inst in arb_instance(6, 3), c in 1u64..50) {
        let v = solve_instance(&inst, &SolveOptions::default()).unwrap();
        let scaled = solve_instance(&inst.scaled(&BigUint::from(c)), &SolveOptions::default()).unwrap();
        prop_assert_eq!(scaled, v * BigInt::from(c));
    }
}

#[test]
fn engine_move_under_budget() {
    let p = Position::start(ex1());
    let (mv, v) = engine_move(&p, &SolveOptions::default()).unwrap();
    assert_eq!((mv, v.exact().cloned()), (0, Some(BigInt::from(3))));
    let inst = random_instance(10, 3, 10, 5);
    let o = SolveOptions {
        node_budget: Some(3),
        pruning: Pruning::NONE,
        ..SolveOptions::default()
    };
    let (mv, v) = engine_move(&Position::start(inst.clone()), &o).unwrap();
    assert!(mv < inst.len());
    assert!(matches!(v, MoveValue::Bounds { .. }));
    let done = Position::from_ids(ex1(), &["X1", "X3"], &["X2"]).unwrap();
    assert!(engine_move(&done, &SolveOptions::default()).is_err());
}
