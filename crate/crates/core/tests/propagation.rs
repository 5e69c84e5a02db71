//! Properties of the propagation fixpoint on random programs.

mod common;

use alog_lab::alog;
use alog_lab::asolver::{ASolver, AggregateEAtom, SolverState};
use alog_lab::gen::{random_program, Fragment, GenConfig};
use alog_lab::grounder::ground_alog;
use alog_lab::model::{GroundLiteral, GroundProgram, LiteralSet};
use alog_lab::Error;
use common::limits;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PROGRAMS: u64 = 400;

/// A random state deciding up to two atoms of the solver's universe.
fn random_state(solver: &ASolver, seed: u64) -> SolverState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = SolverState::default();
    let universe = solver.universe();
    if universe.is_empty() {
        return st;
    }
    for _ in 0..rng.gen_range(0..=2) {
        let a = universe[rng.gen_range(0..universe.len())].clone();
        if rng.gen_bool(0.5) {
            st.interpretation.pos.insert(a);
        } else {
            st.interpretation.neg.insert(a);
        }
    }
    st
}

fn agrees(p: &GroundProgram, a: &LiteralSet, st: &SolverState) -> bool {
    let holds = |e: &AggregateEAtom| alog::truth_value(&e.atom, &p.constants, a).is_true() != e.naf;
    st.interpretation
        .pos
        .iter()
        .all(|x| a.contains(&GroundLiteral::pos(x.clone())))
        && st
            .interpretation
            .neg
            .iter()
            .all(|x| !a.contains(&GroundLiteral::pos(x.clone())))
        && st.ta.iter().all(holds)
        && !st.fa.iter().any(holds)
}

/// Calls `f` on every small solver-fragment program with its answer sets.
fn for_programs(mut f: impl FnMut(u64, &GroundProgram, &[LiteralSet])) {
    let cfg = GenConfig::new(Fragment::Solver);
    for seed in 0..PROGRAMS {
        let g = ground_alog(&random_program(&cfg, seed), None).unwrap();
        match alog::enumerate_answer_sets(&g, &limits()) {
            Ok(all) => f(seed, &g, &all),
            Err(Error::CapExceeded { .. }) => continue,
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
}

#[test]
fn cons_only_adds_information() {
    for_programs(|seed, g, _| {
        let mut solver = ASolver::new(g, limits()).unwrap();
        let st = random_state(&solver, seed);
        if let Ok(out) = solver.cons(&st).unwrap() {
            assert!(st.interpretation.pos.is_subset(&out.interpretation.pos), "seed {seed}");
            assert!(st.interpretation.neg.is_subset(&out.interpretation.neg), "seed {seed}");
            assert!(st.ta.is_subset(&out.ta) && st.fa.is_subset(&out.fa), "seed {seed}");
            assert!(out.interpretation.is_consistent(), "seed {seed}");
        }
    });
}

#[test]
fn cons_keeps_every_compatible_answer_set() {
    for_programs(|seed, g, all| {
        let mut solver = ASolver::new(g, limits()).unwrap();
        let st = random_state(&solver, seed);
        let compatible: Vec<&LiteralSet> = all.iter().filter(|a| agrees(g, a, &st)).collect();
        match solver.cons(&st).unwrap() {
            Ok(out) => {
                for a in compatible {
                    assert!(agrees(g, a, &out), "seed {seed}: {{{a}}} lost by {out}");
                }
            }
            Err(c) => assert!(
                compatible.is_empty(),
                "seed {seed}: {c:?} although {{{}}} agrees",
                compatible[0]
            ),
        }
    });
}

#[test]
fn cons_outcome_does_not_depend_on_rule_order() {
    for_programs(|seed, g, _| {
        let base = ASolver::new(g, limits()).unwrap();
        let st = random_state(&base, seed);
        let mut reference = ASolver::new(g, limits()).unwrap();
        let expected = reference.cons(&st).unwrap();
        for shuffle in 0..3 {
            let mut s = ASolver::new(g, limits()).unwrap().with_seed(shuffle);
            let got = s.cons(&st).unwrap();
            assert_eq!(got.is_ok(), expected.is_ok(), "seed {seed}, shuffle {shuffle}");
            if let (Ok(a), Ok(b)) = (&got, &expected) {
                assert_eq!(a, b, "seed {seed}, shuffle {shuffle}");
            }
        }
    });
}

#[test]
fn solve_result_is_an_answer_set() {
    for_programs(|seed, g, all| {
        let found = alog_lab::asolver::solve(g, &limits()).unwrap();
        assert_eq!(found.is_some(), !all.is_empty(), "seed {seed}");
        if let Some(a) = found {
            assert!(alog::is_answer_set(g, &a, &limits()).unwrap(), "seed {seed}: {{{a}}}");
        }
    });
}
