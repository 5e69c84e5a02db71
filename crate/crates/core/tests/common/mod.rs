//! Shared fixtures and randomized checks for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use alog_lab::analysis;
use alog_lab::asolver::{ASolver, SolverState};
use alog_lab::gen::{random_program, Fragment, GenConfig, Layering};
use alog_lab::grounder::{ground_alog, ground_flog};
use alog_lab::model::*;
use alog_lab::parser::{parse_ground_literals, parse_program};
use alog_lab::{alog, flog, slog, Error, Limits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Instances each randomized suite must check.
pub const INSTANCES: usize = 500;
/// Seeds tried before a suite gives up on reaching [`INSTANCES`].
pub const SEED_BUDGET: u64 = 20_000;

pub fn limits() -> Limits {
    Limits {
        max_candidates: 1 << 14,
        ..Limits::default()
    }
}

pub fn ground(src: &str) -> GroundProgram {
    ground_alog(&parse_program(src).unwrap(), None).unwrap()
}

pub fn set(src: &str) -> LiteralSet {
    parse_ground_literals(src).unwrap()
}

pub fn sets(srcs: &[&str]) -> Vec<LiteralSet> {
    let mut v: Vec<LiteralSet> = srcs.iter().map(|s| set(s)).collect();
    v.sort();
    v
}

pub fn alog_sets(src: &str) -> Vec<LiteralSet> {
    alog::enumerate_answer_sets(&ground(src), &Limits::default()).unwrap()
}

pub fn flog_sets(src: &str) -> Vec<LiteralSet> {
    let g = ground_flog(&parse_program(src).unwrap(), None).unwrap();
    flog::enumerate_answer_sets_flog(&g, &Limits::default()).unwrap()
}

pub fn slog_sets(src: &str) -> Vec<LiteralSet> {
    let g = slog::SlogProgram::from_ground(&ground(src)).unwrap();
    slog::enumerate_answer_sets_slog(&g, &Limits::default()).unwrap()
}

/// Outcome of a randomized suite.
#[derive(Debug, Default)]
pub struct Tally {
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<String>,
}

impl Tally {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.checked >= INSTANCES
    }

    pub fn summary(&self) -> String {
        format!(
            "{} checked, {} skipped over caps, {} violations",
            self.checked,
            self.skipped,
            self.violations.len()
        )
    }
}

/// Runs `check` on successive seeds until [`INSTANCES`] programs have been
/// checked. `check` returns `Ok(None)` for a seed that does not qualify,
/// `Ok(Some(()))` for a pass and `Err` for a violation; cap errors count as
/// skips.
pub fn campaign(mut check: impl FnMut(u64) -> Result<Option<()>, Failure>) -> Tally {
    let mut t = Tally::default();
    for seed in 0..SEED_BUDGET {
        if t.checked >= INSTANCES {
            break;
        }
        match check(seed) {
            Ok(Some(())) => t.checked += 1,
            Ok(None) => {}
            Err(Failure::Cap) => t.skipped += 1,
            Err(Failure::Violation(v)) => {
                t.checked += 1;
                t.violations.push(format!("seed {seed}: {v}"));
            }
        }
    }
    t
}

pub enum Failure {
    Cap,
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap,
            e => Failure::Violation(format!("unexpected error: {e}")),
        }
    }
}

fn violation<T>(msg: String) -> Result<T, Failure> {
    Err(Failure::Violation(msg))
}

fn show(sets: &[LiteralSet]) -> String {
    let v: Vec<String> = sets.iter().map(|s| format!("{{{s}}}")).collect();
    v.join(" ")
}

// Independent evaluation of rule satisfaction, written directly against the
// definitions of extent and aggregate value.

fn value(func: AggregateFunction, tuples: &BTreeSet<Vec<Constant>>) -> Option<i64> {
    let ints = || -> Option<Vec<i64>> {
        tuples
            .iter()
            .map(|t| match t.as_slice() {
                [Constant::Int(i)] => Some(*i),
                _ => None,
            })
            .collect()
    };
    match func {
        AggregateFunction::Count => Some(tuples.len() as i64),
        AggregateFunction::Sum => ints()?.into_iter().try_fold(0i64, |a, b| a.checked_add(b)),
        AggregateFunction::Min => ints()?.into_iter().min(),
        AggregateFunction::Max => ints()?.into_iter().max(),
    }
}

fn extent(s: &SetName, consts: &BTreeSet<Constant>, a: &LiteralSet) -> BTreeSet<Vec<Constant>> {
    s.instances(consts)
        .into_iter()
        .filter(|i| i.literals.iter().all(|l| a.contains(l)))
        .map(|i| i.tuple)
        .collect()
}

/// Some(true/false), or None when undefined.
fn aggregate_truth(agg: &AggregateLiteral<i64>, consts: &BTreeSet<Constant>, a: &LiteralSet) -> Option<bool> {
    let v = value(agg.atom.func, &extent(&agg.atom.set, consts, a))?;
    let holds = agg.atom.rel.holds(&v, &agg.atom.guard);
    Some(holds != agg.negated)
}

pub fn body_true(p: &GroundProgram, r: &GroundRule, a: &LiteralSet) -> bool {
    r.body.iter().all(|e| {
        let t = match &e.atom {
            GroundBodyAtom::Regular(l) => Some(a.contains(l)),
            GroundBodyAtom::Aggregate(g) => aggregate_truth(g, &p.constants, a),
            GroundBodyAtom::Set(s) => {
                let l = extent(&s.lhs, &p.constants, a);
                let r = extent(&s.rhs, &p.constants, a);
                Some(s.rel.holds(&l, &r))
            }
        };
        if e.naf {
            t != Some(true)
        } else {
            t == Some(true)
        }
    })
}

fn subset_head_true(p: &GroundProgram, h: &SubsetIntroHead, a: &LiteralSet) -> bool {
    let lhs = a.positive_tuples(&h.predicate);
    let rhs = extent(&h.rhs, &p.constants, a);
    h.rel.holds(&lhs, &rhs)
}

/// Rule satisfaction and supportedness of an answer set `a`, with subset
/// introduction heads supporting `p(t)` when `t` is in the extent of their
/// right-hand side.
pub fn check_satisfaction_and_support(p: &GroundProgram, a: &LiteralSet) -> Result<(), String> {
    for r in &p.rules {
        if !body_true(p, r, a) {
            continue;
        }
        let head_ok = match &r.head {
            GroundHead::Disjunction(h) => h.iter().any(|l| a.contains(l)),
            GroundHead::SubsetIntro(h) => subset_head_true(p, h, a),
        };
        if !head_ok {
            return Err(format!(
                "{{{a}}} violates {}",
                alog_lab::parser::format_rule(&r.to_syntax())
            ));
        }
    }
    for l in a.iter() {
        let supported = p.rules.iter().any(|r| {
            body_true(p, r, a)
                && match &r.head {
                    GroundHead::Disjunction(h) => h.contains(l) && h.iter().filter(|x| a.contains(x)).count() == 1,
                    GroundHead::SubsetIntro(h) => {
                        !l.negated
                            && l.atom.predicate == h.predicate
                            && extent(&h.rhs, &p.constants, a).contains(&l.atom.args)
                    }
                }
        });
        if !supported {
            return Err(format!("{l} is unsupported in {{{a}}}"));
        }
    }
    Ok(())
}

fn has_subset_heads(p: &Program) -> bool {
    p.rules.iter().any(|r| matches!(r.head, Head::SubsetIntro(_)))
}

pub fn satisfaction_and_support() -> Tally {
    let cfg = GenConfig::new(Fragment::Full);
    campaign(|seed| {
        let prog = random_program(&cfg, seed);
        let g = ground_alog(&prog, None)?;
        for a in alog::enumerate_answer_sets(&g, &limits())? {
            if let Err(e) = check_satisfaction_and_support(&g, &a) {
                return violation(e);
            }
        }
        Ok(Some(()))
    })
}

pub fn anti_chain() -> Tally {
    let cfg = GenConfig::new(Fragment::Full);
    campaign(|seed| {
        let prog = random_program(&cfg, seed);
        if has_subset_heads(&prog) {
            return Ok(None);
        }
        let all = alog::enumerate_answer_sets(&ground_alog(&prog, None)?, &limits())?;
        for a in &all {
            for b in &all {
                if a != b && a.is_subset(b) {
                    return violation(format!("{{{a}}} is inside {{{b}}}"));
                }
            }
        }
        Ok(Some(()))
    })
}

fn predicates_of_rule(r: &GroundRule) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    for l in r.head_literals() {
        out.insert(l.atom.predicate.clone());
    }
    if let GroundHead::SubsetIntro(h) = &r.head {
        out.insert(h.predicate.clone());
    }
    for e in &r.body {
        if let GroundBodyAtom::Regular(l) = &e.atom {
            out.insert(l.atom.predicate.clone());
        }
    }
    for s in r.set_names() {
        out.extend(s.literals().map(|l| l.atom.predicate.clone()));
    }
    out
}

/// Every literal with predicate `p` over the universe, both signs.
fn padded_bottom(g: &GroundProgram, unary: bool) -> BTreeSet<GroundLiteral> {
    let atoms: Vec<GroundAtom> = if unary {
        g.constants
            .iter()
            .map(|c| GroundAtom::new("p", vec![c.clone()]))
            .collect()
    } else {
        vec![GroundAtom::prop("p")]
    };
    atoms
        .into_iter()
        .flat_map(|a| [GroundLiteral::pos(a.clone()), GroundLiteral::neg(a)])
        .collect()
}

/// Literals occurring in `rules`, explicitly or as set-name instances.
fn tight_bottom(rules: &[GroundRule], consts: &BTreeSet<Constant>) -> BTreeSet<GroundLiteral> {
    let mut out = BTreeSet::new();
    for r in rules {
        out.extend(r.head_literals().iter().cloned());
        for e in &r.body {
            if let GroundBodyAtom::Regular(l) = &e.atom {
                out.insert(l.clone());
            }
        }
        for s in r.set_names() {
            for i in s.instances(consts) {
                out.extend(i.literals);
            }
        }
    }
    out
}

pub fn splitting() -> Tally {
    let cfg = GenConfig::new(Fragment::Full).layering(Layering::Layered);
    campaign(|seed| {
        let prog = random_program(&cfg, seed);
        let g = ground_alog(&prog, None)?;
        let bottom_pred = Symbol::new("p");
        let (bottom, top): (Vec<GroundRule>, Vec<GroundRule>) = g.rules.iter().cloned().partition(|r| {
            let preds = predicates_of_rule(r);
            let heads: BTreeSet<&Symbol> = r
                .head_literals()
                .iter()
                .map(|l| &l.atom.predicate)
                .chain(match &r.head {
                    GroundHead::SubsetIntro(h) => Some(&h.predicate),
                    _ => None,
                })
                .collect();
            if heads.is_empty() {
                preds.iter().all(|p| *p == bottom_pred)
            } else {
                heads.iter().all(|p| **p == bottom_pred)
            }
        });
        let p1 = GroundProgram::new(bottom, g.constants.clone());
        let p2 = GroundProgram::new(top, g.constants.clone());
        let unary = prog.signature().predicates.get(&bottom_pred).copied().unwrap_or(0) == 1;
        let s = if seed % 2 == 0 {
            tight_bottom(&p1.rules, &g.constants)
        } else {
            padded_bottom(&g, unary)
        };
        if let Err(e) = analysis::splitting_set_check(&p1, &p2, &s) {
            return violation(format!("generated split rejected: {e}"));
        }
        let direct = alog::enumerate_answer_sets(&g, &limits())?;
        let split = analysis::split_solve(&p1, &p2, &s, &limits())?;
        if direct != split {
            return violation(format!("whole program {} vs split {}", show(&direct), show(&split)));
        }
        Ok(Some(()))
    })
}

fn flog_of(prog: &Program) -> Result<Vec<LiteralSet>, Failure> {
    let g = ground_flog(prog, None)?;
    Ok(flog::enumerate_answer_sets_flog(&g, &limits())?)
}

fn slog_of(g: &GroundProgram) -> Result<Vec<LiteralSet>, Failure> {
    let s = slog::SlogProgram::from_ground(g)?;
    Ok(slog::enumerate_answer_sets_slog(&s, &limits())?)
}

/// Inclusion of reduct answer sets in set-expansion answer sets on
/// compatible programs, and equality when also stratified. Returns the two
/// tallies.
pub fn alog_vs_flog() -> (Tally, Tally) {
    let inclusion = campaign(|seed| {
        let prog = random_program(&GenConfig::new(Fragment::AfCompatible), seed);
        if !analysis::is_af_compatible(&prog).0 {
            return Ok(None);
        }
        let a = alog::enumerate_answer_sets(&ground_alog(&prog, None)?, &limits())?;
        let f = flog_of(&prog)?;
        if !a.iter().all(|x| f.contains(x)) {
            return violation(format!("alog {} not inside flog {}", show(&a), show(&f)));
        }
        Ok(Some(()))
    });
    let equality = campaign(|seed| {
        let cfg = GenConfig::new(Fragment::AfCompatible)
            .layering(Layering::Stratified)
            .disjunctive(true);
        let prog = random_program(&cfg, seed);
        if !analysis::is_af_compatible(&prog).0 || analysis::aggregate_stratification(&prog).is_none() {
            return Ok(None);
        }
        let a = alog::enumerate_answer_sets(&ground_alog(&prog, None)?, &limits())?;
        let f = flog_of(&prog)?;
        if a != f {
            return violation(format!("alog {} vs flog {}", show(&a), show(&f)));
        }
        Ok(Some(()))
    });
    (inclusion, equality)
}

pub fn alog_vs_slog() -> (Tally, Tally) {
    let inclusion = campaign(|seed| {
        let prog = random_program(&GenConfig::new(Fragment::Slog), seed);
        let g = ground_alog(&prog, None)?;
        let a = alog::enumerate_answer_sets(&g, &limits())?;
        let s = slog_of(&g)?;
        if !a.iter().all(|x| s.contains(x)) {
            return violation(format!("alog {} not inside slog {}", show(&a), show(&s)));
        }
        Ok(Some(()))
    });
    let equality = campaign(|seed| {
        let prog = random_program(&GenConfig::new(Fragment::Slog).layering(Layering::Stratified), seed);
        if analysis::aggregate_stratification(&prog).is_none() {
            return Ok(None);
        }
        let g = ground_alog(&prog, None)?;
        let a = alog::enumerate_answer_sets(&g, &limits())?;
        let s = slog_of(&g)?;
        if a != s {
            return violation(format!("alog {} vs slog {}", show(&a), show(&s)));
        }
        Ok(Some(()))
    });
    (inclusion, equality)
}

pub fn three_way() -> Tally {
    campaign(|seed| {
        let prog = random_program(&GenConfig::new(Fragment::Slog).layering(Layering::Stratified), seed);
        if analysis::aggregate_stratification(&prog).is_none() || prog.is_disjunctive() {
            return Ok(None);
        }
        let g = ground_alog(&prog, None)?;
        let a = alog::enumerate_answer_sets(&g, &limits())?;
        let f = flog_of(&prog)?;
        let s = slog_of(&g)?;
        if a != f || a != s {
            return violation(format!("alog {} flog {} slog {}", show(&a), show(&f), show(&s)));
        }
        Ok(Some(()))
    })
}

fn atoms_of(p: &slog::SlogProgram) -> Vec<GroundAtom> {
    let mut out = BTreeSet::new();
    for r in &p.rules {
        out.extend(r.head.iter().cloned());
        out.extend(r.pos.iter().cloned());
        out.extend(r.neg.iter().cloned());
        for a in &r.aggregates {
            out.extend(a.base().iter().map(|l| l.atom.clone()));
        }
    }
    out.into_iter().collect()
}

fn random_subset(rng: &mut ChaCha8Rng, atoms: &[GroundAtom]) -> LiteralSet {
    atoms
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .map(GroundLiteral::pos)
        .collect()
}

/// `I ⊆ J` implies `K(I) ⊆ K(J)` for random `S`, `I`, `J`.
pub fn k_monotonicity() -> Tally {
    campaign(|seed| {
        let prog = random_program(&GenConfig::new(Fragment::Slog), seed);
        let p = slog::SlogProgram::from_ground(&ground_alog(&prog, None)?)?;
        let atoms = atoms_of(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_subset(&mut rng, &atoms);
        let j = random_subset(&mut rng, &atoms);
        let i: LiteralSet = j.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let ki = slog::k_operator(&p, &s, &i, &limits())?;
        let kj = slog::k_operator(&p, &s, &j, &limits())?;
        if !ki.is_subset(&kj) {
            return violation(format!(
                "K({{{i}}}) = {{{ki}}} not inside K({{{j}}}) = {{{kj}}} for S = {{{s}}}"
            ));
        }
        Ok(Some(()))
    })
}

/// If `S` satisfies an aggregate then so does every `T` containing
/// `ta(agg, S)` and disjoint from `fa(agg, S)`.
pub fn ta_fa_supersets() -> Tally {
    let mut found = 0u64;
    campaign(|seed| {
        let prog = random_program(&GenConfig::new(Fragment::Slog), seed);
        let p = slog::SlogProgram::from_ground(&ground_alog(&prog, None)?)?;
        let aggs: Vec<&slog::SlogAggregate> = p.rules.iter().flat_map(|r| &r.aggregates).collect();
        if aggs.is_empty() {
            return Ok(None);
        }
        found += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let agg = aggs[rng.gen_range(0..aggs.len())];
        let atoms = atoms_of(&p);
        // look for a satisfying S among a few random draws
        let Some(s) = (0..16)
            .map(|_| random_subset(&mut rng, &atoms))
            .find(|s| agg.satisfied_by(s))
        else {
            return Ok(None);
        };
        let ta = agg.ta(&s);
        let fa = agg.fa(&s);
        for _ in 0..8 {
            let mut t = random_subset(&mut rng, &atoms);
            t.0.retain(|l| !fa.contains(l));
            t.0.extend(ta.iter().cloned());
            if !agg.satisfied_by(&t) {
                return violation(format!("S = {{{s}}} satisfies but T = {{{t}}} does not"));
            }
        }
        Ok(Some(()))
    })
}

/// The solver finds an answer set exactly when enumeration does, and only
/// returns enumerated ones; also with one atom decided in advance.
pub fn solver_differential() -> Tally {
    let cfg = GenConfig::new(Fragment::Solver);
    campaign(|seed| {
        let prog = random_program(&cfg, seed);
        let g = ground_alog(&prog, None)?;
        let oracle = alog::enumerate_answer_sets(&g, &limits())?;
        let mut solver = ASolver::new(&g, limits())?;
        let found = solver.solve(&SolverState::default())?;
        match &found {
            None if !oracle.is_empty() => {
                return violation(format!("solver found nothing, enumeration found {}", show(&oracle)))
            }
            Some(a) if !oracle.contains(a) => {
                return violation(format!("solver returned {{{a}}}, enumeration found {}", show(&oracle)))
            }
            _ => {}
        }
        // seeded with one atom true or false
        let universe = solver.universe().to_vec();
        if universe.is_empty() {
            return Ok(Some(()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atom = universe[rng.gen_range(0..universe.len())].clone();
        let positive = rng.gen_bool(0.5);
        let mut st = SolverState::default();
        if positive {
            st.interpretation.pos.insert(atom.clone());
        } else {
            st.interpretation.neg.insert(atom.clone());
        }
        let lit = GroundLiteral::pos(atom.clone());
        let compatible: Vec<&LiteralSet> = oracle.iter().filter(|a| a.contains(&lit) == positive).collect();
        let mut solver = ASolver::new(&g, limits())?;
        match solver.solve(&st)? {
            None if !compatible.is_empty() => violation(format!(
                "seeded solver found nothing; compatible answer sets exist ({atom} = {positive})"
            )),
            Some(a) if !compatible.contains(&&a) => {
                violation(format!("seeded solver returned {{{a}}} ({atom} = {positive})"))
            }
            _ => Ok(Some(())),
        }
    })
}
