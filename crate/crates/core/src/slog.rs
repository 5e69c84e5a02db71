//! Answer sets as least fixpoints of the conditional-satisfaction
//! consequence operator.
//!
//! Programs here have at most one head atom per rule, no classical
//! negation, no set constructs and no aggregate under `not`. Aggregates must
//! be total on every extent: `min`/`max` are rejected, and `sum` only
//! accepted when every constant of the universe is an integer.

use std::collections::BTreeSet;

use crate::alog::apply_aggregate;
use crate::error::{Error, Result};
use crate::model::*;
use crate::Limits;

/// Ground aggregate atom with its instances and base precomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlogAggregate {
    pub atom: GroundAggregate,
    instances: Vec<SetInstance>,
    base: BTreeSet<GroundLiteral>,
}

impl SlogAggregate {
    pub fn new(atom: GroundAggregate, constants: &BTreeSet<Constant>) -> Self {
        let instances = atom.set.instances(constants);
        let base = instances.iter().flat_map(|i| i.literals.iter().cloned()).collect();
        SlogAggregate { atom, instances, base }
    }

    /// Ground instances of the atoms in the set name.
    pub fn base(&self) -> &BTreeSet<GroundLiteral> {
        &self.base
    }

    /// Two-valued truth in `s`; an undefined application is not satisfied.
    pub fn satisfied_by(&self, s: &LiteralSet) -> bool {
        let ext: BTreeSet<Vec<Constant>> = extent(&self.instances, s).map(|i| i.tuple.clone()).collect();
        match apply_aggregate(self.atom.func, &ext) {
            Some(v) => self.atom.rel.holds(&v, &self.atom.guard),
            None => false,
        }
    }

    /// `S ∩ Base`.
    pub fn ta(&self, s: &LiteralSet) -> LiteralSet {
        s.intersection(&self.base)
    }

    /// `Base − S`.
    pub fn fa(&self, s: &LiteralSet) -> LiteralSet {
        self.base.iter().filter(|l| !s.contains(l)).cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlogRule {
    pub head: Option<GroundAtom>,
    pub pos: Vec<GroundAtom>,
    pub neg: Vec<GroundAtom>,
    pub aggregates: Vec<SlogAggregate>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlogProgram {
    pub rules: Vec<SlogRule>,
    pub constants: BTreeSet<Constant>,
}

fn lit(a: &GroundAtom) -> GroundLiteral {
    GroundLiteral::pos(a.clone())
}

impl SlogProgram {
    /// Converts a ground program, rejecting constructs outside the fragment.
    pub fn from_ground(p: &GroundProgram) -> Result<Self> {
        let unsupported = |what: &str| Err(Error::Unsupported(format!("{what} in this semantics")));
        let all_int = p.constants.iter().all(|c| c.as_int().is_some());
        let mut rules = Vec::with_capacity(p.rules.len());
        for r in &p.rules {
            let head = match &r.head {
                GroundHead::SubsetIntro(_) => return unsupported("subset-introduction heads"),
                GroundHead::Disjunction(h) => match h.as_slice() {
                    [] => None,
                    [l] if !l.negated => Some(l.atom.clone()),
                    [_] => return unsupported("classical negation"),
                    _ => return unsupported("disjunctive heads"),
                },
            };
            let mut rule = SlogRule {
                head,
                pos: Vec::new(),
                neg: Vec::new(),
                aggregates: Vec::new(),
            };
            for e in &r.body {
                match &e.atom {
                    GroundBodyAtom::Regular(l) if l.negated => return unsupported("classical negation"),
                    GroundBodyAtom::Regular(l) if e.naf => rule.neg.push(l.atom.clone()),
                    GroundBodyAtom::Regular(l) => rule.pos.push(l.atom.clone()),
                    GroundBodyAtom::Set(_) => return unsupported("set atoms"),
                    GroundBodyAtom::Aggregate(a) => {
                        if e.naf {
                            return unsupported("default negation of aggregates");
                        }
                        if a.negated {
                            return unsupported("classical negation");
                        }
                        match a.atom.func {
                            AggregateFunction::Min | AggregateFunction::Max => {
                                return unsupported("partial aggregates (min, max)")
                            }
                            AggregateFunction::Sum if !all_int => {
                                return unsupported("sum over a universe with symbolic constants")
                            }
                            _ => {}
                        }
                        if a.atom.set.literals().any(|l| l.negated) {
                            return unsupported("classical negation");
                        }
                        rule.aggregates.push(SlogAggregate::new(a.atom.clone(), &p.constants));
                    }
                }
            }
            rules.push(rule);
        }
        Ok(SlogProgram {
            rules,
            constants: p.constants.clone(),
        })
    }
}

/// Ground instances of the atoms occurring in the set name of `agg`.
pub fn base(agg: &GroundAggregate, constants: &BTreeSet<Constant>) -> BTreeSet<GroundLiteral> {
    SlogAggregate::new(agg.clone(), constants).base
}

fn completion_cap(k: usize, limits: &Limits) -> Result<()> {
    if k > limits.max_completion_atoms {
        return Err(Error::CapExceeded {
            what: "aggregate solution check",
            size: k,
            cap: limits.max_completion_atoms,
        });
    }
    Ok(())
}

/// Every `S` with `s1 ⊆ S ⊆ Base` and `S ∩ s2 = ∅` satisfies `agg`.
pub fn is_aggregate_solution(agg: &SlogAggregate, s1: &LiteralSet, s2: &LiteralSet, limits: &Limits) -> Result<bool> {
    let rest: Vec<&GroundLiteral> = agg.base.iter().filter(|l| !s1.contains(l) && !s2.contains(l)).collect();
    completion_cap(rest.len(), limits)?;
    for mask in 0u64..(1u64 << rest.len()) {
        let mut s = s1.clone();
        for (i, l) in rest.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.insert((*l).clone());
            }
        }
        if !agg.satisfied_by(&s) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(I, S) ⊨ agg`: `⟨I ∩ S ∩ Base, Base − S⟩` is an aggregate solution.
pub fn cond_sat_aggregate(i: &LiteralSet, s: &LiteralSet, agg: &SlogAggregate, limits: &Limits) -> Result<bool> {
    let s1: LiteralSet = agg
        .base
        .iter()
        .filter(|l| i.contains(l) && s.contains(l))
        .cloned()
        .collect();
    is_aggregate_solution(agg, &s1, &agg.fa(s), limits)
}

/// `(I, S) ⊨ a` for a regular atom: `a ∈ I`.
pub fn cond_sat_atom(i: &LiteralSet, a: &GroundAtom) -> bool {
    i.contains(&lit(a))
}

/// Rules whose negative atoms all miss `s`, with the negative part removed.
pub fn slog_reduct(p: &SlogProgram, s: &LiteralSet) -> SlogProgram {
    SlogProgram {
        rules: p
            .rules
            .iter()
            .filter(|r| r.neg.iter().all(|a| !s.contains(&lit(a))))
            .map(|r| SlogRule {
                neg: Vec::new(),
                ..r.clone()
            })
            .collect(),
        constants: p.constants.clone(),
    }
}

fn body_cond_sat(r: &SlogRule, i: &LiteralSet, s: &LiteralSet, limits: &Limits) -> Result<bool> {
    if !r.pos.iter().all(|a| cond_sat_atom(i, a)) {
        return Ok(false);
    }
    for agg in &r.aggregates {
        if !cond_sat_aggregate(i, s, agg, limits)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn k_reduced(reduct: &SlogProgram, s: &LiteralSet, i: &LiteralSet, limits: &Limits) -> Result<LiteralSet> {
    let mut out = LiteralSet::new();
    for r in &reduct.rules {
        if let Some(h) = &r.head {
            if body_cond_sat(r, i, s, limits)? {
                out.insert(lit(h));
            }
        }
    }
    Ok(out)
}

/// Heads of the rules of the reduct of `p` relative to `s` whose bodies are
/// conditionally satisfied by `(I, S)`.
pub fn k_operator(p: &SlogProgram, s: &LiteralSet, i: &LiteralSet, limits: &Limits) -> Result<LiteralSet> {
    k_reduced(&slog_reduct(p, s), s, i, limits)
}

/// Least fixpoint of the operator, iterated from the empty set.
pub fn lfp_k(p: &SlogProgram, s: &LiteralSet, limits: &Limits) -> Result<LiteralSet> {
    let reduct = slog_reduct(p, s);
    let mut i = LiteralSet::new();
    loop {
        let next = k_reduced(&reduct, s, &i, limits)?;
        if next == i {
            return Ok(i);
        }
        i = next;
    }
}

/// A rule without head forbids its body from holding in `s`.
fn violates_constraint(p: &SlogProgram, s: &LiteralSet) -> bool {
    p.rules.iter().any(|r| {
        r.head.is_none()
            && r.pos.iter().all(|a| s.contains(&lit(a)))
            && r.neg.iter().all(|a| !s.contains(&lit(a)))
            && r.aggregates.iter().all(|g| g.satisfied_by(s))
    })
}

/// `s` equals the least fixpoint and violates no constraint.
pub fn is_answer_set_slog(p: &SlogProgram, s: &LiteralSet, limits: &Limits) -> Result<bool> {
    if s.iter().any(|l| l.negated) || violates_constraint(p, s) {
        return Ok(false);
    }
    Ok(lfp_k(p, s, limits)? == *s)
}

/// All answer sets, sorted, over subsets of the head atoms containing the
/// facts.
pub fn enumerate_answer_sets_slog(p: &SlogProgram, limits: &Limits) -> Result<Vec<LiteralSet>> {
    let universe: BTreeSet<GroundLiteral> = p.rules.iter().filter_map(|r| r.head.as_ref().map(lit)).collect();
    let facts: LiteralSet = p
        .rules
        .iter()
        .filter(|r| r.pos.is_empty() && r.neg.is_empty() && r.aggregates.is_empty())
        .filter_map(|r| r.head.as_ref().map(lit))
        .collect();
    let free: Vec<&GroundLiteral> = universe.iter().filter(|l| !facts.contains(l)).collect();
    limits.check_candidates(free.len())?;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut s = facts.clone();
        for (i, l) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.insert((*l).clone());
            }
        }
        if is_answer_set_slog(p, &s, limits)? {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}
