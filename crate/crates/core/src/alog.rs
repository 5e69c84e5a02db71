//! Answer sets under the vicious-circle reading of aggregates and set
//! constructs.
//!
//! A candidate `S` is checked by a pipeline of reducts: subset-introduction
//! heads, then set atoms, then aggregates are eliminated relative to `S`,
//! after which the ordinary reduct for default negation is taken and `S`
//! must be a minimal model of the result.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::*;
use crate::Limits;

/// Applies an aggregate function to a finite set of tuples.
///
/// `count` is total. `sum` is defined when every element is a single
/// integer (the empty sum is 0) and the result fits in `i64`. `min` and
/// `max` additionally need a nonempty set.
pub fn apply_aggregate(f: AggregateFunction, set: &BTreeSet<Vec<Constant>>) -> Option<i64> {
    if f == AggregateFunction::Count {
        return i64::try_from(set.len()).ok();
    }
    let mut values = Vec::with_capacity(set.len());
    for t in set {
        match t.as_slice() {
            [Constant::Int(i)] => values.push(*i),
            _ => return None,
        }
    }
    match f {
        AggregateFunction::Count => unreachable!(),
        AggregateFunction::Sum => values.iter().try_fold(0i64, |acc, v| acc.checked_add(*v)),
        AggregateFunction::Min => values.into_iter().min(),
        AggregateFunction::Max => values.into_iter().max(),
    }
}

/// [`apply_aggregate`] for a function given by name (`card` means `count`).
pub fn apply_named_aggregate(name: &str, set: &BTreeSet<Vec<Constant>>) -> Result<Option<i64>> {
    let f = AggregateFunction::from_name(name)
        .ok_or_else(|| Error::Unsupported(format!("unknown aggregate function `{name}`")))?;
    Ok(apply_aggregate(f, set))
}

/// Instances of the set names of a program, computed once.
pub(crate) struct Instances<'a> {
    constants: &'a BTreeSet<Constant>,
    cache: HashMap<SetName, Vec<SetInstance>>,
}

impl<'a> Instances<'a> {
    pub(crate) fn new(p: &'a GroundProgram) -> Result<Self> {
        let mut cache = HashMap::new();
        for r in &p.rules {
            for s in r.set_names() {
                if !s.is_ground() {
                    return Err(Error::NonGround(format!(
                        "set name with free variables {:?}",
                        s.free_vars()
                    )));
                }
                if !cache.contains_key(s) {
                    cache.insert(s.clone(), s.instances(&p.constants));
                }
            }
        }
        Ok(Instances {
            constants: &p.constants,
            cache,
        })
    }

    pub(crate) fn bare(constants: &'a BTreeSet<Constant>) -> Self {
        Instances {
            constants,
            cache: HashMap::new(),
        }
    }

    pub(crate) fn of(&self, s: &SetName) -> Cow<'_, [SetInstance]> {
        match self.cache.get(s) {
            Some(v) => Cow::Borrowed(v.as_slice()),
            None => Cow::Owned(s.instances(self.constants)),
        }
    }

    pub(crate) fn extent(&self, s: &SetName, lits: &LiteralSet) -> BTreeSet<Vec<Constant>> {
        extent(&self.of(s), lits).map(|i| i.tuple.clone()).collect()
    }

    pub(crate) fn aggregate(&self, a: &GroundAggregate, s: &LiteralSet) -> TruthValue {
        match apply_aggregate(a.func, &self.extent(&a.set, s)) {
            Some(v) if a.rel.holds(&v, &a.guard) => TruthValue::True,
            Some(_) => TruthValue::False,
            None => TruthValue::Undefined,
        }
    }

    pub(crate) fn aggregate_literal(&self, a: &AggregateLiteral<i64>, s: &LiteralSet) -> TruthValue {
        self.aggregate(&a.normalized(), s)
    }

    pub(crate) fn set_atom(&self, a: &SetAtom, s: &LiteralSet) -> bool {
        a.rel.holds(&self.extent(&a.lhs, s), &self.extent(&a.rhs, s))
    }

    pub(crate) fn eliteral(&self, e: &GroundELiteral, s: &LiteralSet) -> TruthValue {
        let positive = match &e.atom {
            GroundBodyAtom::Regular(l) => bool_truth(s.contains(l)),
            GroundBodyAtom::Aggregate(a) => self.aggregate_literal(a, s),
            GroundBodyAtom::Set(a) => bool_truth(self.set_atom(a, s)),
        };
        if e.naf {
            bool_truth(positive != TruthValue::True)
        } else {
            positive
        }
    }

    pub(crate) fn body_satisfied(&self, r: &GroundRule, s: &LiteralSet) -> bool {
        r.body.iter().all(|e| self.eliteral(e, s).is_true())
    }

    pub(crate) fn head_satisfied(&self, r: &GroundRule, s: &LiteralSet) -> bool {
        match &r.head {
            GroundHead::Disjunction(h) => h.iter().any(|l| s.contains(l)),
            GroundHead::SubsetIntro(h) => self.subset_head(h, s),
        }
    }

    fn subset_head(&self, h: &SubsetIntroHead, s: &LiteralSet) -> bool {
        h.rel.holds(&s.positive_tuples(&h.predicate), &self.extent(&h.rhs, s))
    }
}

fn bool_truth(b: bool) -> TruthValue {
    if b {
        TruthValue::True
    } else {
        TruthValue::False
    }
}

/// Tuples of the instances of `set` whose condition literals all belong to `s`.
pub fn extent_of(set: &SetName, constants: &BTreeSet<Constant>, s: &LiteralSet) -> BTreeSet<Vec<Constant>> {
    Instances::bare(constants).extent(set, s)
}

/// Three-valued truth of a ground aggregate atom in `s`.
pub fn truth_value(a: &GroundAggregate, constants: &BTreeSet<Constant>, s: &LiteralSet) -> TruthValue {
    Instances::bare(constants).aggregate(a, s)
}

/// Truth of a possibly classically negated aggregate literal, via its
/// positive form.
pub fn aggregate_literal_truth(
    a: &AggregateLiteral<i64>,
    constants: &BTreeSet<Constant>,
    s: &LiteralSet,
) -> TruthValue {
    Instances::bare(constants).aggregate_literal(a, s)
}

/// Truth of a body element in `s`. Regular literals and set atoms are
/// two-valued; `not A` is true when `A` is false or undefined.
pub fn eliteral_truth(e: &GroundELiteral, constants: &BTreeSet<Constant>, s: &LiteralSet) -> TruthValue {
    Instances::bare(constants).eliteral(e, s)
}

/// Every body element is true in `s`.
pub fn body_satisfied(p: &GroundProgram, rule: &GroundRule, s: &LiteralSet) -> bool {
    Instances::bare(&p.constants).body_satisfied(rule, s)
}

/// `s` satisfies `rule`: the body is not satisfied or the head is true.
/// A constraint's head is never true.
pub fn rule_satisfied(p: &GroundProgram, rule: &GroundRule, s: &LiteralSet) -> bool {
    let inst = Instances::bare(&p.constants);
    !inst.body_satisfied(rule, s) || inst.head_satisfied(rule, s)
}

fn require_no_set_constructs(p: &GroundProgram, what: &str) -> Result<()> {
    if p.has_set_constructs() {
        return Err(Error::Unsupported(format!(
            "{what} expects a program without set atoms or subset-introduction heads"
        )));
    }
    Ok(())
}

/// Eliminates aggregates relative to `s`.
///
/// Rules with an aggregate body element that is false or undefined in `s`
/// are removed. In the remaining rules `not A` with `A` undefined is
/// deleted, other aggregate elements are replaced by the condition
/// literals of the instances in their extent.
pub fn aggregate_reduct(p: &GroundProgram, s: &LiteralSet) -> Result<GroundProgram> {
    require_no_set_constructs(p, "the aggregate reduct")?;
    let inst = Instances::new(p)?;
    Ok(aggregate_reduct_with(&inst, p, s))
}

fn aggregate_reduct_with(inst: &Instances, p: &GroundProgram, s: &LiteralSet) -> GroundProgram {
    let mut rules = Vec::with_capacity(p.rules.len());
    'rules: for r in &p.rules {
        let mut body = Vec::with_capacity(r.body.len());
        let mut added = BTreeSet::new();
        for e in &r.body {
            let GroundBodyAtom::Aggregate(a) = &e.atom else {
                body.push(e.clone());
                continue;
            };
            if inst.eliteral(e, s) != TruthValue::True {
                continue 'rules;
            }
            if e.naf && inst.aggregate_literal(a, s) == TruthValue::Undefined {
                continue;
            }
            // `not A` becomes the classical negation of A, which in turn is
            // replaced by its positive form; both are then replaced by the
            // same extent literals
            for i in extent(&inst.of(&a.atom.set), s) {
                for l in &i.literals {
                    if added.insert(l.clone()) {
                        body.push(GroundELiteral::pos(l.clone()));
                    }
                }
            }
        }
        rules.push(GroundRule {
            head: r.head.clone(),
            body,
        });
    }
    GroundProgram {
        rules,
        constants: p.constants.clone(),
    }
}

/// Eliminates set atoms relative to `s`: rules with an untrue set atom are
/// removed and each remaining set atom is replaced by the members of `s`
/// that instantiate a literal of either condition.
pub fn set_atom_reduct(p: &GroundProgram, s: &LiteralSet) -> Result<GroundProgram> {
    let inst = Instances::new(p)?;
    Ok(set_atom_reduct_with(&inst, p, s))
}

fn set_atom_reduct_with(inst: &Instances, p: &GroundProgram, s: &LiteralSet) -> GroundProgram {
    let mut rules = Vec::with_capacity(p.rules.len());
    'rules: for r in &p.rules {
        let mut body = Vec::with_capacity(r.body.len());
        let mut added = BTreeSet::new();
        for e in &r.body {
            let GroundBodyAtom::Set(a) = &e.atom else {
                body.push(e.clone());
                continue;
            };
            if !inst.set_atom(a, s) {
                continue 'rules;
            }
            for side in [&a.lhs, &a.rhs] {
                for i in inst.of(side).iter() {
                    for l in &i.literals {
                        if s.contains(l) && added.insert(l.clone()) {
                            body.push(GroundELiteral::pos(l.clone()));
                        }
                    }
                }
            }
        }
        rules.push(GroundRule {
            head: r.head.clone(),
            body,
        });
    }
    GroundProgram {
        rules,
        constants: p.constants.clone(),
    }
}

/// Replaces subset-introduction rules relative to `s`: when the head is not
/// true in `s` the rule becomes a constraint, otherwise one rule `p(t) :- body`
/// is produced for each `p(t)` in `s`.
pub fn subset_intro_reduct(p: &GroundProgram, s: &LiteralSet) -> Result<GroundProgram> {
    let inst = Instances::new(p)?;
    Ok(subset_intro_reduct_with(&inst, p, s))
}

fn subset_intro_reduct_with(inst: &Instances, p: &GroundProgram, s: &LiteralSet) -> GroundProgram {
    let mut rules = Vec::with_capacity(p.rules.len());
    for r in &p.rules {
        let GroundHead::SubsetIntro(h) = &r.head else {
            rules.push(r.clone());
            continue;
        };
        if !inst.subset_head(h, s) {
            rules.push(GroundRule {
                head: GroundHead::Disjunction(Vec::new()),
                body: r.body.clone(),
            });
            continue;
        }
        for l in s.iter() {
            if !l.negated && l.atom.predicate == h.predicate && l.atom.args.len() == h.rhs.vars.len() {
                rules.push(GroundRule {
                    head: GroundHead::Disjunction(vec![l.clone()]),
                    body: r.body.clone(),
                });
            }
        }
    }
    GroundProgram {
        rules,
        constants: p.constants.clone(),
    }
}

/// Rule of a program without negation or aggregates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositiveRule {
    pub head: Vec<GroundLiteral>,
    pub body: Vec<GroundLiteral>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositiveProgram {
    pub rules: Vec<PositiveRule>,
}

impl PositiveProgram {
    pub fn is_model(&self, s: &LiteralSet) -> bool {
        self.rules
            .iter()
            .all(|r| !r.body.iter().all(|l| s.contains(l)) || r.head.iter().any(|l| s.contains(l)))
    }

    pub fn is_disjunctive(&self) -> bool {
        self.rules.iter().any(|r| r.head.len() > 1)
    }

    /// Least model of the rules with at most one head literal; constraints
    /// are ignored.
    pub fn least_model(&self) -> LiteralSet {
        let mut m = LiteralSet::new();
        loop {
            let mut changed = false;
            for r in &self.rules {
                if let [h] = r.head.as_slice() {
                    if !m.contains(h) && r.body.iter().all(|l| m.contains(l)) {
                        m.insert(h.clone());
                        changed = true;
                    }
                }
            }
            if !changed {
                return m;
            }
        }
    }
}

/// Removes rules with `not l` for some `l` in `s` and deletes the remaining
/// `not l`.
pub fn gl_reduct(p: &GroundProgram, s: &LiteralSet) -> Result<PositiveProgram> {
    let mut rules = Vec::with_capacity(p.rules.len());
    'rules: for r in &p.rules {
        let GroundHead::Disjunction(head) = &r.head else {
            return Err(Error::Unsupported(
                "the negation reduct expects a program without subset-introduction heads".into(),
            ));
        };
        let mut body = Vec::with_capacity(r.body.len());
        for e in &r.body {
            match &e.atom {
                GroundBodyAtom::Regular(l) if e.naf => {
                    if s.contains(l) {
                        continue 'rules;
                    }
                }
                GroundBodyAtom::Regular(l) => body.push(l.clone()),
                _ => {
                    return Err(Error::Unsupported(
                        "the negation reduct expects a program without aggregates or set atoms".into(),
                    ))
                }
            }
        }
        rules.push(PositiveRule {
            head: head.clone(),
            body,
        });
    }
    Ok(PositiveProgram { rules })
}

/// `s` is consistent, a model of `p`, and no proper subset of `s` is.
pub fn is_minimal_model(s: &LiteralSet, p: &PositiveProgram, limits: &Limits) -> Result<bool> {
    if !s.is_consistent() || !p.is_model(s) {
        return Ok(false);
    }
    if !p.is_disjunctive() {
        // every model contains the least model of the definite part, and the
        // least model satisfies a constraint whenever a model containing it does
        return Ok(p.least_model() == *s);
    }
    if s.len() > limits.max_minimality_atoms {
        return Err(Error::CapExceeded {
            what: "minimality check",
            size: s.len(),
            cap: limits.max_minimality_atoms,
        });
    }
    Ok(!has_smaller_model(s, p))
}

/// Searches for a model of `p` strictly inside `s`.
fn has_smaller_model(s: &LiteralSet, p: &PositiveProgram) -> bool {
    if s.is_empty() {
        return false;
    }
    let atoms: Vec<&GroundLiteral> = s.iter().collect();
    let index = |l: &GroundLiteral| atoms.binary_search(&l).ok();
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for r in &p.rules {
        let mut clause = Vec::new();
        let mut relevant = true;
        for b in &r.body {
            match index(b) {
                Some(i) => clause.push(-(i as i32 + 1)),
                // a body literal outside s is false in every subset of s
                None => relevant = false,
            }
        }
        if !relevant {
            continue;
        }
        clause.extend(r.head.iter().filter_map(&index).map(|i| i as i32 + 1));
        clauses.push(clause);
    }
    clauses.push((0..atoms.len()).map(|i| -(i as i32 + 1)).collect());
    let mut assignment = vec![0i8; atoms.len()];
    sat::solve(&clauses, &mut assignment)
}

mod sat {
    //! Plain DPLL with unit propagation for the minimality check.

    fn value(lit: i32, a: &[i8]) -> i8 {
        let v = a[(lit.unsigned_abs() - 1) as usize];
        if lit > 0 {
            v
        } else {
            -v
        }
    }

    pub(super) fn solve(clauses: &[Vec<i32>], a: &mut Vec<i8>) -> bool {
        let saved = a.clone();
        loop {
            let mut unit = None;
            for c in clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut sat = false;
                for &l in c {
                    match value(l, a) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            open += 1;
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                if open == 0 {
                    *a = saved;
                    return false;
                }
                if open == 1 {
                    unit = unassigned;
                    break;
                }
            }
            match unit {
                Some(l) => a[(l.unsigned_abs() - 1) as usize] = if l > 0 { 1 } else { -1 },
                None => break,
            }
        }
        let Some(var) = a.iter().position(|&v| v == 0) else {
            return true;
        };
        for v in [-1i8, 1] {
            a[var] = v;
            if solve(clauses, a) {
                return true;
            }
            a[var] = 0;
        }
        *a = saved;
        false
    }
}

/// The program with every set construct, aggregate and default negation
/// eliminated relative to `s`.
pub fn full_reduct(p: &GroundProgram, s: &LiteralSet) -> Result<PositiveProgram> {
    let inst = Instances::new(p)?;
    full_reduct_with(&inst, p, s)
}

fn full_reduct_with(inst: &Instances, p: &GroundProgram, s: &LiteralSet) -> Result<PositiveProgram> {
    let p = subset_intro_reduct_with(inst, p, s);
    let p = set_atom_reduct_with(inst, &p, s);
    let p = aggregate_reduct_with(inst, &p, s);
    gl_reduct(&p, s)
}

/// Whether `s` is an answer set of `p`.
pub fn is_answer_set(p: &GroundProgram, s: &LiteralSet, limits: &Limits) -> Result<bool> {
    let inst = Instances::new(p)?;
    is_answer_set_with(&inst, p, s, limits)
}

fn is_answer_set_with(inst: &Instances, p: &GroundProgram, s: &LiteralSet, limits: &Limits) -> Result<bool> {
    if !s.is_consistent() {
        return Ok(false);
    }
    let reduct = full_reduct_with(inst, p, s)?;
    is_minimal_model(s, &reduct, limits)
}

/// Literals that may belong to an answer set: head literals, and for every
/// subset-introduction head `p ⊙ {X : cond}` the atoms `p(t)` over the
/// instance tuples `t` of the set name.
pub fn candidate_universe(p: &GroundProgram) -> Result<BTreeSet<GroundLiteral>> {
    let inst = Instances::new(p)?;
    Ok(candidate_universe_with(&inst, p))
}

fn candidate_universe_with(inst: &Instances, p: &GroundProgram) -> BTreeSet<GroundLiteral> {
    let mut out = BTreeSet::new();
    for r in &p.rules {
        match &r.head {
            GroundHead::Disjunction(h) => out.extend(h.iter().cloned()),
            GroundHead::SubsetIntro(h) => {
                for i in inst.of(&h.rhs).iter() {
                    out.insert(GroundLiteral::pos(GroundAtom {
                        predicate: h.predicate.clone(),
                        args: i.tuple.clone(),
                    }));
                }
            }
        }
    }
    out
}

/// All answer sets, sorted, by checking every subset of the candidate
/// universe that contains the facts.
pub fn enumerate_answer_sets(p: &GroundProgram, limits: &Limits) -> Result<Vec<LiteralSet>> {
    let inst = Instances::new(p)?;
    let universe = candidate_universe_with(&inst, p);
    let facts: LiteralSet = p
        .rules
        .iter()
        .filter(|r| r.body.is_empty())
        .filter_map(|r| match r.head_literals() {
            [l] => Some(l.clone()),
            _ => None,
        })
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
        if is_answer_set_with(&inst, p, &s, limits)? {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}
