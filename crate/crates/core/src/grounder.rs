//! Grounding.
//!
//! [`ground_alog`] replaces free variables by constants and leaves set names
//! with their bound variables in place. [`ground_flog`] first substitutes the
//! global variables of a rule and then expands every aggregate set name into
//! an explicit ground set.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, EvalError, Result};
use crate::flog::{FlogAggregate, FlogBodyAtom, FlogELiteral, FlogProgram, FlogRule, GroundSet};
use crate::model::*;

/// Inclusive integer interval added to the constant universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub min: i64,
    pub max: i64,
}

impl IntRange {
    pub fn new(min: i64, max: i64) -> Self {
        IntRange { min, max }
    }
}

impl std::str::FromStr for IntRange {
    type Err = String;

    /// Parses `MIN..MAX`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected MIN..MAX, got `{s}`"))?;
        let min: i64 = a.trim().parse().map_err(|e| format!("bad lower bound `{a}`: {e}"))?;
        let max: i64 = b.trim().parse().map_err(|e| format!("bad upper bound `{b}`: {e}"))?;
        if min > max {
            return Err(format!("empty range {min}..{max}"));
        }
        Ok(IntRange { min, max })
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

/// Constants occurring as atom arguments in `p`, plus the integers of
/// `int_range`. Constants that occur only in guards or comparisons are not
/// objects of the program and are left out.
pub fn herbrand_constants(p: &Program, int_range: Option<IntRange>) -> BTreeSet<Constant> {
    let mut out = p.signature().constants;
    if let Some(r) = int_range {
        out.extend((r.min..=r.max).map(Constant::Int));
    }
    out
}

/// Grounds `p` by substituting every free variable with every constant of
/// the universe. Instances are listed rule by rule; duplicates are dropped.
pub fn ground_alog(p: &Program, int_range: Option<IntRange>) -> Result<GroundProgram> {
    let constants = herbrand_constants(p, int_range);
    let mut seen = HashSet::new();
    let mut rules = Vec::new();
    for (i, rule) in p.rules.iter().enumerate() {
        let ctx = Ctx {
            rule: i,
            span: p.span(i),
            constants: &constants,
        };
        let vars = rule.free_vars();
        ctx.check_safety(rule, &vars, false)?;
        for subst in assignments(&vars, &constants) {
            if let Some(g) = ctx.instantiate(rule, &subst)? {
                if seen.insert(g.clone()) {
                    rules.push(g);
                }
            }
        }
    }
    Ok(GroundProgram { rules, constants })
}

/// Grounds `p` for the set-expansion semantics.
///
/// Global variables (those occurring outside aggregate set names, or in more
/// than one set name) are substituted first, everywhere; the remaining local
/// variables of each set name are then expanded into a ground set.
pub fn ground_flog(p: &Program, int_range: Option<IntRange>) -> Result<FlogProgram> {
    if p.has_set_constructs() {
        return Err(Error::Unsupported(
            "set atoms and subset-introduction heads have no counterpart in this semantics".into(),
        ));
    }
    if p.has_classical_negation() {
        return Err(Error::Unsupported(
            "classical negation in a program for this semantics".into(),
        ));
    }
    let constants = herbrand_constants(p, int_range);
    let mut seen = HashSet::new();
    let mut rules = Vec::new();
    for (i, rule) in p.rules.iter().enumerate() {
        let ctx = Ctx {
            rule: i,
            span: p.span(i),
            constants: &constants,
        };
        let globals = global_vars(rule);
        ctx.check_safety(rule, &globals, true)?;
        for subst in assignments(&globals, &constants) {
            if let Some(g) = ctx.instantiate_flog(rule, &subst)? {
                if seen.insert(g.clone()) {
                    rules.push(g);
                }
            }
        }
    }
    Ok(FlogProgram { rules, constants })
}

/// Variables that occur outside aggregate set names, or in more than one of
/// them, in order of first occurrence.
pub fn global_vars(rule: &Rule) -> Vec<Symbol> {
    let mut outside = BTreeSet::new();
    for l in rule.head_literals() {
        l.collect_vars(&mut outside);
    }
    let mut in_sets: BTreeMap<Symbol, usize> = BTreeMap::new();
    for e in &rule.body {
        match &e.atom {
            BodyAtom::Regular(l) => l.collect_vars(&mut outside),
            BodyAtom::Compare(c) => c.collect_vars(&mut outside),
            BodyAtom::Aggregate(a) => {
                a.atom.guard.collect_vars(&mut outside);
                let mut vs = BTreeSet::new();
                a.atom.set.all_vars(&mut vs);
                for v in vs {
                    *in_sets.entry(v).or_default() += 1;
                }
            }
            BodyAtom::Set(s) => {
                s.lhs.all_vars(&mut outside);
                s.rhs.all_vars(&mut outside);
            }
        }
    }
    let is_global = |v: &Symbol| outside.contains(v) || in_sets.get(v).is_some_and(|&n| n > 1);
    let mut order = Vec::new();
    let mut push = |v: &Symbol| {
        if is_global(v) && !order.contains(v) {
            order.push(v.clone());
        }
    };
    let mut all = Vec::new();
    for l in rule.head_literals() {
        let mut vs = BTreeSet::new();
        l.collect_vars(&mut vs);
        all.extend(vs);
    }
    for e in &rule.body {
        let mut vs = BTreeSet::new();
        match &e.atom {
            BodyAtom::Regular(l) => l.collect_vars(&mut vs),
            BodyAtom::Compare(c) => c.collect_vars(&mut vs),
            BodyAtom::Aggregate(a) => {
                a.atom.set.all_vars(&mut vs);
                a.atom.guard.collect_vars(&mut vs);
            }
            BodyAtom::Set(s) => {
                s.lhs.all_vars(&mut vs);
                s.rhs.all_vars(&mut vs);
            }
        }
        all.extend(vs);
    }
    for v in &all {
        push(v);
    }
    order
}

/// Every assignment of `vars` to `constants`, last variable fastest.
fn assignments(vars: &[Symbol], constants: &BTreeSet<Constant>) -> Vec<BTreeMap<Symbol, Constant>> {
    let consts: Vec<&Constant> = constants.iter().collect();
    if vars.is_empty() {
        return vec![BTreeMap::new()];
    }
    if consts.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    'outer: loop {
        out.push(
            vars.iter()
                .cloned()
                .zip(idx.iter().map(|&i| consts[i].clone()))
                .collect(),
        );
        let mut k = vars.len();
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            if idx[k] < consts.len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        return out;
    }
}

struct Ctx<'a> {
    rule: usize,
    span: Option<SourceSpan>,
    constants: &'a BTreeSet<Constant>,
}

/// Outcome of grounding one literal.
enum Grounded<T> {
    Ok(T),
    /// Arithmetic left the universe or was applied to a symbol.
    Missing,
}

impl Ctx<'_> {
    fn eval_err(&self, source: EvalError) -> Error {
        Error::Eval {
            rule: self.rule,
            span: self.span,
            source,
        }
    }

    /// Every variable to be substituted must occur as a plain argument of
    /// some regular literal of the rule.
    fn check_safety(&self, rule: &Rule, vars: &[Symbol], count_bound: bool) -> Result<()> {
        let mut covered = BTreeSet::new();
        let mut add = |l: &Literal, shadow: &[Symbol]| {
            for t in &l.atom.args {
                if let Term::Var(v) = t {
                    if !shadow.contains(v) {
                        covered.insert(v.clone());
                    }
                }
            }
        };
        for l in rule.head_literals() {
            add(l, &[]);
        }
        for e in &rule.body {
            if let BodyAtom::Regular(l) = &e.atom {
                add(l, &[]);
            }
        }
        for s in rule.set_names() {
            // a global variable of the set-expansion discipline may sit in a
            // bound position
            let shadow: &[Symbol] = if count_bound { &[] } else { &s.vars };
            for l in s.literals() {
                add(l, shadow);
            }
        }
        match vars.iter().find(|v| !covered.contains(*v)) {
            Some(v) => Err(Error::UnsafeRule {
                rule: self.rule,
                var: v.clone(),
                span: self.span,
            }),
            None => Ok(()),
        }
    }

    fn literal(&self, l: &Literal, subst: &BTreeMap<Symbol, Constant>) -> Result<Grounded<GroundLiteral>> {
        let mut args = Vec::with_capacity(l.atom.args.len());
        for t in &l.atom.args {
            match t.eval(subst) {
                Ok(c) if self.constants.contains(&c) => args.push(c),
                Ok(_) | Err(EvalError::NonInteger(_)) | Err(EvalError::Unbound(_)) => return Ok(Grounded::Missing),
                Err(e @ EvalError::Overflow) => return Err(self.eval_err(e)),
            }
        }
        Ok(Grounded::Ok(GroundLiteral {
            negated: l.negated,
            atom: GroundAtom {
                predicate: l.atom.predicate.clone(),
                args,
            },
        }))
    }

    fn comparison(&self, c: &Comparison, subst: &BTreeMap<Symbol, Constant>) -> Result<bool> {
        match c.eval(subst) {
            Ok(b) => Ok(b),
            Err(e @ EvalError::Overflow) => Err(self.eval_err(e)),
            Err(_) => Ok(false),
        }
    }

    fn guard(&self, t: &Term, subst: &BTreeMap<Symbol, Constant>) -> Result<Option<i64>> {
        match t.eval(subst) {
            Ok(Constant::Int(i)) => Ok(Some(i)),
            Ok(Constant::Sym(_)) | Err(EvalError::NonInteger(_)) | Err(EvalError::Unbound(_)) => Ok(None),
            Err(e @ EvalError::Overflow) => Err(self.eval_err(e)),
        }
    }

    /// Substitutes free occurrences and folds arithmetic that became ground.
    fn set_name(&self, s: &SetName, subst: &BTreeMap<Symbol, Constant>) -> Result<SetName> {
        let mut s = s.substitute(subst);
        let fold = |t: &mut Term| -> Result<()> {
            if t.is_arithmetic() && t.is_ground() {
                match t.eval(&BTreeMap::new()) {
                    Ok(c) => *t = Term::Const(c),
                    Err(e @ EvalError::Overflow) => return Err(self.eval_err(e)),
                    Err(_) => {}
                }
            }
            Ok(())
        };
        for c in &mut s.cond {
            match c {
                CondItem::Literal(l) => {
                    for t in &mut l.atom.args {
                        fold(t)?;
                    }
                }
                CondItem::Compare(cmp) => {
                    fold(&mut cmp.lhs)?;
                    fold(&mut cmp.rhs)?;
                }
            }
        }
        Ok(s)
    }

    fn instantiate(&self, rule: &Rule, subst: &BTreeMap<Symbol, Constant>) -> Result<Option<GroundRule>> {
        let head = match &rule.head {
            Head::Disjunction(lits) => {
                let mut out = Vec::with_capacity(lits.len());
                for l in lits {
                    match self.literal(l, subst)? {
                        Grounded::Ok(g) => out.push(g),
                        Grounded::Missing => {
                            log::warn!(
                                "rule {}: dropping an instance whose head leaves the constant universe",
                                self.rule
                            );
                            return Ok(None);
                        }
                    }
                }
                GroundHead::Disjunction(out)
            }
            Head::SubsetIntro(h) => GroundHead::SubsetIntro(SubsetIntroHead {
                predicate: h.predicate.clone(),
                rel: h.rel,
                rhs: self.set_name(&h.rhs, subst)?,
            }),
        };
        let mut body = Vec::with_capacity(rule.body.len());
        for e in &rule.body {
            let atom = match &e.atom {
                BodyAtom::Regular(l) => match self.literal(l, subst)? {
                    Grounded::Ok(g) => GroundBodyAtom::Regular(g),
                    // the atom can never be derived
                    Grounded::Missing if e.naf => continue,
                    Grounded::Missing => return Ok(None),
                },
                BodyAtom::Compare(c) => {
                    if self.comparison(c, subst)? {
                        continue;
                    }
                    return Ok(None);
                }
                BodyAtom::Aggregate(a) => {
                    let Some(guard) = self.guard(&a.atom.guard, subst)? else {
                        return Ok(None);
                    };
                    GroundBodyAtom::Aggregate(AggregateLiteral {
                        negated: a.negated,
                        atom: AggregateAtom {
                            func: a.atom.func,
                            set: self.set_name(&a.atom.set, subst)?,
                            rel: a.atom.rel,
                            guard,
                        },
                    })
                }
                BodyAtom::Set(s) => GroundBodyAtom::Set(SetAtom {
                    lhs: self.set_name(&s.lhs, subst)?,
                    rel: s.rel,
                    rhs: self.set_name(&s.rhs, subst)?,
                }),
            };
            body.push(GroundELiteral { naf: e.naf, atom });
        }
        Ok(Some(GroundRule { head, body }))
    }

    fn instantiate_flog(&self, rule: &Rule, subst: &BTreeMap<Symbol, Constant>) -> Result<Option<FlogRule>> {
        let mut head = Vec::new();
        for l in rule.head_literals() {
            match self.literal(l, subst)? {
                Grounded::Ok(g) => head.push(g.atom),
                Grounded::Missing => {
                    log::warn!(
                        "rule {}: dropping an instance whose head leaves the constant universe",
                        self.rule
                    );
                    return Ok(None);
                }
            }
        }
        let mut body = Vec::new();
        for e in &rule.body {
            let atom = match &e.atom {
                BodyAtom::Regular(l) => match self.literal(l, subst)? {
                    Grounded::Ok(g) => FlogBodyAtom::Regular(g.atom),
                    Grounded::Missing if e.naf => continue,
                    Grounded::Missing => return Ok(None),
                },
                BodyAtom::Compare(c) => {
                    if self.comparison(c, subst)? {
                        continue;
                    }
                    return Ok(None);
                }
                BodyAtom::Aggregate(a) => {
                    let Some(guard) = self.guard(&a.atom.guard, subst)? else {
                        return Ok(None);
                    };
                    let set = self.ground_set(&a.atom.set, subst)?;
                    FlogBodyAtom::Aggregate(FlogAggregate {
                        func: a.atom.func,
                        set,
                        rel: a.atom.rel,
                        guard,
                    })
                }
                BodyAtom::Set(_) => unreachable!("rejected before grounding"),
            };
            body.push(FlogELiteral { naf: e.naf, atom });
        }
        Ok(Some(FlogRule { head, body }))
    }

    /// Substitutes the global variables, bound positions included, then
    /// expands the remaining local variables.
    fn ground_set(&self, s: &SetName, globals: &BTreeMap<Symbol, Constant>) -> Result<GroundSet> {
        let template: Vec<Term> = s
            .vars
            .iter()
            .map(|v| match globals.get(v) {
                Some(c) => Term::Const(c.clone()),
                None => Term::Var(v.clone()),
            })
            .collect();
        let mut locals = BTreeSet::new();
        for t in &template {
            t.collect_vars(&mut locals);
        }
        for l in s.literals() {
            l.collect_vars(&mut locals);
        }
        for c in s.comparisons() {
            c.collect_vars(&mut locals);
        }
        locals.retain(|v| !globals.contains_key(v));
        let locals: Vec<Symbol> = locals.into_iter().collect();
        let mut elements = Vec::new();
        'each: for local in assignments(&locals, self.constants) {
            let mut full = globals.clone();
            full.extend(local);
            let mut conj = Vec::new();
            for c in &s.cond {
                match c {
                    CondItem::Compare(cmp) => {
                        if !self.comparison(cmp, &full)? {
                            continue 'each;
                        }
                    }
                    CondItem::Literal(l) => match self.literal(l, &full)? {
                        Grounded::Ok(g) => conj.push(g.atom),
                        Grounded::Missing => continue 'each,
                    },
                }
            }
            let tuple = template
                .iter()
                .map(|t| t.eval(&full).map_err(|e| self.eval_err(e)))
                .collect::<Result<Vec<_>>>()?;
            let el = (tuple, conj);
            if !elements.contains(&el) {
                elements.push(el);
            }
        }
        Ok(GroundSet { elements })
    }
}
