//! Program analyses: aggregate stratification, compatibility between the
//! reduct and set-expansion semantics, splitting sets, and side-by-side
//! comparison of the three semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::alog;
use crate::error::{Error, Result};
use crate::flog;
use crate::grounder::{self, IntRange};
use crate::model::*;
use crate::slog;
use crate::Limits;

/// Predicate levels witnessing aggregate stratification.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LevelMapping(pub BTreeMap<Symbol, usize>);

impl LevelMapping {
    pub fn level(&self, p: &Symbol) -> usize {
        self.0.get(p).copied().unwrap_or(0)
    }

    /// Rechecks the three stratification conditions on every rule of `p`.
    pub fn witnesses(&self, p: &Program) -> bool {
        p.rules.iter().all(|r| {
            let deps = dependencies(r);
            deps.heads.iter().all(|a| {
                let la = self.level(a);
                deps.body.iter().all(|b| self.level(b) <= la)
                    && deps.aggregate.iter().all(|b| self.level(b) < la)
                    && deps.heads.iter().all(|b| self.level(b) == la)
            })
        })
    }
}

struct Dependencies {
    heads: BTreeSet<Symbol>,
    body: BTreeSet<Symbol>,
    aggregate: BTreeSet<Symbol>,
}

fn set_name_predicates(s: &SetName, out: &mut BTreeSet<Symbol>) {
    out.extend(s.literals().map(|l| l.atom.predicate.clone()));
}

fn dependencies(r: &Rule) -> Dependencies {
    let mut heads: BTreeSet<Symbol> = r.head_literals().iter().map(|l| l.atom.predicate.clone()).collect();
    let mut body = BTreeSet::new();
    let mut aggregate = BTreeSet::new();
    if let Head::SubsetIntro(h) = &r.head {
        heads.insert(h.predicate.clone());
        set_name_predicates(&h.rhs, &mut aggregate);
    }
    for e in &r.body {
        match &e.atom {
            BodyAtom::Regular(l) => {
                body.insert(l.atom.predicate.clone());
            }
            BodyAtom::Aggregate(a) => set_name_predicates(&a.atom.set, &mut aggregate),
            BodyAtom::Set(s) => {
                set_name_predicates(&s.lhs, &mut aggregate);
                set_name_predicates(&s.rhs, &mut aggregate);
            }
            BodyAtom::Compare(_) => {}
        }
    }
    body.extend(aggregate.iter().cloned());
    Dependencies { heads, body, aggregate }
}

/// A level mapping under which no predicate depends on itself through an
/// aggregate, or `None` when there is none.
///
/// Each rule contributes edges body → head (non-strict), aggregate
/// predicate → head (strict) and head ↔ head (non-strict both ways). A
/// mapping exists exactly when no strongly connected component contains a
/// strict edge: a strict edge inside a cycle forces `l < l`, and otherwise
/// ranking the components in topological order, adding one across strict
/// edges, satisfies every constraint.
pub fn aggregate_stratification(p: &Program) -> Option<LevelMapping> {
    let mut g: DiGraph<Symbol, bool> = DiGraph::new();
    let mut nodes: BTreeMap<Symbol, NodeIndex> = BTreeMap::new();
    let mut node =
        |g: &mut DiGraph<Symbol, bool>, s: &Symbol| *nodes.entry(s.clone()).or_insert_with(|| g.add_node(s.clone()));
    for pred in p.signature().predicates.keys() {
        node(&mut g, pred);
    }
    for r in &p.rules {
        let d = dependencies(r);
        for a in &d.heads {
            let ha = node(&mut g, a);
            for b in &d.body {
                let hb = node(&mut g, b);
                g.add_edge(hb, ha, d.aggregate.contains(b));
            }
            for b in &d.heads {
                let hb = node(&mut g, b);
                g.add_edge(hb, ha, false);
            }
        }
    }
    let sccs = tarjan_scc(&g);
    let mut component = vec![0usize; g.node_count()];
    for (k, scc) in sccs.iter().enumerate() {
        for n in scc {
            component[n.index()] = k;
        }
    }
    for e in g.edge_indices() {
        let (a, b) = g.edge_endpoints(e).unwrap();
        if g[e] && component[a.index()] == component[b.index()] {
            return None;
        }
    }
    // components come out in reverse topological order
    let mut level = vec![0usize; sccs.len()];
    for k in (0..sccs.len()).rev() {
        let mut l = 0;
        for n in &sccs[k] {
            for e in g.edges_directed(*n, petgraph::Direction::Incoming) {
                use petgraph::visit::EdgeRef;
                let src = component[e.source().index()];
                if src != k {
                    l = l.max(level[src] + usize::from(*e.weight()));
                }
            }
        }
        level[k] = l;
    }
    Some(LevelMapping(
        g.node_indices()
            .map(|n| (g[n].clone(), level[component[n.index()]]))
            .collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AfViolationKind {
    /// Set atoms, subset-introduction heads or classical negation.
    UnsupportedConstruct,
    /// A variable bound in two aggregate terms of one rule.
    SharedBoundVariable,
    /// A variable local to one set name that is not among its bound
    /// variables.
    FreeLocalVariable,
    PartialFunction,
    /// A free variable of an aggregate term missing from the rule's regular
    /// literals.
    UnanchoredFreeVariable,
    /// A bound variable that also occurs outside its aggregate term.
    BoundVariableOutside,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AfViolation {
    pub rule: usize,
    pub kind: AfViolationKind,
    pub detail: String,
}

impl fmt::Display for AfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: {}", self.rule + 1, self.detail)
    }
}

/// Checks whether `p` can be read under both the reduct and the
/// set-expansion semantics with matching answer sets guaranteed in one
/// direction.
///
/// Besides the four usual conditions (no variable bound in two aggregate
/// terms of a rule, no free local variables, total aggregate functions only,
/// free aggregate variables anchored in a regular literal) a bound variable
/// may not occur outside its aggregate term: the set-expansion grounder would
/// treat it as global and substitute it inside the set.
pub fn is_af_compatible(p: &Program) -> (bool, Vec<AfViolation>) {
    let mut out = Vec::new();
    let all_int = p.signature().constants.iter().all(|c| c.as_int().is_some());
    for (i, r) in p.rules.iter().enumerate() {
        let mut push = |kind, detail: String| out.push(AfViolation { rule: i, kind, detail });
        if matches!(r.head, Head::SubsetIntro(_)) || r.body.iter().any(|e| matches!(e.atom, BodyAtom::Set(_))) {
            push(AfViolationKind::UnsupportedConstruct, "set constructs".into());
        }
        let negated = r.head_literals().iter().any(|l| l.negated)
            || r.body.iter().any(|e| match &e.atom {
                BodyAtom::Regular(l) => l.negated,
                BodyAtom::Aggregate(a) => a.negated,
                _ => false,
            })
            || r.set_names().iter().any(|s| s.literals().any(|l| l.negated));
        if negated {
            push(AfViolationKind::UnsupportedConstruct, "classical negation".into());
        }

        let aggs: Vec<&AggregateAtom> = r
            .body
            .iter()
            .filter_map(|e| match &e.atom {
                BodyAtom::Aggregate(a) => Some(&a.atom),
                _ => None,
            })
            .collect();
        let globals: BTreeSet<Symbol> = grounder::global_vars(r).into_iter().collect();
        let mut anchored = BTreeSet::new();
        for l in r.head_literals() {
            l.collect_vars(&mut anchored);
        }
        for e in &r.body {
            if let BodyAtom::Regular(l) = &e.atom {
                l.collect_vars(&mut anchored);
            }
        }
        let mut bound_seen: BTreeSet<&Symbol> = BTreeSet::new();
        for a in &aggs {
            for v in &a.set.vars {
                if !bound_seen.insert(v) {
                    push(
                        AfViolationKind::SharedBoundVariable,
                        format!("`{v}` is bound in two aggregate terms"),
                    );
                }
            }
        }
        for a in &aggs {
            let mut vars = BTreeSet::new();
            a.set.all_vars(&mut vars);
            let bound: BTreeSet<&Symbol> = a.set.vars.iter().collect();
            for v in &vars {
                if !bound.contains(v) && !globals.contains(v) {
                    push(
                        AfViolationKind::FreeLocalVariable,
                        format!("`{v}` is local to one set name but free"),
                    );
                }
            }
            for v in a.set.free_vars() {
                if !anchored.contains(&v) {
                    push(
                        AfViolationKind::UnanchoredFreeVariable,
                        format!("`{v}` is free in an aggregate term but occurs in no regular literal"),
                    );
                }
            }
            for v in &a.set.vars {
                let outside = anchored.contains(v)
                    || r.body.iter().any(|e| match &e.atom {
                        BodyAtom::Compare(c) => {
                            let mut vs = BTreeSet::new();
                            c.collect_vars(&mut vs);
                            vs.contains(v)
                        }
                        _ => false,
                    });
                if outside {
                    push(
                        AfViolationKind::BoundVariableOutside,
                        format!("bound variable `{v}` also occurs outside its aggregate term"),
                    );
                }
            }
            let partial = match a.func {
                AggregateFunction::Count => false,
                AggregateFunction::Sum => !all_int,
                AggregateFunction::Min | AggregateFunction::Max => true,
            };
            if partial {
                push(
                    AfViolationKind::PartialFunction,
                    format!("`{}` is not total here", a.func.name()),
                );
            }
        }
    }
    (out.is_empty(), out)
}

fn occurring_literals(p: &GroundProgram, constants: &BTreeSet<Constant>) -> BTreeSet<GroundLiteral> {
    let mut out = BTreeSet::new();
    for r in &p.rules {
        out.extend(r.head_literals().iter().cloned());
        for e in &r.body {
            if let GroundBodyAtom::Regular(l) = &e.atom {
                out.insert(l.clone());
            }
        }
        for s in r.set_names() {
            for i in s.instances(constants) {
                out.extend(i.literals);
            }
        }
    }
    out
}

fn union(bottom: &GroundProgram, top: &GroundProgram) -> GroundProgram {
    let mut rules = bottom.rules.clone();
    rules.extend(top.rules.iter().cloned());
    let constants = bottom.constants.union(&top.constants).cloned().collect();
    GroundProgram { rules, constants }
}

/// Checks that `s` splits `bottom ∪ top`: no literal occurring in `bottom`,
/// explicitly or as an instance of a set-name literal, is a head literal of
/// `top`; `s` contains every literal occurring in `bottom` and no head
/// literal of `top`.
pub fn splitting_set_check(bottom: &GroundProgram, top: &GroundProgram, s: &BTreeSet<GroundLiteral>) -> Result<()> {
    let all = union(bottom, top);
    let occurring = occurring_literals(bottom, &all.constants);
    let top_heads = alog::candidate_universe(&GroundProgram {
        rules: top.rules.clone(),
        constants: all.constants.clone(),
    })?;
    if let Some(l) = occurring.intersection(&top_heads).next() {
        return Err(Error::InvalidSplit(format!(
            "`{l}` occurs in the bottom part and is a head literal of the top"
        )));
    }
    if let Some(l) = occurring.difference(s).next() {
        return Err(Error::InvalidSplit(format!(
            "`{l}` occurs in the bottom part but is missing from the set"
        )));
    }
    if let Some(l) = s.intersection(&top_heads).next() {
        return Err(Error::InvalidSplit(format!("`{l}` is a head literal of the top part")));
    }
    Ok(())
}

/// Answer sets of `bottom ∪ top` computed bottom-up: every answer set `b` of
/// `bottom` is added to `top` as facts and the answer sets `a` of the result
/// with `a ∩ s = b` are kept.
pub fn split_solve(
    bottom: &GroundProgram,
    top: &GroundProgram,
    s: &BTreeSet<GroundLiteral>,
    limits: &Limits,
) -> Result<Vec<LiteralSet>> {
    splitting_set_check(bottom, top, s)?;
    let all = union(bottom, top);
    let lower = GroundProgram {
        rules: bottom.rules.clone(),
        constants: all.constants.clone(),
    };
    let mut out = Vec::new();
    for b in alog::enumerate_answer_sets(&lower, limits)? {
        let mut rules: Vec<GroundRule> = b.iter().cloned().map(GroundRule::fact).collect();
        rules.extend(top.rules.iter().cloned());
        let upper = GroundProgram {
            rules,
            constants: all.constants.clone(),
        };
        for a in alog::enumerate_answer_sets(&upper, limits)? {
            if a.intersection(s) == b {
                out.push(a);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub semantics: &'static str,
    pub reason: String,
}

/// An answer set found by some semantics and missed by another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub answer_set: Vec<String>,
    pub found_by: Vec<&'static str>,
    pub missed_by: Vec<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub schema: &'static str,
    pub alog: Option<Vec<Vec<String>>>,
    pub flog: Option<Vec<Vec<String>>>,
    pub slog: Option<Vec<Vec<String>>>,
    pub inclusion_af: Option<bool>,
    pub inclusion_as: Option<bool>,
    pub equal_af: Option<bool>,
    pub equal_as: Option<bool>,
    pub equal_fs: Option<bool>,
    pub witnesses: Vec<Witness>,
    pub skipped: Vec<Skipped>,
    pub af_compatible: bool,
    pub aggregate_stratified: bool,
}

pub const REPORT_SCHEMA: &str = "alog-lab/1";

fn literal_strings(s: &LiteralSet) -> Vec<String> {
    s.iter().map(ToString::to_string).collect()
}

fn run_engine(
    name: &'static str,
    skipped: &mut Vec<Skipped>,
    f: impl FnOnce() -> Result<Vec<LiteralSet>>,
) -> Result<Option<BTreeSet<LiteralSet>>> {
    match f() {
        Ok(sets) => Ok(Some(sets.into_iter().collect())),
        Err(e @ (Error::CapExceeded { .. } | Error::Unsupported(_))) => {
            skipped.push(Skipped {
                semantics: name,
                reason: e.to_string(),
            });
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Enumerates the answer sets of `p` under each semantics whose fragment
/// contains it and compares the results.
pub fn compare_semantics(p: &Program, int_range: Option<IntRange>, limits: &Limits) -> Result<ComparisonReport> {
    let ground = grounder::ground_alog(p, int_range)?;
    let mut skipped = Vec::new();
    let alog_sets = run_engine("alog", &mut skipped, || alog::enumerate_answer_sets(&ground, limits))?;
    let flog_sets = run_engine("flog", &mut skipped, || {
        let g = grounder::ground_flog(p, int_range)?;
        flog::enumerate_answer_sets_flog(&g, limits)
    })?;
    let slog_sets = run_engine("slog", &mut skipped, || {
        let g = slog::SlogProgram::from_ground(&ground)?;
        slog::enumerate_answer_sets_slog(&g, limits)
    })?;

    let both = |a: &Option<BTreeSet<LiteralSet>>,
                b: &Option<BTreeSet<LiteralSet>>,
                f: fn(&BTreeSet<LiteralSet>, &BTreeSet<LiteralSet>) -> bool| {
        match (a, b) {
            (Some(a), Some(b)) => Some(f(a, b)),
            _ => None,
        }
    };
    let subset = |a: &BTreeSet<LiteralSet>, b: &BTreeSet<LiteralSet>| a.is_subset(b);
    let equal = |a: &BTreeSet<LiteralSet>, b: &BTreeSet<LiteralSet>| a == b;

    let engines: [(&'static str, &Option<BTreeSet<LiteralSet>>); 3] =
        [("alog", &alog_sets), ("flog", &flog_sets), ("slog", &slog_sets)];
    let mut all: BTreeSet<&LiteralSet> = BTreeSet::new();
    for (_, sets) in &engines {
        if let Some(s) = sets {
            all.extend(s.iter());
        }
    }
    let mut witnesses = Vec::new();
    for s in all {
        let mut found_by = Vec::new();
        let mut missed_by = Vec::new();
        for (name, sets) in &engines {
            if let Some(sets) = sets {
                if sets.contains(s) {
                    found_by.push(*name);
                } else {
                    missed_by.push(*name);
                }
            }
        }
        if !missed_by.is_empty() {
            witnesses.push(Witness {
                answer_set: literal_strings(s),
                found_by,
                missed_by,
            });
        }
    }

    let listing = |s: &Option<BTreeSet<LiteralSet>>| s.as_ref().map(|s| s.iter().map(literal_strings).collect());
    Ok(ComparisonReport {
        schema: REPORT_SCHEMA,
        inclusion_af: both(&alog_sets, &flog_sets, subset),
        inclusion_as: both(&alog_sets, &slog_sets, subset),
        equal_af: both(&alog_sets, &flog_sets, equal),
        equal_as: both(&alog_sets, &slog_sets, equal),
        equal_fs: both(&flog_sets, &slog_sets, equal),
        alog: listing(&alog_sets),
        flog: listing(&flog_sets),
        slog: listing(&slog_sets),
        witnesses,
        skipped,
        af_compatible: is_af_compatible(p).0,
        aggregate_stratified: aggregate_stratification(p).is_some(),
    })
}
