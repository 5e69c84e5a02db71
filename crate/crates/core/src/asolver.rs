//! Propagation and backtracking search for answer sets.
//!
//! The solver keeps a partial interpretation `I` (atoms known true or
//! false) and two sets of aggregate e-atoms, `TA` and `FA`, that must end up
//! true and false. [`ASolver::cons`] closes this state under four inference
//! rules; [`ASolver::solve`] branches on undecided atoms and confirms complete
//! interpretations with the reduct-based check from [`crate::alog`].
//!
//! Strong satisfaction and refutation of aggregates are decided by
//! enumerating every completion of the undecided atoms the aggregate depends
//! on, so their cost is exponential in that number.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alog::{self, Instances};
use crate::error::{Error, Result};
use crate::model::*;
use crate::parser::format;
use crate::Limits;

/// Aggregate atom, possibly under `not`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateEAtom {
    pub naf: bool,
    pub atom: GroundAggregate,
}

impl fmt::Display for AggregateEAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        format::aggregate(&mut s, &self.atom.to_syntax());
        if self.naf {
            write!(f, "not {s}")
        } else {
            f.write_str(&s)
        }
    }
}

/// Regular or aggregate e-atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EAtom {
    Regular { naf: bool, atom: GroundAtom },
    Aggregate(AggregateEAtom),
}

impl fmt::Display for EAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EAtom::Regular { naf: true, atom } => write!(f, "not {atom}"),
            EAtom::Regular { naf: false, atom } => write!(f, "{atom}"),
            EAtom::Aggregate(a) => write!(f, "{a}"),
        }
    }
}

/// Atoms known to be true and atoms known to be false.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialInterpretation {
    pub pos: BTreeSet<GroundAtom>,
    pub neg: BTreeSet<GroundAtom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Value {
    True,
    False,
    Undecided,
}

impl PartialInterpretation {
    pub fn is_consistent(&self) -> bool {
        self.pos.is_disjoint(&self.neg)
    }

    fn value(&self, a: &GroundAtom) -> Value {
        if self.pos.contains(a) {
            Value::True
        } else if self.neg.contains(a) {
            Value::False
        } else {
            Value::Undecided
        }
    }

    /// Adds a regular e-atom; returns whether it was new.
    fn add(&mut self, naf: bool, atom: &GroundAtom) -> bool {
        if naf {
            self.neg.insert(atom.clone())
        } else {
            self.pos.insert(atom.clone())
        }
    }

    pub fn atoms(&self) -> LiteralSet {
        self.pos.iter().cloned().map(GroundLiteral::pos).collect()
    }
}

impl fmt::Display for PartialInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<(&GroundAtom, bool)> = self
            .pos
            .iter()
            .map(|a| (a, true))
            .chain(self.neg.iter().map(|a| (a, false)))
            .collect();
        items.sort();
        f.write_str("{")?;
        for (i, (a, v)) in items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if !v {
                f.write_str("not ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// `I`, `TA` and `FA`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverState {
    pub interpretation: PartialInterpretation,
    pub ta: BTreeSet<AggregateEAtom>,
    pub fa: BTreeSet<AggregateEAtom>,
}

fn fmt_aggs(f: &mut fmt::Formatter<'_>, set: &BTreeSet<AggregateEAtom>) -> fmt::Result {
    f.write_str("{")?;
    for (i, a) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str("}")
}

impl fmt::Display for SolverState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I = {} TA = ", self.interpretation)?;
        fmt_aggs(f, &self.ta)?;
        f.write_str(" FA = ")?;
        fmt_aggs(f, &self.fa)
    }
}

/// Additions licensed by one inference rule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Delta {
    pub interpretation: Vec<(bool, GroundAtom)>,
    pub ta: Vec<AggregateEAtom>,
    pub fa: Vec<AggregateEAtom>,
}

impl Delta {
    pub fn is_empty(&self) -> bool {
        self.interpretation.is_empty() && self.ta.is_empty() && self.fa.is_empty()
    }
}

/// Why a propagation call failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conflict {
    Inconsistent,
    TaRefuted,
    FaSatisfied,
    RuleViolated(usize),
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conflict::Inconsistent => f.write_str("I is inconsistent"),
            Conflict::TaRefuted => f.write_str("TA is not compatible with I"),
            Conflict::FaSatisfied => f.write_str("FA is not compatible with I"),
            Conflict::RuleViolated(r) => write!(f, "rule r{} cannot be satisfied", r + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// Inference rule `inference` applied to program rule `rule` (absent for
    /// rule 4) added a regular e-atom to `I`.
    Derived {
        inference: u8,
        rule: Option<usize>,
        eatom: EAtom,
    },
    AddTa {
        inference: u8,
        rule: usize,
        eatom: AggregateEAtom,
    },
    AddFa {
        inference: u8,
        rule: usize,
        eatom: AggregateEAtom,
    },
    ConsOk(SolverState),
    ConsFailed(Conflict),
    Decide {
        atom: GroundAtom,
        value: bool,
    },
    Complete {
        atoms: LiteralSet,
        answer_set: bool,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let on = |rule: &Option<usize>| match rule {
            Some(r) => format!(" on r{}", r + 1),
            None => String::new(),
        };
        match self {
            TraceEvent::Derived { inference, rule, eatom } => {
                write!(f, "cons: rule {inference}{} derives {eatom}", on(rule))
            }
            TraceEvent::AddTa { inference, rule, eatom } => {
                write!(f, "cons: rule {inference} on r{} adds {eatom} to TA", rule + 1)
            }
            TraceEvent::AddFa { inference, rule, eatom } => {
                write!(f, "cons: rule {inference} on r{} adds {eatom} to FA", rule + 1)
            }
            TraceEvent::ConsOk(s) => write!(f, "cons: ok {s}"),
            TraceEvent::ConsFailed(c) => write!(f, "cons: fail ({c})"),
            TraceEvent::Decide { atom, value: true } => write!(f, "decide: {atom}"),
            TraceEvent::Decide { atom, value: false } => write!(f, "decide: not {atom}"),
            TraceEvent::Complete { atoms, answer_set } => {
                write!(
                    f,
                    "complete: {{{atoms}}} is {}an answer set",
                    if *answer_set { "" } else { "not " }
                )
            }
        }
    }
}

struct SolverRule {
    head: Vec<GroundAtom>,
    body: Vec<EAtom>,
}

/// Solver over one ground program without classical negation and set
/// constructs.
pub struct ASolver<'a> {
    program: &'a GroundProgram,
    inst: Instances<'a>,
    rules: Vec<SolverRule>,
    universe: Vec<GroundAtom>,
    heads: BTreeMap<GroundAtom, Vec<usize>>,
    limits: Limits,
    rng: Option<ChaCha8Rng>,
    trace: Option<Vec<TraceEvent>>,
}

impl<'a> ASolver<'a> {
    pub fn new(program: &'a GroundProgram, limits: Limits) -> Result<Self> {
        if program.has_set_constructs() {
            return Err(Error::Unsupported(
                "set atoms and subset-introduction heads in the solver".into(),
            ));
        }
        if program.has_classical_negation() {
            return Err(Error::Unsupported("classical negation in the solver".into()));
        }
        let inst = Instances::new(program)?;
        let mut rules = Vec::with_capacity(program.rules.len());
        let mut universe = Vec::new();
        let mut seen = BTreeSet::new();
        let mut note = |a: &GroundAtom, universe: &mut Vec<GroundAtom>| {
            if seen.insert(a.clone()) {
                universe.push(a.clone());
            }
        };
        let mut heads: BTreeMap<GroundAtom, Vec<usize>> = BTreeMap::new();
        for (i, r) in program.rules.iter().enumerate() {
            let head: Vec<GroundAtom> = r.head_literals().iter().map(|l| l.atom.clone()).collect();
            for a in &head {
                note(a, &mut universe);
                let entry = heads.entry(a.clone()).or_default();
                if !entry.contains(&i) {
                    entry.push(i);
                }
            }
            let mut body = Vec::with_capacity(r.body.len());
            for e in &r.body {
                match &e.atom {
                    GroundBodyAtom::Regular(l) => {
                        note(&l.atom, &mut universe);
                        body.push(EAtom::Regular {
                            naf: e.naf,
                            atom: l.atom.clone(),
                        });
                    }
                    GroundBodyAtom::Aggregate(a) => {
                        for i in inst.of(&a.atom.set).iter() {
                            for l in &i.literals {
                                note(&l.atom, &mut universe);
                            }
                        }
                        body.push(EAtom::Aggregate(AggregateEAtom {
                            naf: e.naf,
                            atom: a.atom.clone(),
                        }));
                    }
                    GroundBodyAtom::Set(_) => unreachable!("rejected above"),
                }
            }
            rules.push(SolverRule { head, body });
        }
        Ok(ASolver {
            program,
            inst,
            rules,
            universe,
            heads,
            limits,
            rng: None,
            trace: None,
        })
    }

    /// Randomizes the order in which inference rules are tried in each
    /// propagation round.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng = Some(ChaCha8Rng::seed_from_u64(seed));
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    fn emit(&mut self, e: TraceEvent) {
        if let Some(t) = &mut self.trace {
            t.push(e);
        }
    }

    /// Atoms of the program in order of first occurrence.
    pub fn universe(&self) -> &[GroundAtom] {
        &self.universe
    }

    fn base_atoms(&self, a: &GroundAggregate) -> Vec<GroundAtom> {
        let mut out: Vec<GroundAtom> = Vec::new();
        for i in self.inst.of(&a.set).iter() {
            for l in &i.literals {
                if !out.contains(&l.atom) {
                    out.push(l.atom.clone());
                }
            }
        }
        out
    }

    fn aggregate_true(&self, a: &AggregateEAtom, atoms: &LiteralSet) -> bool {
        let v = self.inst.aggregate(&a.atom, atoms);
        if a.naf {
            v != TruthValue::True
        } else {
            v == TruthValue::True
        }
    }

    /// Calls `f` on `atoms(I)` extended by every subset of the undecided
    /// atoms in `relevant`, stopping early when `f` returns false. Returns
    /// whether every call returned true.
    fn for_each_completion(
        &self,
        i: &PartialInterpretation,
        relevant: &[GroundAtom],
        forced: &BTreeSet<GroundAtom>,
        mut f: impl FnMut(&LiteralSet) -> bool,
    ) -> Result<bool> {
        let open: Vec<&GroundAtom> = relevant
            .iter()
            .filter(|a| i.value(a) == Value::Undecided && !forced.contains(*a))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if open.len() > self.limits.max_completion_atoms {
            return Err(Error::CapExceeded {
                what: "strong satisfaction check",
                size: open.len(),
                cap: self.limits.max_completion_atoms,
            });
        }
        let mut base = i.atoms();
        for a in forced {
            base.insert(GroundLiteral::pos(a.clone()));
        }
        for mask in 0u64..(1u64 << open.len()) {
            let mut s = base.clone();
            for (k, a) in open.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    s.insert(GroundLiteral::pos((*a).clone()));
                }
            }
            if !f(&s) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True in every total extension of `i`.
    pub fn strongly_satisfied(&self, e: &EAtom, i: &PartialInterpretation) -> Result<bool> {
        match e {
            EAtom::Regular { naf, atom } => Ok(i.value(atom) == if *naf { Value::False } else { Value::True }),
            EAtom::Aggregate(a) => {
                let rel = self.base_atoms(&a.atom);
                self.for_each_completion(i, &rel, &BTreeSet::new(), |s| self.aggregate_true(a, s))
            }
        }
    }

    /// False or undefined in every total extension of `i`.
    pub fn strongly_refuted(&self, e: &EAtom, i: &PartialInterpretation) -> Result<bool> {
        match e {
            EAtom::Regular { naf, atom } => Ok(i.value(atom) == if *naf { Value::True } else { Value::False }),
            EAtom::Aggregate(a) => {
                let rel = self.base_atoms(&a.atom);
                self.for_each_completion(i, &rel, &BTreeSet::new(), |s| !self.aggregate_true(a, s))
            }
        }
    }

    /// Every total extension of `i` makes some member of `set` false.
    pub fn set_strongly_refuted(&self, set: &[EAtom], i: &PartialInterpretation) -> Result<bool> {
        let mut forced = BTreeSet::new();
        let mut relevant = Vec::new();
        let mut aggs = Vec::new();
        for e in set {
            match e {
                EAtom::Regular { naf, atom } => match (i.value(atom), naf) {
                    (Value::False, false) | (Value::True, true) => return Ok(true),
                    (Value::Undecided, false) => {
                        forced.insert(atom.clone());
                    }
                    (Value::Undecided, true) => relevant.push(atom.clone()),
                    _ => {}
                },
                EAtom::Aggregate(a) => {
                    relevant.extend(self.base_atoms(&a.atom));
                    aggs.push(a);
                }
            }
        }
        // extensions making a regular member false already refute the set;
        // the rest must make every aggregate true to escape refutation
        let negated: BTreeSet<&GroundAtom> = set
            .iter()
            .filter_map(|e| match e {
                EAtom::Regular { naf: true, atom } => Some(atom),
                _ => None,
            })
            .collect();
        if negated.iter().any(|a| forced.contains(*a)) {
            return Ok(true);
        }
        relevant.retain(|a| !negated.contains(a));
        self.for_each_completion(i, &relevant, &forced, |s| {
            !aggs.iter().all(|a| self.aggregate_true(a, s))
        })
    }

    fn ta_compatible(&self, st: &SolverState) -> Result<bool> {
        let set: Vec<EAtom> = st.ta.iter().cloned().map(EAtom::Aggregate).collect();
        Ok(set.is_empty() || !self.set_strongly_refuted(&set, &st.interpretation)?)
    }

    fn fa_compatible(&self, st: &SolverState) -> Result<bool> {
        for a in &st.fa {
            if self.strongly_satisfied(&EAtom::Aggregate(a.clone()), &st.interpretation)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn body_strongly_satisfied(&self, body: &[EAtom], i: &PartialInterpretation) -> Result<bool> {
        for e in body {
            if !self.strongly_satisfied(e, i)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Additions licensed by inference rule `which` (1 to 4) applied to
    /// program rule `r`. Rule 4 ignores `r` and looks at every atom.
    pub fn icons(&self, which: u8, st: &SolverState, r: usize) -> Result<Delta> {
        if which == 4 {
            return self.unsupported_atoms(st);
        }
        let i = &st.interpretation;
        let rule = &self.rules[r];
        let mut d = Delta::default();
        match which {
            1 => {
                if self.body_strongly_satisfied(&rule.body, i)? {
                    for (k, p) in rule.head.iter().enumerate() {
                        let others_false = rule
                            .head
                            .iter()
                            .enumerate()
                            .all(|(j, q)| j == k || i.value(q) == Value::False);
                        if others_false && i.value(p) != Value::True {
                            d.interpretation.push((false, p.clone()));
                        }
                    }
                }
            }
            2 => {
                for p in &rule.head {
                    if i.value(p) != Value::True || self.heads.get(p).map_or(0, Vec::len) != 1 {
                        continue;
                    }
                    for q in &rule.head {
                        if q != p && i.value(q) != Value::False {
                            d.interpretation.push((true, q.clone()));
                        }
                    }
                    for e in &rule.body {
                        match e {
                            EAtom::Regular { naf, atom } => {
                                let want = if *naf { Value::False } else { Value::True };
                                if i.value(atom) != want {
                                    d.interpretation.push((*naf, atom.clone()));
                                }
                            }
                            EAtom::Aggregate(a) => {
                                if !st.ta.contains(a) {
                                    d.ta.push(a.clone());
                                }
                            }
                        }
                    }
                }
            }
            3 => {
                if rule.head.iter().all(|p| i.value(p) == Value::False) {
                    let open: Vec<usize> = rule
                        .body
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| match e {
                            EAtom::Regular { atom, .. } => i.value(atom) == Value::Undecided,
                            EAtom::Aggregate(a) => !st.fa.contains(a),
                        })
                        .map(|(k, _)| k)
                        .collect();
                    if let [only] = open.as_slice() {
                        let rest: Vec<EAtom> = rule
                            .body
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| k != only)
                            .map(|(_, e)| e.clone())
                            .collect();
                        if self.body_strongly_satisfied(&rest, i)? {
                            match &rule.body[*only] {
                                EAtom::Regular { naf, atom } => d.interpretation.push((!naf, atom.clone())),
                                EAtom::Aggregate(a) => d.fa.push(a.clone()),
                            }
                        }
                    }
                }
            }
            _ => panic!("inference rules are numbered 1 to 4"),
        }
        Ok(d)
    }

    /// Inference rule 4: atoms whose every defining rule has a strongly
    /// refuted body are false.
    fn unsupported_atoms(&self, st: &SolverState) -> Result<Delta> {
        let i = &st.interpretation;
        let mut d = Delta::default();
        for p in &self.universe {
            if i.value(p) == Value::False {
                continue;
            }
            let mut all_refuted = true;
            for &k in self.heads.get(p).map(Vec::as_slice).unwrap_or(&[]) {
                if !self.set_strongly_refuted(&self.rules[k].body, i)? {
                    all_refuted = false;
                    break;
                }
            }
            if all_refuted {
                d.interpretation.push((true, p.clone()));
            }
        }
        Ok(d)
    }

    fn apply(&mut self, st: &mut SolverState, which: u8, r: Option<usize>, d: Delta) -> bool {
        let mut changed = false;
        for (naf, atom) in d.interpretation {
            if st.interpretation.add(naf, &atom) {
                changed = true;
                self.emit(TraceEvent::Derived {
                    inference: which,
                    rule: r,
                    eatom: EAtom::Regular { naf, atom },
                });
            }
        }
        let rule = r.unwrap_or_default();
        for a in d.ta {
            if st.ta.insert(a.clone()) {
                changed = true;
                self.emit(TraceEvent::AddTa {
                    inference: which,
                    rule,
                    eatom: a,
                });
            }
        }
        for a in d.fa {
            if st.fa.insert(a.clone()) {
                changed = true;
                self.emit(TraceEvent::AddFa {
                    inference: which,
                    rule,
                    eatom: a,
                });
            }
        }
        changed
    }

    /// Closes `st` under the inference rules. On failure the input state is
    /// returned together with the conflict.
    ///
    /// Inputs that are already incompatible fail before any propagation.
    /// Compatibility only gets harder as `I` grows, so the outcome is the
    /// same and the trace matches the failing branch of a search directly.
    pub fn cons(&mut self, st: &SolverState) -> Result<std::result::Result<SolverState, Conflict>> {
        if let Some(c) = self.conflict(st)? {
            self.emit(TraceEvent::ConsFailed(c));
            return Ok(Err(c));
        }
        let mut cur = st.clone();
        let mut order = [1u8, 2, 3, 4];
        loop {
            if let Some(rng) = &mut self.rng {
                order.shuffle(rng);
            }
            let mut changed = false;
            for &which in &order {
                if which == 4 {
                    let d = self.icons(4, &cur, 0)?;
                    changed |= self.apply(&mut cur, 4, None, d);
                } else {
                    for r in 0..self.rules.len() {
                        let d = self.icons(which, &cur, r)?;
                        changed |= self.apply(&mut cur, which, Some(r), d);
                    }
                }
                if !cur.interpretation.is_consistent() {
                    break;
                }
            }
            if !changed || !cur.interpretation.is_consistent() {
                break;
            }
        }
        match self.conflict(&cur)? {
            Some(c) => {
                self.emit(TraceEvent::ConsFailed(c));
                Ok(Err(c))
            }
            None => {
                self.emit(TraceEvent::ConsOk(cur.clone()));
                Ok(Ok(cur))
            }
        }
    }

    fn conflict(&self, st: &SolverState) -> Result<Option<Conflict>> {
        Ok(if !st.interpretation.is_consistent() {
            Some(Conflict::Inconsistent)
        } else if !self.ta_compatible(st)? {
            Some(Conflict::TaRefuted)
        } else if !self.fa_compatible(st)? {
            Some(Conflict::FaSatisfied)
        } else {
            self.violated_rule(st)?.map(Conflict::RuleViolated)
        })
    }

    /// A rule whose body is strongly satisfied while every head atom is
    /// false cannot hold in any extension.
    fn violated_rule(&self, st: &SolverState) -> Result<Option<usize>> {
        let i = &st.interpretation;
        for (k, r) in self.rules.iter().enumerate() {
            if r.head.iter().all(|p| i.value(p) == Value::False) && self.body_strongly_satisfied(&r.body, i)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Whether the atoms of a complete interpretation form an answer set.
    pub fn is_answer_set_check(&self, i: &PartialInterpretation) -> Result<bool> {
        alog::is_answer_set(self.program, &i.atoms(), &self.limits)
    }

    /// Searches for an answer set compatible with `st`.
    pub fn solve(&mut self, st: &SolverState) -> Result<Option<LiteralSet>> {
        let st = match self.cons(st)? {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        let i = &st.interpretation;
        let Some(p) = self.universe.iter().find(|a| i.value(a) == Value::Undecided).cloned() else {
            let ok = self.is_answer_set_check(i)?;
            let atoms = i.atoms();
            self.emit(TraceEvent::Complete {
                atoms: atoms.clone(),
                answer_set: ok,
            });
            return Ok(ok.then_some(atoms));
        };
        for value in [true, false] {
            let mut next = st.clone();
            next.interpretation.add(!value, &p);
            self.emit(TraceEvent::Decide { atom: p.clone(), value });
            if let Some(a) = self.solve(&next)? {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }
}

/// Finds one answer set of `p`, or `None` when there is none.
pub fn solve(p: &GroundProgram, limits: &Limits) -> Result<Option<LiteralSet>> {
    ASolver::new(p, *limits)?.solve(&SolverState::default())
}
