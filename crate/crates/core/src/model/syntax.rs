//! Non-ground abstract syntax.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::EvalError;

/// Interned-ish name of a predicate, a symbolic constant or a variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl serde::Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Object constant. Integers order before symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Int(i64),
    Sym(Symbol),
}

impl Constant {
    pub fn sym(name: &str) -> Self {
        Constant::Sym(Symbol::new(name))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Constant::Int(i) => Some(*i),
            Constant::Sym(_) => None,
        }
    }
}

impl From<i64> for Constant {
    fn from(i: i64) -> Self {
        Constant::Int(i)
    }
}

impl From<&str> for Constant {
    fn from(s: &str) -> Self {
        Constant::sym(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Symbol),
    Const(Constant),
    Neg(Box<Term>),
    BinOp(ArithOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Symbol::new(name))
    }

    pub fn sym(name: &str) -> Self {
        Term::Const(Constant::sym(name))
    }

    pub fn int(i: i64) -> Self {
        Term::Const(Constant::Int(i))
    }

    pub fn is_arithmetic(&self) -> bool {
        matches!(self, Term::Neg(_) | Term::BinOp(..))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::Neg(t) => t.is_ground(),
            Term::BinOp(_, a, b) => a.is_ground() && b.is_ground(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Neg(t) => t.collect_vars(out),
            Term::BinOp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Replaces variables found in `subst`; other variables stay.
    pub fn substitute(&self, subst: &BTreeMap<Symbol, Constant>) -> Term {
        match self {
            Term::Var(v) => match subst.get(v) {
                Some(c) => Term::Const(c.clone()),
                None => self.clone(),
            },
            Term::Const(_) => self.clone(),
            Term::Neg(t) => Term::Neg(Box::new(t.substitute(subst))),
            Term::BinOp(op, a, b) => Term::BinOp(*op, Box::new(a.substitute(subst)), Box::new(b.substitute(subst))),
        }
    }

    /// Evaluates the term under `subst`. Arithmetic requires integer operands.
    pub fn eval(&self, subst: &BTreeMap<Symbol, Constant>) -> Result<Constant, EvalError> {
        match self {
            Term::Var(v) => subst.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.clone())),
            Term::Const(c) => Ok(c.clone()),
            Term::Neg(t) => {
                let v = t.eval(subst)?;
                let i = v.as_int().ok_or(EvalError::NonInteger(v.clone()))?;
                i.checked_neg().map(Constant::Int).ok_or(EvalError::Overflow)
            }
            Term::BinOp(op, a, b) => {
                let a = a.eval(subst)?;
                let b = b.eval(subst)?;
                let x = a.as_int().ok_or(EvalError::NonInteger(a.clone()))?;
                let y = b.as_int().ok_or(EvalError::NonInteger(b.clone()))?;
                op.apply(x, y).map(Constant::Int).ok_or(EvalError::Overflow)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom {
            predicate: Symbol::new(predicate),
            args,
        }
    }

    pub fn substitute(&self, subst: &BTreeMap<Symbol, Constant>) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|t| t.substitute(subst)).collect(),
        }
    }
}

/// A regular literal: an atom, possibly classically negated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub negated: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { negated: false, atom }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { negated: true, atom }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        for t in &self.atom.args {
            t.collect_vars(out);
        }
    }

    pub fn substitute(&self, subst: &BTreeMap<Symbol, Constant>) -> Literal {
        Literal {
            negated: self.negated,
            atom: self.atom.substitute(subst),
        }
    }
}

/// Arithmetic relation used by aggregate guards and comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    Ne,
}

impl Relation {
    /// The relation holding exactly when `self` fails.
    pub fn complement(self) -> Relation {
        match self {
            Relation::Gt => Relation::Le,
            Relation::Ge => Relation::Lt,
            Relation::Lt => Relation::Ge,
            Relation::Le => Relation::Gt,
            Relation::Eq => Relation::Ne,
            Relation::Ne => Relation::Eq,
        }
    }

    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        let ord = lhs.cmp(rhs);
        match self {
            Relation::Gt => ord == Ordering::Greater,
            Relation::Ge => ord != Ordering::Less,
            Relation::Lt => ord == Ordering::Less,
            Relation::Le => ord != Ordering::Greater,
            Relation::Eq => ord == Ordering::Equal,
            Relation::Ne => ord != Ordering::Equal,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
        }
    }

    pub const ALL: [Relation; 6] = [
        Relation::Gt,
        Relation::Ge,
        Relation::Lt,
        Relation::Le,
        Relation::Eq,
        Relation::Ne,
    ];
}

/// Built-in comparison `lhs rel rhs`, evaluated on constants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comparison {
    pub lhs: Term,
    pub rel: Relation,
    pub rhs: Term,
}

impl Comparison {
    pub fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        self.lhs.collect_vars(out);
        self.rhs.collect_vars(out);
    }

    pub fn substitute(&self, subst: &BTreeMap<Symbol, Constant>) -> Comparison {
        Comparison {
            lhs: self.lhs.substitute(subst),
            rel: self.rel,
            rhs: self.rhs.substitute(subst),
        }
    }

    pub fn eval(&self, subst: &BTreeMap<Symbol, Constant>) -> Result<bool, EvalError> {
        let l = self.lhs.eval(subst)?;
        let r = self.rhs.eval(subst)?;
        Ok(self.rel.holds(&l, &r))
    }
}

/// Member of a set-name condition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CondItem {
    Literal(Literal),
    Compare(Comparison),
}

/// `{X1,...,Xn : cond}`; the listed variables are bound inside the name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetName {
    pub vars: Vec<Symbol>,
    pub cond: Vec<CondItem>,
}

impl SetName {
    pub fn new(vars: &[&str], cond: Vec<CondItem>) -> Self {
        SetName {
            vars: vars.iter().map(|v| Symbol::new(v)).collect(),
            cond,
        }
    }

    /// Shorthand for `{X1..Xn : p(X1..Xn)}`.
    pub fn of_predicate(predicate: &Symbol, vars: &[Symbol]) -> Self {
        SetName {
            vars: vars.to_vec(),
            cond: vec![CondItem::Literal(Literal::pos(Atom {
                predicate: predicate.clone(),
                args: vars.iter().map(|v| Term::Var(v.clone())).collect(),
            }))],
        }
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.cond.iter().filter_map(|c| match c {
            CondItem::Literal(l) => Some(l),
            CondItem::Compare(_) => None,
        })
    }

    pub fn comparisons(&self) -> impl Iterator<Item = &Comparison> {
        self.cond.iter().filter_map(|c| match c {
            CondItem::Compare(c) => Some(c),
            CondItem::Literal(_) => None,
        })
    }

    /// Variables occurring in the condition but not listed as bound.
    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut all = BTreeSet::new();
        for c in &self.cond {
            match c {
                CondItem::Literal(l) => l.collect_vars(&mut all),
                CondItem::Compare(c) => c.collect_vars(&mut all),
            }
        }
        for v in &self.vars {
            all.remove(v);
        }
        all
    }

    pub fn all_vars(&self, out: &mut BTreeSet<Symbol>) {
        out.extend(self.vars.iter().cloned());
        for c in &self.cond {
            match c {
                CondItem::Literal(l) => l.collect_vars(out),
                CondItem::Compare(c) => c.collect_vars(out),
            }
        }
    }

    /// Substitutes free occurrences only; bound variables shadow `subst`.
    pub fn substitute(&self, subst: &BTreeMap<Symbol, Constant>) -> SetName {
        let mut inner = subst.clone();
        for v in &self.vars {
            inner.remove(v);
        }
        SetName {
            vars: self.vars.clone(),
            cond: self
                .cond
                .iter()
                .map(|c| match c {
                    CondItem::Literal(l) => CondItem::Literal(l.substitute(&inner)),
                    CondItem::Compare(c) => CondItem::Compare(c.substitute(&inner)),
                })
                .collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggregateFunction {
    Count,
    Sum,
    Min,
    Max,
}

impl AggregateFunction {
    pub fn name(self) -> &'static str {
        match self {
            AggregateFunction::Count => "count",
            AggregateFunction::Sum => "sum",
            AggregateFunction::Min => "min",
            AggregateFunction::Max => "max",
        }
    }

    /// Parses a function name; `card` is an alias of `count`.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "count" | "card" => Some(AggregateFunction::Count),
            "sum" => Some(AggregateFunction::Sum),
            "min" => Some(AggregateFunction::Min),
            "max" => Some(AggregateFunction::Max),
            _ => None,
        }
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, AggregateFunction::Count)
    }
}

/// `f{X : cond} rel guard`. The guard is a [`Term`] before grounding and an
/// integer afterwards.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateAtom<G = Term> {
    pub func: AggregateFunction,
    pub set: SetName,
    pub rel: Relation,
    pub guard: G,
}

/// Aggregate atom, possibly classically negated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateLiteral<G = Term> {
    pub negated: bool,
    pub atom: AggregateAtom<G>,
}

impl<G: Clone> AggregateLiteral<G> {
    pub fn positive(atom: AggregateAtom<G>) -> Self {
        AggregateLiteral { negated: false, atom }
    }

    /// The atom with the complementary relation that replaces `¬atom`.
    ///
    /// Fails when the literal is not classically negated.
    pub fn positive_form(&self) -> Result<AggregateAtom<G>, crate::Error> {
        if !self.negated {
            return Err(crate::Error::Unsupported(
                "positive form requires a classically negated aggregate literal".into(),
            ));
        }
        Ok(self.normalized())
    }

    /// The equivalent unnegated atom (identity for unnegated literals).
    pub fn normalized(&self) -> AggregateAtom<G> {
        let mut atom = self.atom.clone();
        if self.negated {
            atom.rel = atom.rel.complement();
        }
        atom
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetRelation {
    Eq,
    Subset,
    ProperSubset,
}

impl SetRelation {
    pub fn symbol(self) -> &'static str {
        match self {
            SetRelation::Eq => "=",
            SetRelation::Subset => "<=",
            SetRelation::ProperSubset => "<",
        }
    }

    pub fn holds<T: Ord>(self, lhs: &BTreeSet<T>, rhs: &BTreeSet<T>) -> bool {
        match self {
            SetRelation::Eq => lhs == rhs,
            SetRelation::Subset => lhs.is_subset(rhs),
            SetRelation::ProperSubset => lhs.len() < rhs.len() && lhs.is_subset(rhs),
        }
    }
}

/// `{X:c1} rel {Y:c2}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetAtom {
    pub lhs: SetName,
    pub rel: SetRelation,
    pub rhs: SetName,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyAtom {
    Regular(Literal),
    Aggregate(AggregateLiteral),
    Set(SetAtom),
    Compare(Comparison),
}

/// Body element, optionally under default negation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ELiteral {
    pub naf: bool,
    pub atom: BodyAtom,
}

impl ELiteral {
    pub fn pos(atom: BodyAtom) -> Self {
        ELiteral { naf: false, atom }
    }

    pub fn not(atom: BodyAtom) -> Self {
        ELiteral { naf: true, atom }
    }
}

/// `p rel {X : q(X)}` in a rule head.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetIntroHead {
    pub predicate: Symbol,
    pub rel: SetRelation,
    pub rhs: SetName,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    Disjunction(Vec<Literal>),
    SubsetIntro(SubsetIntroHead),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<ELiteral>,
}

impl Rule {
    pub fn head_literals(&self) -> &[Literal] {
        match &self.head {
            Head::Disjunction(h) => h,
            Head::SubsetIntro(_) => &[],
        }
    }

    /// Every set name occurring in the rule.
    pub fn set_names(&self) -> Vec<&SetName> {
        let mut out = Vec::new();
        if let Head::SubsetIntro(h) = &self.head {
            out.push(&h.rhs);
        }
        for e in &self.body {
            match &e.atom {
                BodyAtom::Aggregate(a) => out.push(&a.atom.set),
                BodyAtom::Set(s) => {
                    out.push(&s.lhs);
                    out.push(&s.rhs);
                }
                BodyAtom::Regular(_) | BodyAtom::Compare(_) => {}
            }
        }
        out
    }

    /// Variables with an occurrence outside the bound positions of set names,
    /// in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Symbol> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut push = |vs: BTreeSet<Symbol>, order: &mut Vec<Symbol>| {
            for v in vs {
                if seen.insert(v.clone()) {
                    order.push(v);
                }
            }
        };
        for l in self.head_literals() {
            let mut vs = BTreeSet::new();
            l.collect_vars(&mut vs);
            push(vs, &mut order);
        }
        if let Head::SubsetIntro(h) = &self.head {
            push(h.rhs.free_vars(), &mut order);
        }
        for e in &self.body {
            let mut vs = BTreeSet::new();
            match &e.atom {
                BodyAtom::Regular(l) => l.collect_vars(&mut vs),
                BodyAtom::Compare(c) => c.collect_vars(&mut vs),
                BodyAtom::Aggregate(a) => {
                    vs.extend(a.atom.set.free_vars());
                    a.atom.guard.collect_vars(&mut vs);
                }
                BodyAtom::Set(s) => {
                    vs.extend(s.lhs.free_vars());
                    vs.extend(s.rhs.free_vars());
                }
            }
            push(vs, &mut order);
        }
        order
    }

    pub fn is_constraint(&self) -> bool {
        matches!(&self.head, Head::Disjunction(h) if h.is_empty())
    }
}

/// Byte range plus the 1-based line and column of its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Predicates with their arities plus the constants occurring in a program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<Symbol, usize>,
    pub constants: BTreeSet<Constant>,
}

/// A finite sequence of rules. Source spans are kept on the side and do not
/// take part in equality.
#[derive(Clone, Debug, Default)]
pub struct Program {
    pub rules: Vec<Rule>,
    spans: Vec<SourceSpan>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}

impl Eq for Program {}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program {
            rules,
            spans: Vec::new(),
        }
    }

    pub(crate) fn with_spans(rules: Vec<Rule>, spans: Vec<SourceSpan>) -> Self {
        debug_assert_eq!(rules.len(), spans.len());
        Program { rules, spans }
    }

    pub fn span(&self, rule: usize) -> Option<SourceSpan> {
        self.spans.get(rule).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        let lit = |l: &Literal, sig: &mut Signature| {
            sig.predicates.insert(l.atom.predicate.clone(), l.atom.args.len());
            for t in &l.atom.args {
                match t {
                    Term::Const(c) => {
                        sig.constants.insert(c.clone());
                    }
                    t if t.is_ground() => {
                        if let Ok(c) = t.eval(&BTreeMap::new()) {
                            sig.constants.insert(c);
                        }
                    }
                    _ => {}
                }
            }
        };
        for r in &self.rules {
            for l in r.head_literals() {
                lit(l, &mut sig);
            }
            if let Head::SubsetIntro(h) = &r.head {
                sig.predicates.insert(h.predicate.clone(), h.rhs.vars.len());
            }
            for s in r.set_names() {
                for l in s.literals() {
                    lit(l, &mut sig);
                }
            }
            for e in &r.body {
                if let BodyAtom::Regular(l) = &e.atom {
                    lit(l, &mut sig);
                }
            }
        }
        sig
    }

    pub fn has_classical_negation(&self) -> bool {
        self.rules.iter().any(|r| {
            r.head_literals().iter().any(|l| l.negated)
                || r.set_names().iter().any(|s| s.literals().any(|l| l.negated))
                || r.body.iter().any(|e| match &e.atom {
                    BodyAtom::Regular(l) => l.negated,
                    BodyAtom::Aggregate(a) => a.negated,
                    _ => false,
                })
        })
    }

    pub fn has_set_constructs(&self) -> bool {
        self.rules.iter().any(|r| {
            matches!(r.head, Head::SubsetIntro(_)) || r.body.iter().any(|e| matches!(e.atom, BodyAtom::Set(_)))
        })
    }

    pub fn is_disjunctive(&self) -> bool {
        self.rules.iter().any(|r| r.head_literals().len() > 1)
    }
}
