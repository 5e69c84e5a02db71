//! Ground atoms, literal sets and ground rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: Symbol,
    pub args: Vec<Constant>,
}

impl GroundAtom {
    pub fn new(predicate: &str, args: Vec<Constant>) -> Self {
        GroundAtom {
            predicate: Symbol::new(predicate),
            args,
        }
    }

    /// Nullary atom.
    pub fn prop(predicate: &str) -> Self {
        GroundAtom::new(predicate, Vec::new())
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().cloned().map(Term::Const).collect(),
        }
    }

    /// Converts an atom whose arguments evaluate without variables.
    pub fn from_atom(atom: &Atom) -> Option<GroundAtom> {
        let empty = BTreeMap::new();
        let args = atom
            .args
            .iter()
            .map(|t| t.eval(&empty).ok())
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom {
            predicate: atom.predicate.clone(),
            args,
        })
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", ConstDisplay(a))?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

pub(crate) struct ConstDisplay<'a>(pub &'a Constant);

impl fmt::Display for ConstDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Constant::Int(i) => write!(f, "{i}"),
            Constant::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// Ground regular literal. Ordered by atom first so that `p` and `-p` sit
/// next to each other.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundLiteral {
    pub negated: bool,
    pub atom: GroundAtom,
}

impl Ord for GroundLiteral {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.atom.cmp(&other.atom).then(self.negated.cmp(&other.negated))
    }
}

impl PartialOrd for GroundLiteral {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl GroundLiteral {
    pub fn pos(atom: GroundAtom) -> Self {
        GroundLiteral { negated: false, atom }
    }

    pub fn neg(atom: GroundAtom) -> Self {
        GroundLiteral { negated: true, atom }
    }

    pub fn complement(&self) -> GroundLiteral {
        GroundLiteral {
            negated: !self.negated,
            atom: self.atom.clone(),
        }
    }

    pub fn to_literal(&self) -> Literal {
        Literal {
            negated: self.negated,
            atom: self.atom.to_atom(),
        }
    }

    pub fn from_literal(l: &Literal) -> Option<GroundLiteral> {
        Some(GroundLiteral {
            negated: l.negated,
            atom: GroundAtom::from_atom(&l.atom)?,
        })
    }
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// A set of ground regular literals (a candidate or actual answer set).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiteralSet(pub BTreeSet<GroundLiteral>);

impl LiteralSet {
    pub fn new() -> Self {
        LiteralSet(BTreeSet::new())
    }

    pub fn contains(&self, l: &GroundLiteral) -> bool {
        self.0.contains(l)
    }

    pub fn insert(&mut self, l: GroundLiteral) -> bool {
        self.0.insert(l)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundLiteral> {
        self.0.iter()
    }

    /// No literal occurs together with its complement.
    pub fn is_consistent(&self) -> bool {
        self.0.iter().all(|l| !l.negated || !self.0.contains(&l.complement()))
    }

    pub fn is_subset(&self, other: &LiteralSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &BTreeSet<GroundLiteral>) -> LiteralSet {
        LiteralSet(self.0.intersection(other).cloned().collect())
    }

    /// Argument tuples `t` with `p(t)` in the set.
    pub fn positive_tuples(&self, predicate: &Symbol) -> BTreeSet<Vec<Constant>> {
        self.0
            .iter()
            .filter(|l| !l.negated && &l.atom.predicate == predicate)
            .map(|l| l.atom.args.clone())
            .collect()
    }
}

impl FromIterator<GroundLiteral> for LiteralSet {
    fn from_iter<I: IntoIterator<Item = GroundLiteral>>(iter: I) -> Self {
        LiteralSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a LiteralSet {
    type Item = &'a GroundLiteral;
    type IntoIter = std::collections::btree_set::Iter<'a, GroundLiteral>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for LiteralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TruthValue {
    True,
    False,
    Undefined,
}

impl TruthValue {
    pub fn is_true(self) -> bool {
        self == TruthValue::True
    }
}

/// One instance of a set name: the bound tuple and the ground condition
/// literals it requires.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SetInstance {
    pub tuple: Vec<Constant>,
    pub literals: Vec<GroundLiteral>,
}

impl SetName {
    /// All instances over `constants`: every assignment of the bound
    /// variables whose comparisons hold. Literal arguments that fail to
    /// evaluate (arithmetic over symbols) drop the instance.
    ///
    /// The set name must not have free variables.
    pub fn instances(&self, constants: &BTreeSet<Constant>) -> Vec<SetInstance> {
        let consts: Vec<&Constant> = constants.iter().collect();
        let n = self.vars.len();
        let mut out = Vec::new();
        if n > 0 && consts.is_empty() {
            return out;
        }
        let mut idx = vec![0usize; n];
        loop {
            let subst: BTreeMap<Symbol, Constant> = self
                .vars
                .iter()
                .cloned()
                .zip(idx.iter().map(|&i| consts[i].clone()))
                .collect();
            if let Some(inst) = self.instance_for(&subst) {
                out.push(inst);
            }
            // odometer over the bound variables
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < consts.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn instance_for(&self, subst: &BTreeMap<Symbol, Constant>) -> Option<SetInstance> {
        let mut literals = Vec::new();
        for c in &self.cond {
            match c {
                CondItem::Compare(cmp) => {
                    if !cmp.eval(subst).ok()? {
                        return None;
                    }
                }
                CondItem::Literal(l) => {
                    let args = l
                        .atom
                        .args
                        .iter()
                        .map(|t| t.eval(subst).ok())
                        .collect::<Option<Vec<_>>>()?;
                    literals.push(GroundLiteral {
                        negated: l.negated,
                        atom: GroundAtom {
                            predicate: l.atom.predicate.clone(),
                            args,
                        },
                    });
                }
            }
        }
        let tuple = self.vars.iter().map(|v| subst[v].clone()).collect();
        Some(SetInstance { tuple, literals })
    }

    /// Whether `l` is a ground instance of some literal of the condition.
    pub fn has_instance(&self, l: &GroundLiteral) -> bool {
        self.literals().any(|pat| matches_literal(pat, l))
    }
}

fn matches_literal(pat: &Literal, l: &GroundLiteral) -> bool {
    if pat.negated != l.negated || pat.atom.predicate != l.atom.predicate || pat.atom.args.len() != l.atom.args.len() {
        return false;
    }
    let mut binding: BTreeMap<&Symbol, &Constant> = BTreeMap::new();
    for (t, c) in pat.atom.args.iter().zip(&l.atom.args) {
        match t {
            Term::Const(k) => {
                if k != c {
                    return false;
                }
            }
            Term::Var(v) => {
                if let Some(prev) = binding.insert(v, c) {
                    if prev != c {
                        return false;
                    }
                }
            }
            t => match t.eval(&BTreeMap::new()) {
                Ok(k) if &k == c => {}
                // arithmetic over bound variables: accept conservatively
                Err(_) => {}
                _ => return false,
            },
        }
    }
    true
}

/// Tuples of the instances whose literals all belong to `s`.
pub fn extent<'a>(instances: &'a [SetInstance], s: &'a LiteralSet) -> impl Iterator<Item = &'a SetInstance> + 'a {
    instances
        .iter()
        .filter(move |i| i.literals.iter().all(|l| s.contains(l)))
}

/// Ground aggregate atom: free variables substituted, guard evaluated.
pub type GroundAggregate = AggregateAtom<i64>;

impl GroundAggregate {
    pub fn to_syntax(&self) -> AggregateAtom {
        AggregateAtom {
            func: self.func,
            set: self.set.clone(),
            rel: self.rel,
            guard: Term::int(self.guard),
        }
    }
}

impl AggregateLiteral<i64> {
    pub fn to_syntax(&self) -> AggregateLiteral {
        AggregateLiteral {
            negated: self.negated,
            atom: self.atom.to_syntax(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundBodyAtom {
    Regular(GroundLiteral),
    Aggregate(AggregateLiteral<i64>),
    Set(SetAtom),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundELiteral {
    pub naf: bool,
    pub atom: GroundBodyAtom,
}

impl GroundELiteral {
    pub fn pos(l: GroundLiteral) -> Self {
        GroundELiteral {
            naf: false,
            atom: GroundBodyAtom::Regular(l),
        }
    }

    pub fn not(l: GroundLiteral) -> Self {
        GroundELiteral {
            naf: true,
            atom: GroundBodyAtom::Regular(l),
        }
    }

    pub fn to_syntax(&self) -> ELiteral {
        let atom = match &self.atom {
            GroundBodyAtom::Regular(l) => BodyAtom::Regular(l.to_literal()),
            GroundBodyAtom::Aggregate(a) => BodyAtom::Aggregate(a.to_syntax()),
            GroundBodyAtom::Set(s) => BodyAtom::Set(s.clone()),
        };
        ELiteral { naf: self.naf, atom }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundHead {
    Disjunction(Vec<GroundLiteral>),
    SubsetIntro(SubsetIntroHead),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub head: GroundHead,
    pub body: Vec<GroundELiteral>,
}

impl GroundRule {
    pub fn fact(l: GroundLiteral) -> Self {
        GroundRule {
            head: GroundHead::Disjunction(vec![l]),
            body: Vec::new(),
        }
    }

    pub fn head_literals(&self) -> &[GroundLiteral] {
        match &self.head {
            GroundHead::Disjunction(h) => h,
            GroundHead::SubsetIntro(_) => &[],
        }
    }

    pub fn to_syntax(&self) -> Rule {
        let head = match &self.head {
            GroundHead::Disjunction(h) => Head::Disjunction(h.iter().map(GroundLiteral::to_literal).collect()),
            GroundHead::SubsetIntro(s) => Head::SubsetIntro(s.clone()),
        };
        Rule {
            head,
            body: self.body.iter().map(GroundELiteral::to_syntax).collect(),
        }
    }

    pub fn set_names(&self) -> Vec<&SetName> {
        let mut out = Vec::new();
        if let GroundHead::SubsetIntro(h) = &self.head {
            out.push(&h.rhs);
        }
        for e in &self.body {
            match &e.atom {
                GroundBodyAtom::Aggregate(a) => out.push(&a.atom.set),
                GroundBodyAtom::Set(s) => {
                    out.push(&s.lhs);
                    out.push(&s.rhs);
                }
                GroundBodyAtom::Regular(_) => {}
            }
        }
        out
    }

    pub fn has_aggregates(&self) -> bool {
        self.body.iter().any(|e| matches!(e.atom, GroundBodyAtom::Aggregate(_)))
    }
}

/// How a ground literal occurs in a ground rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occurrence {
    Explicit,
    Implicit,
    None,
}

/// Explicit when `l` is a head or body member (possibly under `not`),
/// implicit when it is an instance of a literal inside a set name.
pub fn literal_occurs_in_rule(l: &GroundLiteral, r: &GroundRule) -> Occurrence {
    let explicit = r.head_literals().contains(l)
        || r.body
            .iter()
            .any(|e| matches!(&e.atom, GroundBodyAtom::Regular(b) if b == l));
    if explicit {
        return Occurrence::Explicit;
    }
    if let GroundHead::SubsetIntro(h) = &r.head {
        if !l.negated && l.atom.predicate == h.predicate && l.atom.args.len() == h.rhs.vars.len() {
            return Occurrence::Implicit;
        }
    }
    if r.set_names().iter().any(|s| s.has_instance(l)) {
        Occurrence::Implicit
    } else {
        Occurrence::None
    }
}

/// Ground program together with the constant universe it was grounded over.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub constants: BTreeSet<Constant>,
}

impl GroundProgram {
    pub fn new(rules: Vec<GroundRule>, constants: BTreeSet<Constant>) -> Self {
        GroundProgram { rules, constants }
    }

    pub fn to_program(&self) -> Program {
        Program::new(self.rules.iter().map(GroundRule::to_syntax).collect())
    }

    pub fn has_classical_negation(&self) -> bool {
        self.to_program().has_classical_negation()
    }

    pub fn has_set_constructs(&self) -> bool {
        self.rules.iter().any(|r| {
            matches!(r.head, GroundHead::SubsetIntro(_))
                || r.body.iter().any(|e| matches!(e.atom, GroundBodyAtom::Set(_)))
        })
    }

    pub fn is_disjunctive(&self) -> bool {
        self.rules.iter().any(|r| r.head_literals().len() > 1)
    }
}
