//! Answer sets as subset-minimal models of the body-satisfaction reduct,
//! over programs whose aggregates range over explicit ground sets.

use std::collections::BTreeSet;
use std::fmt;

use crate::alog::apply_aggregate;
use crate::error::{Error, Result};
use crate::model::*;
use crate::Limits;

/// `{c1 : conj1; ...; cn : conjn}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundSet {
    pub elements: Vec<(Vec<Constant>, Vec<GroundAtom>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlogAggregate {
    pub func: AggregateFunction,
    pub set: GroundSet,
    pub rel: Relation,
    pub guard: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlogBodyAtom {
    Regular(GroundAtom),
    Aggregate(FlogAggregate),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlogELiteral {
    pub naf: bool,
    pub atom: FlogBodyAtom,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlogRule {
    pub head: Vec<GroundAtom>,
    pub body: Vec<FlogELiteral>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlogProgram {
    pub rules: Vec<FlogRule>,
    pub constants: BTreeSet<Constant>,
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (tuple, conj)) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, c) in tuple.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", ConstDisplay(c))?;
            }
            f.write_str(" : ")?;
            for (j, a) in conj.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Display for FlogRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(" or ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.body.is_empty() {
            f.write_str(if self.head.is_empty() { ":- " } else { " :- " })?;
        }
        for (i, e) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if e.naf {
                f.write_str("not ")?;
            }
            match &e.atom {
                FlogBodyAtom::Regular(a) => write!(f, "{a}")?,
                FlogBodyAtom::Aggregate(a) => write!(f, "{}{} {} {}", a.func.name(), a.set, a.rel.symbol(), a.guard)?,
            }
        }
        f.write_str(".")
    }
}

impl fmt::Display for FlogProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn holds(a: &GroundAtom, s: &LiteralSet) -> bool {
    s.contains(&GroundLiteral::pos(a.clone()))
}

/// Tuples of the elements whose conjunction holds in `a`.
pub fn flog_extent(gs: &GroundSet, a: &LiteralSet) -> BTreeSet<Vec<Constant>> {
    gs.elements
        .iter()
        .filter(|(_, conj)| conj.iter().all(|x| holds(x, a)))
        .map(|(t, _)| t.clone())
        .collect()
}

/// Satisfaction of a body element. An aggregate, negated or not, is only
/// satisfied when its function is defined on the extent.
pub fn flog_sat(e: &FlogELiteral, a: &LiteralSet) -> bool {
    match &e.atom {
        FlogBodyAtom::Regular(x) => holds(x, a) != e.naf,
        FlogBodyAtom::Aggregate(agg) => match apply_aggregate(agg.func, &flog_extent(&agg.set, a)) {
            Some(v) => agg.rel.holds(&v, &agg.guard) != e.naf,
            None => false,
        },
    }
}

fn body_sat(r: &FlogRule, a: &LiteralSet) -> bool {
    r.body.iter().all(|e| flog_sat(e, a))
}

fn is_model(rules: &[&FlogRule], a: &LiteralSet) -> bool {
    rules
        .iter()
        .all(|r| !body_sat(r, a) || r.head.iter().any(|h| holds(h, a)))
}

/// The rules whose whole body `a` satisfies, unchanged.
pub fn flog_reduct(p: &FlogProgram, a: &LiteralSet) -> FlogProgram {
    FlogProgram {
        rules: p.rules.iter().filter(|r| body_sat(r, a)).cloned().collect(),
        constants: p.constants.clone(),
    }
}

/// `a` is a subset-minimal model of the reduct of `p` relative to `a`.
pub fn is_answer_set_flog(p: &FlogProgram, a: &LiteralSet, limits: &Limits) -> Result<bool> {
    if a.iter().any(|l| l.negated) {
        return Ok(false);
    }
    let reduct: Vec<&FlogRule> = p.rules.iter().filter(|r| body_sat(r, a)).collect();
    if !is_model(&reduct, a) {
        return Ok(false);
    }
    if a.len() > limits.max_minimality_atoms {
        return Err(Error::CapExceeded {
            what: "minimality check",
            size: a.len(),
            cap: limits.max_minimality_atoms,
        });
    }
    let atoms: Vec<&GroundLiteral> = a.iter().collect();
    let full = (1u64 << atoms.len()) - 1;
    for mask in 0..full {
        let b: LiteralSet = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| (*l).clone())
            .collect();
        if is_model(&reduct, &b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All answer sets, sorted, over subsets of the head atoms containing the
/// facts.
pub fn enumerate_answer_sets_flog(p: &FlogProgram, limits: &Limits) -> Result<Vec<LiteralSet>> {
    let universe: BTreeSet<GroundLiteral> = p
        .rules
        .iter()
        .flat_map(|r| r.head.iter().cloned().map(GroundLiteral::pos))
        .collect();
    let facts: LiteralSet = p
        .rules
        .iter()
        .filter(|r| r.body.is_empty() && r.head.len() == 1)
        .map(|r| GroundLiteral::pos(r.head[0].clone()))
        .collect();
    let free: Vec<&GroundLiteral> = universe.iter().filter(|l| !facts.contains(l)).collect();
    limits.check_candidates(free.len())?;
    let all: Vec<&FlogRule> = p.rules.iter().collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut s = facts.clone();
        for (i, l) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.insert((*l).clone());
            }
        }
        // a model of the reduct is a model of the program: the other rules
        // have unsatisfied bodies
        if is_model(&all, &s) && is_answer_set_flog(p, &s, limits)? {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground_flog;
    use crate::parser::{parse_ground_literals, parse_program};

    fn ground(src: &str) -> FlogProgram {
        ground_flog(&parse_program(src).unwrap(), None).unwrap()
    }

    fn set(src: &str) -> LiteralSet {
        parse_ground_literals(src).unwrap()
    }

    fn answer_sets(src: &str) -> Vec<String> {
        enumerate_answer_sets_flog(&ground(src), &Limits::default())
            .unwrap()
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn first_aggregate(p: &FlogProgram) -> FlogAggregate {
        p.rules
            .iter()
            .flat_map(|r| &r.body)
            .find_map(|e| match &e.atom {
                FlogBodyAtom::Aggregate(a) => Some(a.clone()),
                _ => None,
            })
            .unwrap()
    }

    const COUNT_PER_GROUP: &str = "q(Y) :- card{X:p(X,Y)} = 1, r(Y). r(a). r(b). p(a,b).";
    const COUNT_LOOP: &str = "p(1) :- p(0). p(0) :- p(1). p(1) :- count{X:p(X)} != 1.";

    #[test]
    fn extents() {
        let gs = GroundSet {
            elements: vec![(
                vec![Constant::sym("a")],
                vec![GroundAtom::new("p", vec!["a".into(), "b".into()])],
            )],
        };
        assert_eq!(
            flog_extent(&gs, &set("p(a,b)")),
            [vec![Constant::sym("a")]].into_iter().collect()
        );
        let count_loop = ground(COUNT_LOOP);
        let agg = first_aggregate(&count_loop);
        assert_eq!(flog_extent(&agg.set, &set("p(0),p(1)")).len(), 2);
        assert!(flog_extent(&agg.set, &set("")).is_empty());
    }

    #[test]
    fn satisfaction() {
        let per_group = ground(COUNT_PER_GROUP);
        // second q rule ranges over p(X,b)
        let agg = per_group.rules[1].body[0].clone();
        assert!(flog_sat(&agg, &set("p(a,b)")));
        let p = ground("q :- not min{X : p(X)} = 1. p(1).");
        assert!(!flog_sat(&p.rules[0].body[0], &set("")));
        assert!(!flog_sat(&p.rules[0].body[0], &set("p(1)")));
        let p = ground("q :- not min{X : p(X)} = 2. p(1).");
        assert!(flog_sat(&p.rules[0].body[0], &set("p(1)")));
    }

    #[test]
    fn reducts() {
        let per_group = ground(COUNT_PER_GROUP);
        let r = flog_reduct(&per_group, &set("r(a),r(b),p(a,b),q(b)"));
        assert_eq!(
            r.to_string(),
            "q(b) :- count{a : p(a,b); b : p(b,b)} = 1, r(b).\nr(a).\nr(b).\np(a,b).\n"
        );
        let count_loop = ground(COUNT_LOOP);
        assert_eq!(flog_reduct(&count_loop, &set("p(0),p(1)")), count_loop);
    }

    #[test]
    fn p6_has_the_circular_answer_set() {
        let count_loop = ground(COUNT_LOOP);
        assert!(is_answer_set_flog(&count_loop, &set("p(0),p(1)"), &Limits::default()).unwrap());
        assert_eq!(answer_sets(COUNT_LOOP), vec!["p(0) p(1)"]);
    }

    #[test]
    fn p3_and_disjunctive_example() {
        assert_eq!(
            answer_sets("r :- card{X:p(X)} >= 2, q(X). p(a). p(b). q(a)."),
            vec!["p(a) p(b) q(a)"]
        );
    }

    #[test]
    fn disjunctive_nonmonotone_example() {
        // with ground set {0 : p(0); 1 : p(1)}, {b, p(1)} leaves the first
        // rule out of its reduct and {b} is a smaller model
        let src = "p(1) :- count{X:p(X)} != 1, b. b or c.";
        let g = ground_flog(&parse_program(src).unwrap(), Some(crate::grounder::IntRange::new(0, 1))).unwrap();
        let sets = enumerate_answer_sets_flog(&g, &Limits::default()).unwrap();
        assert_eq!(sets, vec![set("c")]);
        assert!(!is_answer_set_flog(&g, &set("b,p(1)"), &Limits::default()).unwrap());
        // closing the cycle through p(0) gives the extra set
        let src = "p(1) :- p(0). p(0) :- p(1). p(1) :- count{X:p(X)} != 1, b. b or c.";
        assert_eq!(answer_sets(src), vec!["b p(0) p(1)", "c"]);
    }
}
