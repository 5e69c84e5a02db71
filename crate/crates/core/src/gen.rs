//! Seeded random programs for differential and property testing.
//!
//! Programs use the predicates `p`, `q`, `r` (arity 0 or 1) and up to four
//! constants, which are either `a`..`d` or `0`..`3` depending on the seed.
//! The same seed and configuration always yield the same program.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::*;

pub const PREDICATES: [&str; 3] = ["p", "q", "r"];

/// Syntactic fragment to draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    /// Classical negation, disjunction, set atoms and subset-introduction
    /// heads on top of everything else.
    Full,
    /// No classical negation or set constructs.
    Solver,
    /// Programs readable under both the reduct and the set-expansion
    /// semantics with the compatibility conditions between them.
    AfCompatible,
    /// Non-disjunctive, no default negation in front of aggregates, total
    /// aggregates only.
    Slog,
}

/// How rule heads may depend on predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layering {
    Free,
    /// A rule for the `i`-th predicate only mentions predicates `0..=i`.
    Layered,
    /// Layered, and aggregate predicates are strictly below the head.
    Stratified,
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub fragment: Fragment,
    pub layering: Layering,
    pub max_constants: usize,
    pub max_rules: usize,
    pub aggregate_freq: f64,
    /// Probability that an extra body literal is under default negation.
    pub naf_freq: f64,
    pub disjunctive: bool,
}

impl GenConfig {
    pub fn new(fragment: Fragment) -> Self {
        GenConfig {
            fragment,
            layering: Layering::Free,
            max_constants: 4,
            max_rules: 6,
            aggregate_freq: 0.4,
            naf_freq: 0.5,
            disjunctive: matches!(fragment, Fragment::Full | Fragment::Solver),
        }
    }

    pub fn layering(mut self, l: Layering) -> Self {
        self.layering = l;
        self
    }

    pub fn disjunctive(mut self, d: bool) -> Self {
        self.disjunctive = d;
        self
    }
}

struct Gen<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
    unary: [bool; 3],
    constants: Vec<Term>,
    ints: bool,
}

impl Gen<'_> {
    fn constant(&mut self) -> Term {
        self.constants
            .choose(&mut self.rng)
            .cloned()
            .expect("at least one constant")
    }

    fn atom(&mut self, pred: usize, var: Option<&str>) -> Atom {
        let args = if self.unary[pred] {
            match var {
                Some(v) if self.rng.gen_bool(0.7) => vec![Term::var(v)],
                _ => vec![self.constant()],
            }
        } else {
            Vec::new()
        };
        Atom::new(PREDICATES[pred], args)
    }

    fn literal(&mut self, pred: usize, var: Option<&str>) -> Literal {
        let a = self.atom(pred, var);
        if self.cfg.fragment == Fragment::Full && self.rng.gen_bool(0.1) {
            Literal::neg(a)
        } else {
            Literal::pos(a)
        }
    }

    /// Predicates a rule for `head` may use in its body, and those it may
    /// aggregate over.
    fn allowed(&self, head: Option<usize>) -> (Vec<usize>, Vec<usize>) {
        let all: Vec<usize> = (0..3).collect();
        match (self.cfg.layering, head) {
            (Layering::Free, _) | (_, None) => (all.clone(), all),
            (Layering::Layered, Some(h)) => ((0..=h).collect(), (0..=h).collect()),
            (Layering::Stratified, Some(h)) => ((0..=h).collect(), (0..h).collect()),
        }
    }

    fn unary_among(&self, preds: &[usize]) -> Vec<usize> {
        preds.iter().copied().filter(|&i| self.unary[i]).collect()
    }

    fn set_name(&mut self, pred: usize, bound: &str, free: Option<&str>) -> SetName {
        let mut cond = vec![CondItem::Literal(Literal::pos(Atom::new(
            PREDICATES[pred],
            vec![Term::var(bound)],
        )))];
        if let Some(x) = free {
            if self.rng.gen_bool(0.3) {
                cond.push(CondItem::Compare(Comparison {
                    lhs: Term::var(bound),
                    rel: Relation::Ne,
                    rhs: Term::var(x),
                }));
            }
        }
        SetName::new(&[bound], cond)
    }

    fn aggregate(&mut self, pred: usize, bound: &str, free: Option<&str>) -> ELiteral {
        use AggregateFunction::*;
        let funcs: &[AggregateFunction] = match self.cfg.fragment {
            Fragment::Full | Fragment::Solver if self.ints => &[Count, Count, Sum, Min, Max],
            Fragment::AfCompatible | Fragment::Slog if self.ints => &[Count, Count, Sum],
            _ => &[Count],
        };
        let func = *funcs.choose(&mut self.rng).unwrap();
        let guard = match func {
            Sum => self.rng.gen_range(0..=6),
            _ => self.rng.gen_range(0..=3),
        };
        let rel = *Relation::ALL.choose(&mut self.rng).unwrap();
        let set = self.set_name(pred, bound, free);
        let atom = AggregateAtom {
            func,
            set,
            rel,
            guard: Term::int(guard),
        };
        let naf = self.cfg.fragment != Fragment::Slog && self.rng.gen_bool(0.2);
        ELiteral {
            naf,
            atom: BodyAtom::Aggregate(AggregateLiteral::positive(atom)),
        }
    }

    fn rule(&mut self) -> Rule {
        let full = self.cfg.fragment == Fragment::Full;
        let constraint = self.rng.gen_bool(0.1);
        let head_pred = if constraint {
            None
        } else {
            Some(self.rng.gen_range(0..3))
        };
        let (body_preds, agg_preds) = self.allowed(head_pred);
        let body_unary = self.unary_among(&body_preds);
        let agg_unary = self.unary_among(&agg_preds);

        // X is the rule's only free variable; it is bound by a positive
        // body literal over a unary predicate
        let use_var = !body_unary.is_empty() && self.rng.gen_bool(0.5);
        let var = use_var.then_some("X");
        let mut body = Vec::new();
        if use_var {
            let d = *body_unary.choose(&mut self.rng).unwrap();
            body.push(ELiteral::pos(BodyAtom::Regular(Literal::pos(Atom::new(
                PREDICATES[d],
                vec![Term::var("X")],
            )))));
        }

        let head = match head_pred {
            None => Head::Disjunction(Vec::new()),
            Some(h) if full && self.unary[h] && self.rng.gen_bool(0.1) => {
                let src = self.unary_among(&agg_preds);
                match src.choose(&mut self.rng) {
                    Some(&s) => {
                        let rel = *[SetRelation::Eq, SetRelation::Subset, SetRelation::ProperSubset]
                            .choose(&mut self.rng)
                            .unwrap();
                        Head::SubsetIntro(SubsetIntroHead {
                            predicate: Symbol::new(PREDICATES[h]),
                            rel,
                            rhs: self.set_name(s, "Y", None),
                        })
                    }
                    None => Head::Disjunction(vec![self.literal(h, var)]),
                }
            }
            Some(h) => {
                let mut lits = vec![self.literal(h, var)];
                if self.cfg.disjunctive && self.rng.gen_bool(0.15) {
                    let other = if self.cfg.layering == Layering::Free {
                        self.rng.gen_range(0..3)
                    } else {
                        h
                    };
                    let l = self.literal(other, var);
                    if !lits.contains(&l) {
                        lits.push(l);
                    }
                }
                Head::Disjunction(lits)
            }
        };

        let extra = self.rng.gen_range(0..=2);
        for _ in 0..extra {
            let d = *body_preds.choose(&mut self.rng).unwrap();
            let l = self.literal(d, var);
            let naf = self.rng.gen_bool(self.cfg.naf_freq);
            body.push(ELiteral {
                naf,
                atom: BodyAtom::Regular(l),
            });
        }
        let bound_names = ["Y", "Z"];
        let mut n_agg = 0;
        while n_agg < 2 && !agg_unary.is_empty() && self.rng.gen_bool(self.cfg.aggregate_freq) {
            let d = *agg_unary.choose(&mut self.rng).unwrap();
            body.push(self.aggregate(d, bound_names[n_agg], var));
            n_agg += 1;
        }
        if full && !agg_unary.is_empty() && self.rng.gen_bool(0.15) {
            let l = *agg_unary.choose(&mut self.rng).unwrap();
            let r = *agg_unary.choose(&mut self.rng).unwrap();
            let rel = *[SetRelation::Eq, SetRelation::Subset, SetRelation::ProperSubset]
                .choose(&mut self.rng)
                .unwrap();
            let lhs = self.set_name(l, "W", None);
            let rhs = self.set_name(r, "W", None);
            body.push(ELiteral::pos(BodyAtom::Set(SetAtom { lhs, rel, rhs })));
        }
        if body.is_empty() && constraint {
            let d = self.rng.gen_range(0..3);
            let l = self.literal(d, None);
            body.push(ELiteral::pos(BodyAtom::Regular(l)));
        }
        body.shuffle(&mut self.rng);
        Rule { head, body }
    }

    /// `a :- not b. b :- not a.` over ground atoms.
    fn even_loop(&mut self) -> [Rule; 2] {
        let h = self.rng.gen_range(0..3);
        let other = if self.cfg.layering == Layering::Free {
            self.rng.gen_range(0..3)
        } else {
            h
        };
        let a = Literal::pos(self.atom(h, None));
        let b = Literal::pos(self.atom(other, None));
        let r = |x: &Literal, y: &Literal| Rule {
            head: Head::Disjunction(vec![x.clone()]),
            body: vec![ELiteral::not(BodyAtom::Regular(y.clone()))],
        };
        [r(&a, &b), r(&b, &a)]
    }

    fn fact(&mut self) -> Rule {
        let h = self.rng.gen_range(0..3);
        let mut lits = vec![self.literal(h, None)];
        if self.cfg.disjunctive && self.rng.gen_bool(0.3) {
            let other = if self.cfg.layering == Layering::Free {
                self.rng.gen_range(0..3)
            } else {
                h
            };
            let l = self.literal(other, None);
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        Rule {
            head: Head::Disjunction(lits),
            body: Vec::new(),
        }
    }
}

/// A random program drawn from `cfg` with the given seed.
pub fn random_program(cfg: &GenConfig, seed: u64) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unary = [false; 3];
    for u in &mut unary {
        *u = rng.gen_bool(0.75);
    }
    if !unary.iter().any(|&u| u) {
        unary[0] = true;
    }
    let ints = rng.gen_bool(0.3);
    let n = rng.gen_range(1..=cfg.max_constants.max(1));
    let constants: Vec<Term> = (0..n)
        .map(|i| {
            if ints {
                Term::int(i as i64)
            } else {
                Term::sym(&((b'a' + i as u8) as char).to_string())
            }
        })
        .collect();
    let mut g = Gen {
        cfg,
        rng,
        unary,
        constants,
        ints,
    };
    let n_rules = g.rng.gen_range(1..=cfg.max_rules.max(1));
    let mut rules = Vec::with_capacity(n_rules);
    while rules.len() < n_rules {
        if n_rules - rules.len() >= 2 && g.rng.gen_bool(0.1) {
            rules.extend(g.even_loop());
        } else if g.rng.gen_bool(0.35) {
            rules.push(g.fact());
        } else {
            rules.push(g.rule());
        }
    }
    Program::new(rules)
}
