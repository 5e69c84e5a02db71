//! Concrete text syntax.
//!
//! ```text
//! need_ta(C) :- course(C), count{X : enrolled(C,X)} > 20.
//! ready(S) :- student(S), {C : taken(S,C)} <= {C : required(C)}.
//! p <= {X : q(X)} :- r.
//! q(a) or p(b).
//! :- p(a), not q.
//! ```

pub(crate) mod format;
mod lexer;

use std::collections::{BTreeMap, BTreeSet};

pub use format::{format_program, format_rule};

use crate::error::{Error, Result};
use crate::model::*;
use lexer::{tokenize, Tok, Token};

/// Parses a whole program.
pub fn parse_program(text: &str) -> Result<Program> {
    let mut p = Parser::new(text)?;
    let mut rules = Vec::new();
    let mut spans = Vec::new();
    while p.peek() != &Tok::Eof {
        let start = p.span();
        let rule = p.rule()?;
        let end = p.prev_end;
        spans.push(SourceSpan { end, ..start });
        rules.push(rule);
    }
    check_arities(&rules, &spans)?;
    Ok(Program::with_spans(rules, spans))
}

/// Parses a single regular literal such as `-p(a,1)`.
pub fn parse_literal(text: &str) -> Result<Literal> {
    let mut p = Parser::new(text)?;
    let l = p.literal()?;
    p.expect(Tok::Eof)?;
    Ok(l)
}

/// Parses a list of ground literals separated by commas or whitespace, e.g.
/// `p(0),p(1)` or `p(0) p(1)` as printed by [`LiteralSet`]'s `Display`.
pub fn parse_ground_literals(text: &str) -> Result<LiteralSet> {
    let mut p = Parser::new(text)?;
    let mut out = LiteralSet::new();
    while p.peek() != &Tok::Eof {
        let span = p.span();
        let l = p.literal()?;
        let g = GroundLiteral::from_literal(&l).ok_or_else(|| Error::Parse {
            message: "expected a ground literal".into(),
            span,
        })?;
        out.insert(g);
        if p.eat(&Tok::Comma) && p.peek() == &Tok::Eof {
            return Err(Error::Parse {
                message: "expected a literal after `,`".into(),
                span: p.span(),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    prev_end: usize,
}

fn relation_of(t: &Tok) -> Option<Relation> {
    Some(match t {
        Tok::Gt => Relation::Gt,
        Tok::Ge => Relation::Ge,
        Tok::Lt => Relation::Lt,
        Tok::Le => Relation::Le,
        Tok::Eq => Relation::Eq,
        Tok::Ne => Relation::Ne,
        _ => return None,
    })
}

fn set_relation_of(t: &Tok) -> Option<SetRelation> {
    Some(match t {
        Tok::Eq => SetRelation::Eq,
        Tok::Le => SetRelation::Subset,
        Tok::Lt => SetRelation::ProperSubset,
        _ => return None,
    })
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            prev_end: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        self.prev_end = t.span.end;
        t.tok
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            message: message.into(),
            span: self.span(),
        })
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T> {
        self.error(format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            let want = t.describe();
            self.unexpected(&want)
        }
    }

    fn is_keyword(&self, k: usize, word: &str) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if s == word)
    }

    fn rule(&mut self) -> Result<Rule> {
        let head = if self.peek() == &Tok::If {
            Head::Disjunction(Vec::new())
        } else {
            self.head()?
        };
        let mut body = Vec::new();
        if self.eat(&Tok::If) {
            if self.peek() == &Tok::Dot {
                return self.error("empty rule body after `:-`");
            }
            loop {
                body.push(self.eliteral()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Dot)?;
        Ok(Rule { head, body })
    }

    fn head(&mut self) -> Result<Head> {
        if self.is_keyword(0, "not") {
            return self.error("default negation is not allowed in a rule head");
        }
        if let Tok::Var(v) = self.peek() {
            if set_relation_of(self.peek_at(1)).is_some() && self.peek_at(2) == &Tok::LBrace {
                return self.error(format!(
                    "subset-introduction predicate `{v}` must start with a lowercase letter"
                ));
            }
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(rel) = set_relation_of(self.peek_at(1)) {
                if self.peek_at(2) == &Tok::LBrace {
                    self.bump();
                    self.bump();
                    let rhs = self.set_name()?;
                    return Ok(Head::SubsetIntro(SubsetIntroHead {
                        predicate: Symbol::new(&name),
                        rel,
                        rhs,
                    }));
                }
            }
        }
        let mut lits = vec![self.literal()?];
        while self.eat_disjunction() {
            if self.is_keyword(0, "not") {
                return self.error("default negation is not allowed in a rule head");
            }
            lits.push(self.literal()?);
        }
        Ok(Head::Disjunction(lits))
    }

    fn eat_disjunction(&mut self) -> bool {
        if self.eat(&Tok::Bar) {
            return true;
        }
        if self.is_keyword(0, "or") {
            self.bump();
            return true;
        }
        false
    }

    fn literal(&mut self) -> Result<Literal> {
        let negated = self.eat(&Tok::Minus);
        let atom = self.atom()?;
        Ok(Literal { negated, atom })
    }

    fn atom(&mut self) -> Result<Atom> {
        let name = match self.peek() {
            Tok::Ident(s) if s != "not" && s != "or" => s.clone(),
            _ => return self.unexpected("a predicate name"),
        };
        self.bump();
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(Atom {
            predicate: Symbol::new(&name),
            args,
        })
    }

    fn aggregate_ahead(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if AggregateFunction::from_name(s).is_some())
            && self.peek_at(k + 1) == &Tok::LBrace
    }

    fn eliteral(&mut self) -> Result<ELiteral> {
        let naf = if self.is_keyword(0, "not") {
            self.bump();
            true
        } else {
            false
        };
        let start = self.span();
        let atom = self.body_atom()?;
        if naf {
            match atom {
                BodyAtom::Set(_) => {
                    return Err(Error::Parse {
                        message: "set atoms may not occur under default negation".into(),
                        span: start,
                    })
                }
                BodyAtom::Compare(_) => {
                    return Err(Error::Parse {
                        message: "comparisons may not occur under default negation".into(),
                        span: start,
                    })
                }
                _ => {}
            }
        }
        Ok(ELiteral { naf, atom })
    }

    fn body_atom(&mut self) -> Result<BodyAtom> {
        if self.peek() == &Tok::LBrace {
            let lhs = self.set_name()?;
            let span = self.span();
            let rel = match set_relation_of(self.peek()) {
                Some(r) => r,
                None => return self.unexpected("`=`, `<=` or `<` after a set name"),
            };
            self.bump();
            let rhs = self.set_name()?;
            return self.finish_set_atom(lhs, rel, rhs, span);
        }
        if self.aggregate_ahead(0) || self.peek() == &Tok::Minus && self.aggregate_ahead(1) {
            let negated = self.eat(&Tok::Minus);
            let atom = self.aggregate()?;
            return Ok(BodyAtom::Aggregate(AggregateLiteral { negated, atom }));
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(rel) = set_relation_of(self.peek_at(1)) {
                if self.peek_at(2) == &Tok::LBrace {
                    // `p <= {X : q(X)}` abbreviates `{X : p(X)} <= {X : q(X)}`
                    self.bump();
                    let span = self.span();
                    self.bump();
                    let rhs = self.set_name()?;
                    let lhs = SetName::of_predicate(&Symbol::new(&name), &rhs.vars);
                    return self.finish_set_atom(lhs, rel, rhs, span);
                }
            }
            if relation_of(self.peek_at(1)).is_none() {
                return Ok(BodyAtom::Regular(self.literal()?));
            }
        }
        if self.peek() == &Tok::Minus && matches!(self.peek_at(1), Tok::Ident(_)) {
            return Ok(BodyAtom::Regular(self.literal()?));
        }
        Ok(BodyAtom::Compare(self.comparison()?))
    }

    fn finish_set_atom(&mut self, lhs: SetName, rel: SetRelation, rhs: SetName, span: SourceSpan) -> Result<BodyAtom> {
        if lhs.vars.len() != rhs.vars.len() {
            return Err(Error::Parse {
                message: format!(
                    "set names of a set atom bind {} and {} variables",
                    lhs.vars.len(),
                    rhs.vars.len()
                ),
                span,
            });
        }
        Ok(BodyAtom::Set(SetAtom { lhs, rel, rhs }))
    }

    fn comparison(&mut self) -> Result<Comparison> {
        let lhs = self.term()?;
        let rel = match relation_of(self.peek()) {
            Some(r) => r,
            None => return self.unexpected("a comparison operator"),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(Comparison { lhs, rel, rhs })
    }

    fn aggregate(&mut self) -> Result<AggregateAtom> {
        let span = self.span();
        let func = match self.bump() {
            Tok::Ident(s) => AggregateFunction::from_name(&s).expect("checked by caller"),
            _ => unreachable!("checked by caller"),
        };
        let set = self.set_name()?;
        if func.is_numeric() && set.vars.len() != 1 {
            return Err(Error::Parse {
                message: format!("{} requires exactly one bound variable", func.name()),
                span,
            });
        }
        let rel = match relation_of(self.peek()) {
            Some(r) => r,
            None => return self.unexpected("a comparison operator after the aggregate"),
        };
        self.bump();
        let guard = self.term()?;
        Ok(AggregateAtom { func, set, rel, guard })
    }

    fn set_name(&mut self) -> Result<SetName> {
        let open = self.span();
        self.expect(Tok::LBrace)?;
        let mut vars = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Var(v) => {
                    let s = Symbol::new(&v);
                    if vars.contains(&s) {
                        return self.error(format!("variable {v} is bound twice"));
                    }
                    vars.push(s);
                    self.bump();
                }
                _ => return self.unexpected("a bound variable"),
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::Colon)?;
        let mut cond = Vec::new();
        loop {
            cond.push(self.cond_item()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        let name = SetName { vars, cond };
        let mut in_literals = BTreeSet::new();
        for l in name.literals() {
            l.collect_vars(&mut in_literals);
        }
        if in_literals.is_empty() && name.literals().next().is_none() {
            return Err(Error::Parse {
                message: "set name condition needs at least one regular literal".into(),
                span: open,
            });
        }
        for v in &name.vars {
            if !in_literals.contains(v) {
                return Err(Error::Parse {
                    message: format!("bound variable {v} does not occur in the set condition"),
                    span: open,
                });
            }
        }
        for l in name.literals() {
            for t in &l.atom.args {
                if t.is_arithmetic() {
                    let mut vs = BTreeSet::new();
                    t.collect_vars(&mut vs);
                    if name.vars.iter().any(|v| vs.contains(v)) {
                        return Err(Error::Parse {
                            message: "arithmetic over bound variables inside a set condition".into(),
                            span: open,
                        });
                    }
                }
            }
        }
        Ok(name)
    }

    fn cond_item(&mut self) -> Result<CondItem> {
        let literal_ahead = match self.peek() {
            Tok::Ident(_) => relation_of(self.peek_at(1)).is_none(),
            Tok::Minus => matches!(self.peek_at(1), Tok::Ident(_)),
            _ => false,
        };
        if literal_ahead {
            Ok(CondItem::Literal(self.literal()?))
        } else {
            Ok(CondItem::Compare(self.comparison()?))
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(t),
            };
            self.bump();
            let rhs = self.product()?;
            t = Term::BinOp(op, Box::new(t), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut t = self.unary()?;
        while self.eat(&Tok::Star) {
            let rhs = self.unary()?;
            t = Term::BinOp(ArithOp::Mul, Box::new(t), Box::new(rhs));
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Term> {
        if self.peek() == &Tok::Minus {
            self.bump();
            if let Tok::Int(v) = *self.peek() {
                self.bump();
                // `-N` written directly is the integer constant -N
                return Ok(Term::int((-v) as i64));
            }
            let inner = self.unary()?;
            return Ok(Term::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(Term::Var(Symbol::new(&v)))
            }
            Tok::Int(v) => {
                if v > i64::MAX as i128 {
                    return self.error("integer literal is out of range");
                }
                self.bump();
                Ok(Term::int(v as i64))
            }
            Tok::Ident(s) if s != "not" && s != "or" => {
                self.bump();
                if self.peek() == &Tok::LParen {
                    return self.error("function symbols are not supported");
                }
                Ok(Term::sym(&s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a term"),
        }
    }
}

fn check_arities(rules: &[Rule], spans: &[SourceSpan]) -> Result<()> {
    let mut arity: BTreeMap<Symbol, usize> = BTreeMap::new();
    for (rule, span) in rules.iter().zip(spans) {
        let mut seen: Vec<(&Symbol, usize)> = Vec::new();
        for l in rule.head_literals() {
            seen.push((&l.atom.predicate, l.atom.args.len()));
        }
        if let Head::SubsetIntro(h) = &rule.head {
            seen.push((&h.predicate, h.rhs.vars.len()));
        }
        for s in rule.set_names() {
            for l in s.literals() {
                seen.push((&l.atom.predicate, l.atom.args.len()));
            }
        }
        for e in &rule.body {
            if let BodyAtom::Regular(l) = &e.atom {
                seen.push((&l.atom.predicate, l.atom.args.len()));
            }
        }
        for (p, n) in seen {
            match arity.get(p) {
                Some(&m) if m != n => {
                    return Err(Error::Parse {
                        message: format!("predicate {p} used with arities {m} and {n}"),
                        span: *span,
                    })
                }
                Some(_) => {}
                None => {
                    arity.insert(p.clone(), n);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_rule(text: &str) -> Rule {
        let p = parse_program(text).unwrap();
        assert_eq!(p.rules.len(), 1);
        p.rules[0].clone()
    }

    #[test]
    fn card_is_count() {
        let r = one_rule("p(a) :- card{X : p(X)}=1.");
        assert_eq!(
            r.head,
            Head::Disjunction(vec![Literal::pos(Atom::new("p", vec![Term::sym("a")]))])
        );
        match &r.body[0].atom {
            BodyAtom::Aggregate(a) => {
                assert!(!a.negated);
                assert_eq!(a.atom.func, AggregateFunction::Count);
                assert_eq!(a.atom.rel, Relation::Eq);
                assert_eq!(a.atom.guard, Term::int(1));
                assert!(a.atom.set.is_ground());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn subset_intro_program() {
        let p = parse_program("q(a). q(b). r(a). p <= {X : q(X)}.").unwrap();
        assert_eq!(p.rules.len(), 4);
        assert!(matches!(p.rules[3].head, Head::SubsetIntro(_)));
        assert!(p.rules[3].body.is_empty());
    }

    #[test]
    fn uppercase_intro_predicate_is_rejected() {
        let err = parse_program("P <= {X : q(X)}.").unwrap_err();
        assert!(err.to_string().contains("lowercase"));
    }

    #[test]
    fn empty_body_marker_is_an_error() {
        let err = parse_program("p(a) :-.").unwrap_err();
        match err {
            Error::Parse { span, .. } => assert_eq!((span.line, span.column), (1, 8)),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn arity_conflict() {
        assert!(parse_program("p(a). p(a,b).").is_err());
        assert!(parse_program("q :- count{X : p(X,X)} > 0. p(a).").is_err());
    }

    #[test]
    fn unbound_set_variable() {
        assert!(parse_program("q :- count{X : p(Y)} > 0.").is_err());
    }

    #[test]
    fn not_in_head() {
        assert!(parse_program("not p :- q.").is_err());
        assert!(parse_program("p or not q.").is_err());
    }

    #[test]
    fn set_atoms_and_abbreviation() {
        let r = one_rule("ok(S) :- student(S), {C : taken(S,C)} <= {C : required(C)}.");
        assert!(matches!(r.body[1].atom, BodyAtom::Set(_)));
        let r = one_rule("p(a) :- p <= {X : q(X)}.");
        match &r.body[0].atom {
            BodyAtom::Set(s) => {
                assert_eq!(s.lhs, SetName::of_predicate(&Symbol::new("p"), &[Symbol::new("X")]));
                assert_eq!(s.rel, SetRelation::Subset);
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_program("p :- not {X : q(X)} <= {X : r(X)}.").is_err());
        assert!(parse_program("p :- {X : q(X)} <= {X, Y : r(X,Y)}.").is_err());
    }

    #[test]
    fn comparisons_and_arithmetic() {
        let r = one_rule("p(X+1) :- q(X), X != 3, count{Y : r(Y), Y != b} >= 2*X - -1.");
        assert_eq!(r.body.len(), 3);
        match &r.body[2].atom {
            BodyAtom::Aggregate(a) => assert_eq!(
                a.atom.guard,
                Term::BinOp(
                    ArithOp::Sub,
                    Box::new(Term::BinOp(
                        ArithOp::Mul,
                        Box::new(Term::int(2)),
                        Box::new(Term::var("X"))
                    )),
                    Box::new(Term::int(-1))
                )
            ),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn disjunction_spellings() {
        let a = parse_program("q(a) or p(b).").unwrap();
        let b = parse_program("q(a) | p(b).").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rules[0].head_literals().len(), 2);
    }

    #[test]
    fn numeric_aggregates_take_one_variable() {
        assert!(parse_program("q :- sum{X,Y : p(X,Y)} > 0.").is_err());
        assert!(parse_program("q :- count{X,Y : p(X,Y)} > 0.").is_ok());
    }

    #[test]
    fn ground_literal_lists() {
        let s = parse_ground_literals("p(0), -q(a)").unwrap();
        assert_eq!(s.len(), 2);
        assert!(parse_ground_literals("p(X)").is_err());
        assert!(parse_ground_literals("").unwrap().is_empty());
        assert_eq!(parse_ground_literals("p(0) -q(a)").unwrap(), s);
        assert!(parse_ground_literals("p(0),").is_err());
    }

    #[test]
    fn extreme_integers() {
        let r = one_rule("p(-9223372036854775808).");
        assert_eq!(r.head_literals()[0].atom.args[0], Term::int(i64::MIN));
        assert!(parse_program("p(9223372036854775808).").is_err());
    }
}
