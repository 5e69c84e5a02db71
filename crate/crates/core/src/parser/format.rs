use std::fmt::Write;

use crate::model::*;

/// Canonical text, one rule per line. Parsing the result yields an equal
/// program.
pub fn format_program(p: &Program) -> String {
    let mut out = String::new();
    for r in &p.rules {
        out.push_str(&format_rule(r));
        out.push('\n');
    }
    out
}

pub fn format_rule(r: &Rule) -> String {
    let mut out = String::new();
    match &r.head {
        Head::Disjunction(lits) => {
            for (i, l) in lits.iter().enumerate() {
                if i > 0 {
                    out.push_str(" or ");
                }
                literal(&mut out, l);
            }
        }
        Head::SubsetIntro(h) => {
            let _ = write!(out, "{} {} ", h.predicate, h.rel.symbol());
            set_name(&mut out, &h.rhs);
        }
    }
    if !r.body.is_empty() {
        if out.is_empty() {
            out.push_str(":- ");
        } else {
            out.push_str(" :- ");
        }
        for (i, e) in r.body.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            eliteral(&mut out, e);
        }
    } else if out.is_empty() {
        out.push_str(":-");
    }
    out.push('.');
    out
}

fn eliteral(out: &mut String, e: &ELiteral) {
    if e.naf {
        out.push_str("not ");
    }
    match &e.atom {
        BodyAtom::Regular(l) => literal(out, l),
        BodyAtom::Aggregate(a) => {
            if a.negated {
                out.push('-');
            }
            aggregate(out, &a.atom);
        }
        BodyAtom::Set(s) => {
            set_name(out, &s.lhs);
            let _ = write!(out, " {} ", s.rel.symbol());
            set_name(out, &s.rhs);
        }
        BodyAtom::Compare(c) => comparison(out, c),
    }
}

pub(crate) fn aggregate(out: &mut String, a: &AggregateAtom) {
    out.push_str(a.func.name());
    set_name(out, &a.set);
    let _ = write!(out, " {} ", a.rel.symbol());
    term(out, &a.guard);
}

pub(crate) fn set_name(out: &mut String, s: &SetName) {
    out.push('{');
    for (i, v) in s.vars.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(v.as_str());
    }
    out.push_str(" : ");
    for (i, c) in s.cond.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match c {
            CondItem::Literal(l) => literal(out, l),
            CondItem::Compare(c) => comparison(out, c),
        }
    }
    out.push('}');
}

fn comparison(out: &mut String, c: &Comparison) {
    let mut lhs = String::new();
    term(&mut lhs, &c.lhs);
    // a leading `-` would read as classical negation
    if lhs.starts_with('-') {
        let _ = write!(out, "({lhs})");
    } else {
        out.push_str(&lhs);
    }
    let _ = write!(out, " {} ", c.rel.symbol());
    term(out, &c.rhs);
}

pub(crate) fn literal(out: &mut String, l: &Literal) {
    if l.negated {
        out.push('-');
    }
    out.push_str(l.atom.predicate.as_str());
    if !l.atom.args.is_empty() {
        out.push('(');
        for (i, t) in l.atom.args.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            term(out, t);
        }
        out.push(')');
    }
}

pub(crate) fn term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(v.as_str()),
        Term::Const(Constant::Int(i)) => {
            let _ = write!(out, "{i}");
        }
        Term::Const(Constant::Sym(s)) => out.push_str(s.as_str()),
        Term::Neg(inner) => {
            out.push('-');
            match inner.as_ref() {
                Term::Const(Constant::Int(_)) | Term::BinOp(..) => {
                    out.push('(');
                    term(out, inner);
                    out.push(')');
                }
                _ => term(out, inner),
            }
        }
        Term::BinOp(op, a, b) => {
            operand(out, a);
            out.push_str(match op {
                ArithOp::Add => " + ",
                ArithOp::Sub => " - ",
                ArithOp::Mul => " * ",
            });
            operand(out, b);
        }
    }
}

fn operand(out: &mut String, t: &Term) {
    if matches!(t, Term::BinOp(..)) {
        out.push('(');
        term(out, t);
        out.push(')');
    } else {
        term(out, t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn roundtrip(text: &str) -> String {
        let p = parse_program(text).unwrap();
        let s = format_program(&p);
        assert_eq!(parse_program(&s).unwrap(), p, "{s}");
        s
    }

    #[test]
    fn canonical_spellings() {
        assert_eq!(roundtrip("-p(a) :- not q(a)."), "-p(a) :- not q(a).\n");
        assert_eq!(
            roundtrip("q(Y) :- card{X:p(X,Y)} = 1, r(Y). r(a). r(b). p(a,b)."),
            "q(Y) :- count{X : p(X,Y)} = 1, r(Y).\nr(a).\nr(b).\np(a,b).\n"
        );
        assert_eq!(roundtrip(""), "");
        assert_eq!(roundtrip(":- p(a). q(a) | p(b)."), ":- p(a).\nq(a) or p(b).\n");
    }

    #[test]
    fn tricky_terms() {
        roundtrip("p(-1, -(1), -(-1), --X, -(X + 1), (X + 1) * 2, X - -1) :- q(X).");
        roundtrip("p :- (-a) < X, q(X), -count{X : q(X), (-X) != 2} > -3.");
        roundtrip("p <= {X : q(X), X != b} :- r. r :- p < {X : q(X)}.");
    }
}
