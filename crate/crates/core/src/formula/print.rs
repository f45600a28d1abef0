use std::fmt::{self, Write};

use super::{Atom, Binder, Formula, Guard, Quantifier, SetTerm, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetTerm::Var(v) => f.write_str(v),
            SetTerm::Lit(s) => {
                f.write_str("(set")?;
                for r in s.iter() {
                    write!(f, " {r}")?;
                }
                f.write_char(')')
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Lt(a, b) => write!(f, "(< {a} {b})"),
            Atom::Eq(a, b) => write!(f, "(= {a} {b})"),
            Atom::A(a, b) => write!(f, "(A {a} {b})"),
            Atom::In(e, s) => write!(f, "(in {e} {s})"),
            Atom::SetEq(s, t) => write!(f, "(= {s} {t})"),
        }
    }
}

pub(crate) fn atom_to_string(a: &Atom) -> String {
    a.to_string()
}

pub(crate) fn keyword(q: Quantifier, b: Binder) -> &'static str {
    match (q, b) {
        (Quantifier::Exists, Binder::Element(Guard::Any)) => "exists",
        (Quantifier::Exists, Binder::Element(Guard::Neg)) => "exists-neg",
        (Quantifier::Exists, Binder::Element(Guard::Pos)) => "exists-pos",
        (Quantifier::Exists, Binder::Set) => "exists-set",
        (Quantifier::Forall, Binder::Element(Guard::Any)) => "forall",
        (Quantifier::Forall, Binder::Element(Guard::Neg)) => "forall-neg",
        (Quantifier::Forall, Binder::Element(Guard::Pos)) => "forall-pos",
        (Quantifier::Forall, Binder::Set) => "forall-set",
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) | Formula::Or(gs) => {
                f.write_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" })?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                f.write_char(')')
            }
            Formula::Imp(a, b) => write!(f, "(imp {a} {b})"),
            Formula::Quant(q, b, v, body) => write!(f, "({} {v} {body})", keyword(*q, *b)),
        }
    }
}

/// Canonical text of a formula.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Language};

    #[test]
    fn printer_examples() {
        assert_eq!(Formula::lt(Term::var("x"), Term::var("y")).to_string(), "(< x y)");
        assert_eq!(
            Formula::not(Formula::eq(Term::var("x"), Term::zero())).to_string(),
            "(not (= x 0))"
        );
        let body = Formula::imp(
            Formula::member(Term::var("y"), SetTerm::var("S")),
            Formula::member(Term::var("y"), SetTerm::var("S")),
        );
        assert_eq!(
            Formula::forall(Binder::Set, "S", body).to_string(),
            "(forall-set S (imp (in y S) (in y S)))"
        );
    }

    #[test]
    fn set_literal_printing() {
        let f = parse_formula("(in y (set 3 1/2))", Language::Wmso).unwrap();
        assert_eq!(f.to_string(), "(in y (set 1/2 3))");
    }
}
