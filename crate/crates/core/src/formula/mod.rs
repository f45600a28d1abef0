//! Formula syntax shared by the order language `{<, 0, A}` and the
//! two-sorted weak monadic language `{<, ∈}`.
//!
//! A single AST serves both languages. Element terms are variables or
//! rational literals (the constant `0` is the literal zero); set terms are
//! variables or finite-set literals. [`Language`] records which atoms and
//! binders are admissible, and [`Formula::check_language`] enforces it.

mod parse;
mod print;
mod subst;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rational::Rational;
use crate::wmso::FiniteSetQ;

pub use parse::{parse_formula, ParseError};
pub use print::print_formula;
pub(crate) use subst::fresh_name;
pub use subst::{Replacement, SubstError};

/// Formulas of the weak monadic structure share the AST.
pub type WFormula = Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    /// `(ℚ, <, 0, A)`
    OrderA,
    /// `(ℚ_{>0}, 𝓕, <, ∈)`
    Wmso,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Element,
    Set,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetTerm {
    Var(String),
    Lit(FiniteSetQ),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Lt(Term, Term),
    Eq(Term, Term),
    A(Term, Term),
    In(Term, SetTerm),
    SetEq(SetTerm, SetTerm),
}

/// Range restriction of an element quantifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    Any,
    Neg,
    Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Binder {
    Element(Guard),
    Set,
}

impl Binder {
    pub fn sort(self) -> Sort {
        match self {
            Binder::Element(_) => Sort::Element,
            Binder::Set => Sort::Set,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Binder, String, Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message}")]
pub struct LanguageError {
    pub message: String,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn zero() -> Term {
        Term::Const(Rational::zero())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }
}

impl From<Rational> for Term {
    fn from(r: Rational) -> Self {
        Term::Const(r)
    }
}

impl SetTerm {
    pub fn var(name: &str) -> SetTerm {
        SetTerm::Var(name.to_string())
    }
}

impl Atom {
    /// Element terms of the atom, in order.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Lt(a, b) | Atom::Eq(a, b) | Atom::A(a, b) => vec![a, b],
            Atom::In(a, _) => vec![a],
            Atom::SetEq(_, _) => vec![],
        }
    }

    pub fn set_terms(&self) -> Vec<&SetTerm> {
        match self {
            Atom::In(_, s) => vec![s],
            Atom::SetEq(s, t) => vec![s, t],
            _ => vec![],
        }
    }

    pub fn is_order_atom(&self) -> bool {
        matches!(self, Atom::Lt(..) | Atom::Eq(..))
    }
}

impl Formula {
    pub fn lt(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Atom(Atom::Lt(a.into(), b.into()))
    }

    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Atom(Atom::Eq(a.into(), b.into()))
    }

    pub fn rel_a(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::Atom(Atom::A(a.into(), b.into()))
    }

    pub fn member(e: impl Into<Term>, s: SetTerm) -> Formula {
        Formula::Atom(Atom::In(e.into(), s))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn exists(binder: Binder, var: &str, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Exists, binder, var.to_string(), Box::new(body))
    }

    pub fn forall(binder: Binder, var: &str, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Forall, binder, var.to_string(), Box::new(body))
    }

    /// Conjunction with trivial-case folding.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction with trivial-case folding.
    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    /// Negation with double-negation and constant folding.
    pub fn negate(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    /// Free variables with their sorts.
    pub fn free_variables(&self) -> BTreeSet<(String, Sort)> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    pub fn free_variable_names(&self) -> BTreeSet<String> {
        self.free_variables().into_iter().map(|(v, _)| v).collect()
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<(String, Sort)>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for t in a.terms() {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert((v.clone(), Sort::Element));
                        }
                    }
                }
                for s in a.set_terms() {
                    if let SetTerm::Var(v) = s {
                        if !bound.contains(v) {
                            out.insert((v.clone(), Sort::Set));
                        }
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, _, v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            for t in a.terms() {
                if let Term::Var(v) = t {
                    out.insert(v.clone());
                }
            }
            for s in a.set_terms() {
                if let SetTerm::Var(v) = s {
                    out.insert(v.clone());
                }
            }
        });
        self.visit_binders(&mut |_, _, v| {
            out.insert(v.to_string());
        });
        out
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.visit_atoms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_atoms(f)),
            Formula::Imp(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::Quant(_, _, _, body) => body.visit_atoms(f),
        }
    }

    pub fn visit_binders(&self, f: &mut impl FnMut(Quantifier, Binder, &str)) {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(g) => g.visit_binders(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_binders(f)),
            Formula::Imp(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
            Formula::Quant(q, b, v, body) => {
                f(*q, *b, v);
                body.visit_binders(f);
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit_binders(&mut |_, _, _| qf = false);
        qf
    }

    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.visit_binders(&mut |_, _, _| n += 1);
        n
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(g) | Formula::Quant(_, _, _, g) => 1 + g.depth(),
            Formula::And(gs) | Formula::Or(gs) => 1 + gs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Rational literals occurring as element terms.
    pub fn element_constants(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            for t in a.terms() {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
        });
        out
    }

    /// Finite-set literals occurring as set terms.
    pub fn set_literals(&self) -> BTreeSet<FiniteSetQ> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            for s in a.set_terms() {
                if let SetTerm::Lit(l) = s {
                    out.insert(l.clone());
                }
            }
        });
        out
    }

    /// Element literals together with every element of every set literal.
    pub fn parameter_closure(&self) -> BTreeSet<Rational> {
        let mut out = self.element_constants();
        for lit in self.set_literals() {
            out.extend(lit.iter().cloned());
        }
        out
    }

    pub fn mentions_a(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| found |= matches!(a, Atom::A(..)));
        found
    }

    /// Pure-order formulas use only `<`, `=` and element quantifiers.
    pub fn is_pure_order(&self) -> bool {
        let mut ok = true;
        self.visit_atoms(&mut |a| ok &= a.is_order_atom());
        self.visit_binders(&mut |_, b, _| ok &= b.sort() == Sort::Element);
        ok
    }

    /// Checks that atoms and binders belong to `lang` and that every
    /// variable is used at one sort only.
    pub fn check_language(&self, lang: Language) -> Result<(), LanguageError> {
        let err = |m: String| Err(LanguageError { message: m });
        let mut problem: Option<String> = None;
        self.visit_atoms(&mut |a| {
            if problem.is_some() {
                return;
            }
            match (lang, a) {
                (Language::OrderA, Atom::In(..) | Atom::SetEq(..)) => {
                    problem = Some(format!(
                        "membership atom `{}` outside the weak monadic language",
                        print::atom_to_string(a)
                    ))
                }
                (Language::Wmso, Atom::A(..)) => {
                    problem = Some(format!(
                        "relation A in weak monadic formula: `{}`",
                        print::atom_to_string(a)
                    ))
                }
                (Language::Wmso, _) => {
                    for t in a.terms() {
                        if let Term::Const(c) = t {
                            if !c.is_positive() {
                                problem = Some(format!("element literal {c} is not positive"));
                            }
                        }
                    }
                }
                _ => {}
            }
        });
        self.visit_binders(&mut |_, b, v| {
            if problem.is_some() {
                return;
            }
            match (lang, b) {
                (Language::OrderA, Binder::Set) => {
                    problem = Some(format!("set quantifier over `{v}` outside the weak monadic language"))
                }
                (Language::Wmso, Binder::Element(Guard::Neg | Guard::Pos)) => {
                    problem = Some(format!("sign-guarded quantifier over `{v}` in weak monadic formula"))
                }
                _ => {}
            }
        });
        if let Some(p) = problem {
            return err(p);
        }
        let mut sorts: BTreeMap<String, Sort> = BTreeMap::new();
        for (v, s) in self.free_variables() {
            if let Some(prev) = sorts.insert(v.clone(), s) {
                if prev != s {
                    return err(format!("variable `{v}` used both as element and as set"));
                }
            }
        }
        Ok(())
    }
}

/// Formulas serialize as their printed form.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variable_examples() {
        let f = parse_formula("(exists t (and (< t x) (A t y)))", Language::OrderA).unwrap();
        assert_eq!(
            f.free_variable_names(),
            ["x", "y"].iter().map(|s| s.to_string()).collect()
        );
        let g = parse_formula("(< x 0)", Language::OrderA).unwrap();
        assert_eq!(g.free_variable_names().len(), 1);
        let h = parse_formula("(forall-set S (in y S))", Language::Wmso).unwrap();
        assert_eq!(
            h.free_variables(),
            [("y".to_string(), Sort::Element)].into_iter().collect()
        );
    }

    #[test]
    fn folding_constructors() {
        assert_eq!(Formula::and_all([Formula::True, Formula::True]), Formula::True);
        assert_eq!(Formula::or_all([Formula::False, Formula::True]), Formula::True);
        assert_eq!(
            Formula::negate(Formula::negate(Formula::lt(Term::var("x"), Term::zero()))),
            Formula::lt(Term::var("x"), Term::zero())
        );
    }

    #[test]
    fn language_checks() {
        let a = parse_formula("(A x y)", Language::OrderA).unwrap();
        assert!(a.check_language(Language::OrderA).is_ok());
        assert!(a.check_language(Language::Wmso).is_err());
        let w = parse_formula("(exists-set S (in y S))", Language::Wmso).unwrap();
        assert!(w.check_language(Language::OrderA).is_err());
    }
}
