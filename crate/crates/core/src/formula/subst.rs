use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Atom, Binder, Formula, SetTerm, Sort, Term};

/// The value a variable is replaced by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Replacement {
    Element(Term),
    Set(SetTerm),
}

impl Replacement {
    fn sort(&self) -> Sort {
        match self {
            Replacement::Element(_) => Sort::Element,
            Replacement::Set(_) => Sort::Set,
        }
    }

    fn free_name(&self) -> Option<&str> {
        match self {
            Replacement::Element(Term::Var(v)) | Replacement::Set(SetTerm::Var(v)) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("sort mismatch substituting for `{var}`: expected {expected:?}, got {got:?}")]
pub struct SubstError {
    pub var: String,
    pub expected: Sort,
    pub got: Sort,
}

/// A name derived from `base` that is not in `avoid`.
pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

impl Formula {
    /// Simultaneous capture-avoiding substitution.
    pub fn substitute(&self, bindings: &BTreeMap<String, Replacement>) -> Result<Formula, SubstError> {
        let mut avoid = self.all_names();
        for r in bindings.values() {
            if let Some(v) = r.free_name() {
                avoid.insert(v.to_string());
            }
        }
        self.subst_inner(bindings, &mut avoid)
    }

    /// Substitutes a single element variable.
    pub fn subst_element(&self, var: &str, term: &Term) -> Formula {
        let b = BTreeMap::from([(var.to_string(), Replacement::Element(term.clone()))]);
        self.substitute(&b)
            .expect("element substitution into element positions")
    }

    /// Substitutes a single set variable.
    pub fn subst_set(&self, var: &str, set: &SetTerm) -> Formula {
        let b = BTreeMap::from([(var.to_string(), Replacement::Set(set.clone()))]);
        self.substitute(&b).expect("set substitution into set positions")
    }

    fn subst_inner(
        &self,
        bindings: &BTreeMap<String, Replacement>,
        avoid: &mut BTreeSet<String>,
    ) -> Result<Formula, SubstError> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        Ok(match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => Formula::Atom(subst_atom(a, bindings)?),
            Formula::Not(g) => Formula::Not(Box::new(g.subst_inner(bindings, avoid)?)),
            Formula::And(gs) => Formula::And(
                gs.iter()
                    .map(|g| g.subst_inner(bindings, avoid))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Or(gs) => Formula::Or(
                gs.iter()
                    .map(|g| g.subst_inner(bindings, avoid))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Imp(a, b) => Formula::imp(a.subst_inner(bindings, avoid)?, b.subst_inner(bindings, avoid)?),
            Formula::Quant(q, binder, v, body) => {
                let mut inner: BTreeMap<String, Replacement> = bindings.clone();
                inner.remove(v);
                let body_free = body.free_variable_names();
                inner.retain(|k, _| body_free.contains(k));
                let captures = inner.values().any(|r| r.free_name() == Some(v.as_str()));
                if captures {
                    let fresh = fresh_name(v, avoid);
                    avoid.insert(fresh.clone());
                    let rename = match binder {
                        Binder::Set => Replacement::Set(SetTerm::Var(fresh.clone())),
                        Binder::Element(_) => Replacement::Element(Term::Var(fresh.clone())),
                    };
                    inner.insert(v.clone(), rename);
                    Formula::Quant(*q, *binder, fresh, Box::new(body.subst_inner(&inner, avoid)?))
                } else {
                    Formula::Quant(*q, *binder, v.clone(), Box::new(body.subst_inner(&inner, avoid)?))
                }
            }
        })
    }

    /// Renames bound variables so that no binder shadows a free variable,
    /// a name in `avoid`, or an enclosing binder.
    pub fn rename_apart(&self, avoid: &BTreeSet<String>) -> Formula {
        let mut used: BTreeSet<String> = self.free_variable_names();
        used.extend(avoid.iter().cloned());
        let mut all = self.all_names();
        all.extend(avoid.iter().cloned());
        self.rename_inner(&mut used, &mut all)
    }

    fn rename_inner(&self, used: &mut BTreeSet<String>, all: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(g) => Formula::Not(Box::new(g.rename_inner(used, all))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.rename_inner(used, all)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.rename_inner(used, all)).collect()),
            Formula::Imp(a, b) => Formula::imp(a.rename_inner(used, all), b.rename_inner(used, all)),
            Formula::Quant(q, binder, v, body) => {
                let (name, body) = if used.contains(v) {
                    let fresh = fresh_name(v, all);
                    all.insert(fresh.clone());
                    let body = match binder {
                        Binder::Set => body.subst_set(v, &SetTerm::Var(fresh.clone())),
                        Binder::Element(_) => body.subst_element(v, &Term::Var(fresh.clone())),
                    };
                    (fresh, body)
                } else {
                    (v.clone(), (**body).clone())
                };
                used.insert(name.clone());
                let body = body.rename_inner(used, all);
                used.remove(&name);
                Formula::Quant(*q, *binder, name, Box::new(body))
            }
        }
    }
}

fn subst_term(t: &Term, b: &BTreeMap<String, Replacement>) -> Result<Term, SubstError> {
    match t {
        Term::Var(v) => match b.get(v) {
            Some(Replacement::Element(r)) => Ok(r.clone()),
            Some(r) => Err(SubstError {
                var: v.clone(),
                expected: Sort::Element,
                got: r.sort(),
            }),
            None => Ok(t.clone()),
        },
        Term::Const(_) => Ok(t.clone()),
    }
}

fn subst_set_term(t: &SetTerm, b: &BTreeMap<String, Replacement>) -> Result<SetTerm, SubstError> {
    match t {
        SetTerm::Var(v) => match b.get(v) {
            Some(Replacement::Set(r)) => Ok(r.clone()),
            Some(r) => Err(SubstError {
                var: v.clone(),
                expected: Sort::Set,
                got: r.sort(),
            }),
            None => Ok(t.clone()),
        },
        SetTerm::Lit(_) => Ok(t.clone()),
    }
}

fn subst_atom(a: &Atom, b: &BTreeMap<String, Replacement>) -> Result<Atom, SubstError> {
    Ok(match a {
        Atom::Lt(x, y) => Atom::Lt(subst_term(x, b)?, subst_term(y, b)?),
        Atom::Eq(x, y) => Atom::Eq(subst_term(x, b)?, subst_term(y, b)?),
        Atom::A(x, y) => Atom::A(subst_term(x, b)?, subst_term(y, b)?),
        Atom::In(x, s) => Atom::In(subst_term(x, b)?, subst_set_term(s, b)?),
        Atom::SetEq(s, t) => Atom::SetEq(subst_set_term(s, b)?, subst_set_term(t, b)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Language};
    use crate::rational::q;

    fn p(s: &str) -> Formula {
        parse_formula(s, Language::OrderA).unwrap()
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(p("(< t x)").subst_element("t", &Term::var("x_j")), p("(< x_j x)"));
        assert_eq!(
            p("(A t y)").subst_element("t", &Term::Const(q("-1/2"))),
            p("(A -1/2 y)")
        );
        let r = p("(exists t (< t x))").subst_element("x", &Term::var("t"));
        assert_eq!(r.to_string(), "(exists t' (< t' t))");
    }

    #[test]
    fn sort_mismatch_is_rejected() {
        let b = BTreeMap::from([("x".to_string(), Replacement::Set(SetTerm::var("S")))]);
        assert!(p("(< x 1)").substitute(&b).is_err());
        let w = parse_formula("(in y S)", Language::Wmso).unwrap();
        let b = BTreeMap::from([("S".to_string(), Replacement::Element(Term::var("z")))]);
        assert!(w.substitute(&b).is_err());
    }

    #[test]
    fn simultaneous_substitution_swaps() {
        let b = BTreeMap::from([
            ("x".to_string(), Replacement::Element(Term::var("y"))),
            ("y".to_string(), Replacement::Element(Term::var("x"))),
        ]);
        assert_eq!(p("(< x y)").substitute(&b).unwrap(), p("(< y x)"));
    }

    #[test]
    fn bound_occurrences_are_untouched() {
        let f = p("(and (< x 0) (exists x (< x 1)))");
        assert_eq!(
            f.subst_element("x", &Term::var("z")).to_string(),
            "(and (< z 0) (exists x' (< x' 1)))"
        );
    }
}
