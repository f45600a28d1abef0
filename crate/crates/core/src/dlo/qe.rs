//! Quantifier elimination for dense linear orders without endpoints by test
//! points: `∃v φ` holds iff `φ` holds at `−∞`, at some term `t` compared with
//! `v`, or just above such a `t`.

use super::DloError;
use crate::formula::{Atom, Binder, Formula, Guard, Quantifier, Term};

fn check_atoms(f: &Formula) -> Result<(), DloError> {
    let mut bad = None;
    f.visit_atoms(&mut |a| {
        if bad.is_none() && !a.is_order_atom() {
            bad = Some(a.to_string());
        }
    });
    let mut set_binder = None;
    f.visit_binders(&mut |_, b, v| {
        if b == Binder::Set && set_binder.is_none() {
            set_binder = Some(v.to_string());
        }
    });
    match (bad, set_binder) {
        (Some(a), _) => Err(DloError::NonOrderAtom(a)),
        (_, Some(v)) => Err(DloError::SetQuantifier(v)),
        _ => Ok(()),
    }
}

/// A quantifier-free formula equivalent to `f` over every dense linear order
/// without endpoints.
pub fn eliminate_quantifiers(f: &Formula) -> Result<Formula, DloError> {
    check_atoms(f)?;
    Ok(simplify(&qe(f)))
}

fn qe(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::negate(qe(g)),
        Formula::And(gs) => Formula::and_all(gs.iter().map(qe)),
        Formula::Or(gs) => Formula::or_all(gs.iter().map(qe)),
        Formula::Imp(a, b) => Formula::imp(qe(a), qe(b)),
        Formula::Quant(q, binder, v, body) => {
            let guard = match binder {
                Binder::Element(g) => *g,
                Binder::Set => unreachable!("rejected by check_atoms"),
            };
            let b = qe(body);
            let guard_atom = match guard {
                Guard::Any => Formula::True,
                Guard::Neg => Formula::lt(Term::var(v), Term::zero()),
                Guard::Pos => Formula::lt(Term::zero(), Term::var(v)),
            };
            match q {
                Quantifier::Exists => exists_qf(v, &simplify(&Formula::and_all([guard_atom, b]))),
                Quantifier::Forall => {
                    let inner = Formula::and_all([guard_atom, Formula::negate(b)]);
                    Formula::negate(exists_qf(v, &simplify(&inner)))
                }
            }
        }
    }
}

/// Eliminates `∃v` from a quantifier-free `phi`.
pub(crate) fn exists_qf(v: &str, phi: &Formula) -> Formula {
    let mut terms: Vec<Term> = Vec::new();
    phi.visit_atoms(&mut |a| {
        if let Atom::Lt(x, y) | Atom::Eq(x, y) = a {
            for (p, o) in [(x, y), (y, x)] {
                if p.as_var() == Some(v) && o.as_var() != Some(v) && !terms.contains(o) {
                    terms.push(o.clone());
                }
            }
        }
    });
    let mut out = vec![simplify(&map_atoms(phi, &|a| minus_infinity(a, v)))];
    for t in &terms {
        out.push(simplify(&phi.subst_element(v, t)));
        out.push(simplify(&map_atoms(phi, &|a| just_above(a, v, t))));
    }
    simplify(&Formula::or_all(out))
}

fn is_v(t: &Term, v: &str) -> bool {
    t.as_var() == Some(v)
}

fn minus_infinity(a: &Atom, v: &str) -> Formula {
    match a {
        Atom::Lt(x, y) => match (is_v(x, v), is_v(y, v)) {
            (true, true) => Formula::False,
            (true, false) => Formula::True,
            (false, true) => Formula::False,
            _ => Formula::Atom(a.clone()),
        },
        Atom::Eq(x, y) => match (is_v(x, v), is_v(y, v)) {
            (true, true) => Formula::True,
            (true, false) | (false, true) => Formula::False,
            _ => Formula::Atom(a.clone()),
        },
        _ => Formula::Atom(a.clone()),
    }
}

fn just_above(a: &Atom, v: &str, t: &Term) -> Formula {
    match a {
        Atom::Lt(x, y) => match (is_v(x, v), is_v(y, v)) {
            (true, true) => Formula::False,
            (true, false) => Formula::lt(t.clone(), y.clone()),
            (false, true) => Formula::or_all([Formula::lt(x.clone(), t.clone()), Formula::eq(x.clone(), t.clone())]),
            _ => Formula::Atom(a.clone()),
        },
        Atom::Eq(x, y) => match (is_v(x, v), is_v(y, v)) {
            (true, true) => Formula::True,
            (true, false) | (false, true) => Formula::False,
            _ => Formula::Atom(a.clone()),
        },
        _ => Formula::Atom(a.clone()),
    }
}

pub(crate) fn map_atoms(f: &Formula, m: &dyn Fn(&Atom) -> Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => m(a),
        Formula::Not(g) => Formula::negate(map_atoms(g, m)),
        Formula::And(gs) => Formula::and_all(gs.iter().map(|g| map_atoms(g, m))),
        Formula::Or(gs) => Formula::or_all(gs.iter().map(|g| map_atoms(g, m))),
        Formula::Imp(a, b) => Formula::imp(map_atoms(a, m), map_atoms(b, m)),
        Formula::Quant(q, b, v, body) => Formula::Quant(*q, *b, v.clone(), Box::new(map_atoms(body, m))),
    }
}

fn simplify_atom(a: &Atom) -> Formula {
    match a {
        Atom::Lt(x, y) => {
            if x == y {
                return Formula::False;
            }
            if let (Term::Const(p), Term::Const(q)) = (x, y) {
                return if p < q { Formula::True } else { Formula::False };
            }
            Formula::Atom(a.clone())
        }
        Atom::Eq(x, y) => {
            if x == y {
                return Formula::True;
            }
            if let (Term::Const(_), Term::Const(_)) = (x, y) {
                return Formula::False;
            }
            let (x, y) = if x <= y { (x, y) } else { (y, x) };
            Formula::eq(x.clone(), y.clone())
        }
        _ => Formula::Atom(a.clone()),
    }
}

fn dedup_keep_order(items: Vec<Formula>) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::with_capacity(items.len());
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// Constant folding, trivial atoms, duplicate and complementary operands,
/// and vacuous quantifiers.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => simplify_atom(a),
        Formula::Not(g) => Formula::negate(simplify(g)),
        Formula::And(gs) | Formula::Or(gs) => {
            let is_and = matches!(f, Formula::And(_));
            let parts: Vec<Formula> = gs.iter().map(simplify).collect();
            let folded = if is_and {
                Formula::and_all(parts)
            } else {
                Formula::or_all(parts)
            };
            let items = match folded {
                Formula::And(xs) if is_and => dedup_keep_order(xs),
                Formula::Or(xs) if !is_and => dedup_keep_order(xs),
                other => return other,
            };
            let clash = items.iter().any(|x| items.contains(&Formula::negate(x.clone())));
            if clash {
                return if is_and { Formula::False } else { Formula::True };
            }
            if is_and {
                Formula::and_all(items)
            } else {
                Formula::or_all(items)
            }
        }
        Formula::Imp(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (&a, &b) {
                (Formula::True, _) => b,
                (Formula::False, _) | (_, Formula::True) => Formula::True,
                (_, Formula::False) => Formula::negate(a),
                _ if a == b => Formula::True,
                _ => Formula::imp(a, b),
            }
        }
        Formula::Quant(q, binder, v, body) => {
            let body = simplify(body);
            if matches!(body, Formula::True | Formula::False) || !body.free_variable_names().contains(v) {
                return body;
            }
            Formula::Quant(*q, *binder, v.clone(), Box::new(body))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlo::enumerate_cells;
    use crate::dlo::eval::{eval_qf, semantic_eval, Env};
    use crate::formula::{parse_formula, Language};
    use crate::rational::Rational;

    fn p(s: &str) -> Formula {
        parse_formula(s, Language::OrderA).unwrap()
    }

    fn equivalent_on_cells(a: &Formula, b: &Formula) -> bool {
        let vars: Vec<String> = a
            .free_variable_names()
            .union(&b.free_variable_names())
            .cloned()
            .collect();
        let mut consts: Vec<Rational> = a.element_constants().into_iter().collect();
        consts.extend(b.element_constants());
        enumerate_cells(&vars, &consts).into_iter().all(|c| {
            let env: Env = vars.iter().cloned().zip(c.representative()).collect();
            semantic_eval(a, &env).unwrap() == semantic_eval(b, &env).unwrap()
        })
    }

    #[test]
    fn spec_examples() {
        let r = eliminate_quantifiers(&p("(exists z (and (< x z) (< z y)))")).unwrap();
        assert_eq!(r, p("(< x y)"));
        assert_eq!(eliminate_quantifiers(&p("(exists z (< z x))")).unwrap(), Formula::True);
        let r = eliminate_quantifiers(&p("(forall z (imp (< x z) (< y z)))")).unwrap();
        assert!(r.is_quantifier_free());
        assert!(equivalent_on_cells(&r, &p("(or (< y x) (= y x))")), "{r}");
    }

    #[test]
    fn guards_and_errors() {
        assert_eq!(
            eliminate_quantifiers(&p("(exists-neg z (< 0 z))")).unwrap(),
            Formula::False
        );
        assert_eq!(
            eliminate_quantifiers(&p("(forall-pos z (< 0 z))")).unwrap(),
            Formula::True
        );
        let r = eliminate_quantifiers(&p("(exists-neg z (< x z))")).unwrap();
        assert!(equivalent_on_cells(&r, &p("(< x 0)")), "{r}");
        assert!(eliminate_quantifiers(&p("(exists z (A z y))")).is_err());
    }

    #[test]
    fn nested_quantifiers() {
        let f = p("(forall x (exists y (and (< x y) (< y 1))))");
        assert_eq!(eliminate_quantifiers(&f).unwrap(), Formula::False);
        let f = p("(forall x (imp (< x 1) (exists y (and (< x y) (< y 1)))))");
        assert_eq!(eliminate_quantifiers(&f).unwrap(), Formula::True);
        let f = p("(exists y (and (< y x) (forall z (imp (< z x) (or (< z y) (= z y))))))");
        let r = eliminate_quantifiers(&f).unwrap();
        assert_eq!(r, Formula::False, "{r}");
    }

    #[test]
    fn simplification() {
        assert_eq!(simplify(&p("(and (< x y) (not (< x y)))")), Formula::False);
        assert_eq!(simplify(&p("(or (= y x) (= x y))")), p("(= x y)"));
        assert_eq!(simplify(&p("(imp (< 1 2) (< x 0))")), p("(< x 0)"));
        assert_eq!(
            simplify(&p("(and (< 0 1) (or (< x 0) (= x 0)))")),
            p("(or (< x 0) (= x 0))")
        );
        let env = Env::from([("x".to_string(), Rational::from(-1))]);
        assert!(eval_qf(&simplify(&p("(imp (< x 0) (< x 1))")), &env).unwrap());
    }

    #[test]
    fn corpus_agrees_with_sample_evaluation() {
        let mut r = crate::corpus::rng(3);
        let mut quantified = 0;
        for _ in 0..600 {
            let f = crate::corpus::pure_order(&mut r, 4, 3);
            let g = eliminate_quantifiers(&f).unwrap();
            assert!(g.is_quantifier_free(), "{f} -> {g}");
            assert!(equivalent_on_cells(&f, &g), "{f} -> {g}");
            quantified += (f.quantifier_count() > 0) as usize;
        }
        assert!(quantified >= 200, "{quantified}");
    }
}
