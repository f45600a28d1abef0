//! The weak monadic structure `(ℚ_{>0}, 𝓕, <, ∈)`: finite-set operations,
//! membership patterns, quantifier elimination on the pipeline fragment, and
//! an independent evaluator used as its oracle.

mod elim;
mod oracle;
mod pattern;
mod set;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::{Atom, Formula, LanguageError, Replacement, SetTerm, SubstError, Term};
use crate::rational::Rational;

pub use elim::{check_fragment, eliminate_w};
pub use oracle::vs_evaluate;
pub use pattern::MembershipPattern;
pub use set::{s_preimage, set_intersection, set_max, set_min, set_union, FiniteSetQ, NonPositiveElement};

/// Default bound on the candidate pool of [`vs_evaluate`].
pub const DEFAULT_ANCHOR_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WmsoError {
    #[error("fragment violation at `{formula}`: {reason}")]
    FragmentViolation { formula: String, reason: String },
    #[error("candidate pool of {size} points exceeds the anchor limit {limit}")]
    AnchorLimit { size: usize, limit: usize },
    #[error("no value for `{0}`")]
    Unbound(String),
    #[error("value for `{0}` must be a positive rational")]
    NonPositive(String),
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error(transparent)]
    Subst(#[from] SubstError),
}

/// A value of either sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum WValue {
    Element(Rational),
    Set(FiniteSetQ),
}

/// Truth of `f` in `(ℚ_{>0}, 𝓕, <, ∈)` under `env`: the assignment is
/// substituted, every quantifier is eliminated, and the ground result is
/// evaluated.
pub fn eval_wformula(f: &Formula, env: &BTreeMap<String, WValue>) -> Result<bool, WmsoError> {
    let mut bindings = BTreeMap::new();
    for v in f.free_variable_names() {
        let val = env.get(&v).ok_or_else(|| WmsoError::Unbound(v.clone()))?;
        let r = match val {
            WValue::Element(x) if x.is_positive() => Replacement::Element(Term::Const(x.clone())),
            WValue::Element(_) => return Err(WmsoError::NonPositive(v)),
            WValue::Set(s) => Replacement::Set(SetTerm::Lit(s.clone())),
        };
        bindings.insert(v, r);
    }
    let ground = f.substitute(&bindings)?;
    eval_ground(&eliminate_w(&ground)?)
}

fn eval_ground(f: &Formula) -> Result<bool, WmsoError> {
    let atom = |a: &Atom| -> Result<bool, WmsoError> {
        let c = |t: &Term| t.as_const().cloned().ok_or_else(|| WmsoError::Unbound(t.to_string()));
        let s = |t: &SetTerm| match t {
            SetTerm::Lit(l) => Ok(l.clone()),
            SetTerm::Var(v) => Err(WmsoError::Unbound(v.clone())),
        };
        Ok(match a {
            Atom::Lt(x, y) => c(x)? < c(y)?,
            Atom::Eq(x, y) => c(x)? == c(y)?,
            Atom::In(e, t) => s(t)?.contains(&c(e)?),
            Atom::SetEq(x, y) => s(x)? == s(y)?,
            Atom::A(..) => return Err(WmsoError::Unbound(a.to_string())),
        })
    };
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(a) => atom(a),
        Formula::Not(g) => Ok(!eval_ground(g)?),
        Formula::And(gs) => gs.iter().try_fold(true, |acc, g| Ok(acc && eval_ground(g)?)),
        Formula::Or(gs) => gs.iter().try_fold(false, |acc, g| Ok(acc || eval_ground(g)?)),
        Formula::Imp(a, b) => Ok(!eval_ground(a)? || eval_ground(b)?),
        Formula::Quant(..) => Err(WmsoError::FragmentViolation {
            formula: f.to_string(),
            reason: "quantifier survived elimination".into(),
        }),
    }
}

/// `E`: element literals together with the elements of every set literal.
pub fn parameter_bound(f: &Formula) -> BTreeSet<Rational> {
    f.parameter_closure()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Language};
    use crate::rational::q;

    fn w(s: &str) -> Formula {
        parse_formula(s, Language::Wmso).unwrap()
    }

    fn env(pairs: &[(&str, WValue)]) -> BTreeMap<String, WValue> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    fn el(s: &str) -> WValue {
        WValue::Element(q(s))
    }

    fn both(f: &str, e: &BTreeMap<String, WValue>) -> bool {
        let f = w(f);
        let a = eval_wformula(&f, e).unwrap();
        let b = vs_evaluate(&f, e, DEFAULT_ANCHOR_LIMIT).unwrap();
        assert_eq!(a, b, "disagreement on {f}");
        a
    }

    #[test]
    fn self_equality_keeps_the_set_bound() {
        let f = w("(exists-set S (and (= S S) (not (= S (set 1 2)))))");
        let out = eliminate_w(&f).unwrap();
        assert!(out.free_variable_names().is_empty(), "{out}");
        assert!(both(
            "(exists-set S (and (or (= S S) (in y T)) (not (= S (set 1 2)))))",
            &env(&[("y", el("1")), ("T", WValue::Set(FiniteSetQ::empty()))])
        ));
    }

    #[test]
    fn eval_examples() {
        assert!(both("(in y (set 1))", &env(&[("y", el("1"))])));
        assert!(both("(exists-set S (in y S))", &env(&[("y", el("3"))])));
        assert!(!both("(forall-set S (in y S))", &env(&[("y", el("3"))])));
    }

    #[test]
    fn eliminate_examples() {
        let r = eliminate_w(&w("(exists-set S (and (in y S) (not (in y2 S))))")).unwrap();
        assert_eq!(r, w("(not (= y y2))"));
        assert_eq!(
            eliminate_w(&w("(forall-set S (imp (in y S) (in y S)))")).unwrap(),
            Formula::True
        );
        assert_eq!(
            eliminate_w(&w("(exists z (and (in z (set 1 2)) (< 1 z)))")).unwrap(),
            Formula::True
        );
    }

    #[test]
    fn oracle_examples() {
        let e = BTreeMap::new();
        assert!(both("(exists-set S (in 1/2 S))", &e));
        assert!(both("(forall z (not (in z (set))))", &e));
        assert!(!both("(exists z (forall-set S (in z S)))", &e));
    }

    #[test]
    fn elements_inside_set_quantifiers() {
        let e = BTreeMap::new();
        // a finite set cannot contain every point of an interval
        assert!(!both(
            "(exists-set S (forall y (imp (and (< 1 y) (< y 2)) (in y S))))",
            &e
        ));
        assert!(both(
            "(exists-set S (forall y (imp (in y S) (and (< 1 y) (< y 2)))))",
            &e
        ));
        assert!(both(
            "(exists-set S (and (exists y (and (in y S) (< 5 y))) (exists y (and (in y S) (< y 1)))))",
            &e
        ));
        assert!(both("(exists-set S (forall y (or (in y S) (not (in y S)))))", &e));
        assert!(!both("(forall-set S (exists y (in y S)))", &e));
        assert!(both("(forall-set S (exists y (not (in y S))))", &e));
        let e2 = env(&[("x", el("2"))]);
        assert!(both(
            "(exists-set S (and (in x S) (forall y (imp (in y S) (= y x)))))",
            &e2
        ));
        assert!(!both(
            "(exists-set S (and (in x S) (forall y (imp (in y S) (< x y)))))",
            &e2
        ));
    }

    #[test]
    fn set_equalities() {
        let e = env(&[("T", WValue::Set(FiniteSetQ::new([q("1"), q("2")]).unwrap()))]);
        assert!(both("(exists-set S (and (= S T) (in 1 S)))", &e));
        assert!(!both("(exists-set S (and (= S T) (in 3 S)))", &e));
        assert!(both("(exists-set S (not (= S T)))", &e));
        assert!(both("(forall-set S (exists-set R (not (= S R))))", &BTreeMap::new()));
    }

    #[test]
    fn free_set_variables_leave_residuals() {
        let f = w("(exists y (and (in y S) (< y 1)))");
        let r = eliminate_w(&f).unwrap();
        assert!(!r.is_quantifier_free());
        let s = WValue::Set(FiniteSetQ::new([q("1/2")]).unwrap());
        assert!(eval_wformula(&f, &env(&[("S", s)])).unwrap());
    }

    #[test]
    fn fragment_violation_is_reported() {
        let f = w("(forall-set S (exists-set T (forall y (and (imp (in y S) (in y T)) (imp (in y T) (in y S))))))");
        assert!(matches!(eliminate_w(&f), Err(WmsoError::FragmentViolation { .. })));
        let f = w("(exists-set S (forall y (exists z (and (< y z) (in z S)))))");
        assert!(matches!(eliminate_w(&f), Err(WmsoError::FragmentViolation { .. })));
        // the element may also sit outside the inner block when it resolves
        assert!(both(
            "(exists-set S (forall-set T (forall y (imp (in y S) (in y T)))))",
            &BTreeMap::new()
        ));
    }

    #[test]
    fn parameters_stay_in_e() {
        let f = w("(exists-set S (and (in 1 S) (forall y (imp (in y S) (or (= y 1) (< 3 y))))))");
        let r = eliminate_w(&f).unwrap();
        assert!(r.element_constants().is_subset(&parameter_bound(&f)));
    }

    #[test]
    fn corpus_agreement_and_parameter_bound() {
        let envs = [
            env(&[
                ("y", el("3/2")),
                ("T", WValue::Set(FiniteSetQ::new([q("1/2"), q("2")]).unwrap())),
            ]),
            env(&[("y", el("1")), ("T", WValue::Set(FiniteSetQ::empty()))]),
        ];
        let (mut agree, mut skipped) = (0, 0);
        for seed in 0..300 {
            let f = crate::corpus::wmso_fragment(&mut crate::corpus::rng(seed), 4);
            let r = eliminate_w(&f).unwrap();
            assert!(r.element_constants().is_subset(&parameter_bound(&f)), "{f} => {r}");
            for e in &envs {
                match vs_evaluate(&f, e, DEFAULT_ANCHOR_LIMIT) {
                    Ok(b) => {
                        assert_eq!(eval_wformula(&f, e).unwrap(), b, "disagreement on {f}");
                        agree += 1;
                    }
                    Err(WmsoError::AnchorLimit { .. }) => skipped += 1,
                    Err(err) => panic!("{f}: {err}"),
                }
            }
        }
        assert!(
            agree >= 500 && skipped < 20,
            "{agree} agreed, {skipped} over the anchor limit"
        );
    }
}
