use std::collections::BTreeMap;

use super::DloError;
use crate::formula::{Atom, Binder, Formula, Guard, Quantifier, Term};
use crate::rational::Rational;

pub type Env = BTreeMap<String, Rational>;

pub(crate) fn term_value<'a>(t: &'a Term, env: &'a Env) -> Result<&'a Rational, DloError> {
    match t {
        Term::Const(c) => Ok(c),
        Term::Var(v) => env.get(v).ok_or_else(|| DloError::Unbound(v.clone())),
    }
}

fn order_atom(a: &Atom, env: &Env) -> Result<bool, DloError> {
    match a {
        Atom::Lt(x, y) => Ok(term_value(x, env)? < term_value(y, env)?),
        Atom::Eq(x, y) => Ok(term_value(x, env)? == term_value(y, env)?),
        other => Err(DloError::NonOrderAtom(other.to_string())),
    }
}

/// Truth of a quantifier-free pure-order formula at `env`.
pub fn eval_qf(f: &Formula, env: &Env) -> Result<bool, DloError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(a) => order_atom(a, env),
        Formula::Not(g) => Ok(!eval_qf(g, env)?),
        Formula::And(gs) => {
            for g in gs {
                if !eval_qf(g, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_qf(g, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Imp(a, b) => Ok(!eval_qf(a, env)? || eval_qf(b, env)?),
        Formula::Quant(..) => Err(DloError::Quantified),
    }
}

/// Sample points for a quantified variable over the sorted, deduplicated
/// `anchors`: each anchor, the midpoint of each gap, and one point beyond
/// each end. Guards restrict to one side of 0 (0 is then treated as an
/// anchor but excluded).
pub fn sample_points(anchors: &[Rational], guard: Guard) -> Vec<Rational> {
    let mut a = anchors.to_vec();
    if guard != Guard::Any {
        a.push(Rational::zero());
    }
    a.sort();
    a.dedup();
    let mut out = Vec::new();
    match a.first() {
        Some(first) => out.push(first - &Rational::one()),
        None => out.push(Rational::zero()),
    }
    for (i, x) in a.iter().enumerate() {
        out.push(x.clone());
        match a.get(i + 1) {
            Some(y) => out.push(x.midpoint(y)),
            None => out.push(x + &Rational::one()),
        }
    }
    out.retain(|x| match guard {
        Guard::Any => true,
        Guard::Neg => x.is_negative(),
        Guard::Pos => x.is_positive(),
    });
    out
}

/// Decides a pure-order formula over ℚ by letting each quantifier range over
/// [`sample_points`] of the current values and the formula's constants.
/// Independent of [`super::eliminate_quantifiers`]; used as its oracle.
pub fn semantic_eval(f: &Formula, env: &Env) -> Result<bool, DloError> {
    let consts: Vec<Rational> = f.element_constants().into_iter().collect();
    let mut env = env.clone();
    eval_rec(f, &mut env, &consts)
}

fn eval_rec(f: &Formula, env: &mut Env, consts: &[Rational]) -> Result<bool, DloError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(a) => order_atom(a, env),
        Formula::Not(g) => Ok(!eval_rec(g, env, consts)?),
        Formula::And(gs) => {
            for g in gs {
                if !eval_rec(g, env, consts)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_rec(g, env, consts)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Imp(a, b) => Ok(!eval_rec(a, env, consts)? || eval_rec(b, env, consts)?),
        Formula::Quant(q, binder, v, body) => {
            let Binder::Element(guard) = binder else {
                return Err(DloError::SetQuantifier(v.clone()));
            };
            let mut anchors: Vec<Rational> = consts.to_vec();
            anchors.extend(env.iter().filter(|(k, _)| *k != v).map(|(_, x)| x.clone()));
            let saved = env.remove(v);
            let want = *q == Quantifier::Exists;
            let mut result = !want;
            for x in sample_points(&anchors, *guard) {
                env.insert(v.clone(), x);
                if eval_rec(body, env, consts)? == want {
                    result = want;
                    break;
                }
            }
            env.remove(v);
            if let Some(s) = saved {
                env.insert(v.clone(), s);
            }
            Ok(result)
        }
    }
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
    fn quantifier_free() {
        let env = Env::from([("x".into(), q("1")), ("y".into(), q("2"))]);
        assert!(eval_qf(&p("(and (< x y) (not (= x y)))"), &env).unwrap());
        assert!(eval_qf(&p("(imp (< y x) false)"), &env).unwrap());
        assert!(eval_qf(&p("(< z 1)"), &env).is_err());
        assert!(eval_qf(&p("(A x y)"), &env).is_err());
    }

    #[test]
    fn density_and_no_endpoints() {
        let env = Env::from([("x".into(), q("1")), ("y".into(), q("2"))]);
        assert!(semantic_eval(&p("(exists z (and (< x z) (< z y)))"), &env).unwrap());
        assert!(semantic_eval(&p("(exists z (< z x))"), &env).unwrap());
        assert!(!semantic_eval(&p("(exists z (and (< z x) (< y z)))"), &env).unwrap());
        assert!(semantic_eval(&p("(forall-neg z (< z 0))"), &Env::new()).unwrap());
        assert!(!semantic_eval(&p("(exists-pos z (< z 0))"), &Env::new()).unwrap());
    }
}
