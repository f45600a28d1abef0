//! Direct evaluation in `(ℚ, <, 0, A)`, independent of the normal-form
//! pipeline.
//!
//! A quantified negative variable only matters through its position relative
//! to the values in scope and through its code `ρ(t)`. Codes are dense, so
//! every combination of an open position and a finite label is realized by
//! some rational; the evaluator therefore lets a fresh negative value carry a
//! chosen label rather than its own code. Labels range over the subsets of
//! the positive values the body can observe.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::coding::fiber;
use crate::dlo::sample_points;
use crate::formula::{Atom, Binder, Formula, Guard, Quantifier, Term};
use crate::rational::Rational;
use crate::wmso::FiniteSetQ;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("set atom or binder `{0}` in an order formula")]
    NotOrderA(String),
    #[error("{size} observable points exceed the label limit {limit}")]
    LabelLimit { size: usize, limit: usize },
}

/// Default bound on the number of points a fresh label is chosen over.
pub const DEFAULT_LABEL_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Value {
    at: Rational,
    /// The code of a negative value (empty otherwise).
    label: FiniteSetQ,
}

impl Value {
    fn concrete(x: &Rational) -> Value {
        Value {
            at: x.clone(),
            label: fiber(x),
        }
    }
}

/// Truth of `f` at `point` in `(ℚ, <, 0, A)`.
pub fn eval_direct(f: &Formula, point: &BTreeMap<String, Rational>) -> Result<bool, SemanticsError> {
    eval_direct_with(f, point, DEFAULT_LABEL_LIMIT)
}

pub fn eval_direct_with(f: &Formula, point: &BTreeMap<String, Rational>, limit: usize) -> Result<bool, SemanticsError> {
    let consts: Vec<Rational> = f.element_constants().into_iter().collect();
    let mut env: BTreeMap<String, Value> = point.iter().map(|(k, v)| (k.clone(), Value::concrete(v))).collect();
    Evaluator { consts, limit }.eval(f, &mut env)
}

struct Evaluator {
    consts: Vec<Rational>,
    limit: usize,
}

/// Second arguments of `A`-atoms in `f`, split into terms free in `f` and
/// whether some bound variable occurs there.
fn observed(f: &Formula) -> (Vec<Term>, bool) {
    let free = f.free_variable_names();
    let mut terms = Vec::new();
    let mut bound = false;
    f.visit_atoms(&mut |a| {
        if let Atom::A(_, y) = a {
            match y {
                Term::Var(v) if !free.contains(v) => bound = true,
                _ if !terms.contains(y) => terms.push(y.clone()),
                _ => {}
            }
        }
    });
    (terms, bound)
}

fn live_quantifiers(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => 0,
        Formula::Not(g) => live_quantifiers(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().map(live_quantifiers).sum(),
        Formula::Imp(a, b) => live_quantifiers(a) + live_quantifiers(b),
        Formula::Quant(_, _, v, body) => live_quantifiers(body) + body.free_variable_names().contains(v) as usize,
    }
}

impl Evaluator {
    fn value(&self, t: &Term, env: &BTreeMap<String, Value>) -> Result<Value, SemanticsError> {
        match t {
            Term::Const(c) => Ok(Value::concrete(c)),
            Term::Var(v) => env.get(v).cloned().ok_or_else(|| SemanticsError::Unbound(v.clone())),
        }
    }

    fn atom(&self, a: &Atom, env: &BTreeMap<String, Value>) -> Result<bool, SemanticsError> {
        Ok(match a {
            Atom::Lt(x, y) => self.value(x, env)?.at < self.value(y, env)?.at,
            Atom::Eq(x, y) => self.value(x, env)?.at == self.value(y, env)?.at,
            Atom::A(x, y) => {
                let (x, y) = (self.value(x, env)?, self.value(y, env)?);
                x.at.is_negative() && y.at.is_positive() && x.label.contains(&y.at)
            }
            other => return Err(SemanticsError::NotOrderA(other.to_string())),
        })
    }

    /// Every value in scope: constants, current values and their labels.
    fn anchors(&self, env: &BTreeMap<String, Value>, skip: &str) -> (Vec<Rational>, Vec<Rational>) {
        let mut at: Vec<Rational> = self.consts.clone();
        let mut labels = Vec::new();
        for c in &self.consts {
            labels.extend(fiber(c).iter().cloned());
        }
        for (k, v) in env {
            if k != skip {
                at.push(v.at.clone());
                labels.extend(v.label.iter().cloned());
            }
        }
        at.sort();
        at.dedup();
        labels.sort();
        labels.dedup();
        (at, labels)
    }

    /// Labels a fresh negative value can usefully carry.
    fn labels(
        &self,
        body: &Formula,
        env: &BTreeMap<String, Value>,
        pos_anchors: &[Rational],
    ) -> Result<Vec<FiniteSetQ>, SemanticsError> {
        let (terms, bound) = observed(body);
        let mut pool: BTreeSet<Rational> = BTreeSet::new();
        for t in &terms {
            match t {
                Term::Const(c) if c.is_positive() => {
                    pool.insert(c.clone());
                }
                Term::Var(v) => {
                    if let Some(x) = env.get(v) {
                        if x.at.is_positive() {
                            pool.insert(x.at.clone());
                        }
                    }
                }
                _ => {}
            }
        }
        let mut gaps: Vec<Vec<Rational>> = Vec::new();
        if bound {
            pool.extend(pos_anchors.iter().cloned());
            // a bound variable can also land strictly between anchors
            let k = live_quantifiers(body);
            let mut cuts = vec![Rational::zero()];
            cuts.extend(pool.iter().cloned());
            for (i, lo) in cuts.iter().enumerate() {
                let g: Vec<Rational> = (1..=k)
                    .map(|j| {
                        let j = Rational::from(j as i64);
                        match cuts.get(i + 1) {
                            Some(hi) => lo + &(&(hi - lo) * &j / Rational::from(k as i64 + 1)),
                            None => lo + &j,
                        }
                    })
                    .collect();
                gaps.push(g);
            }
        }
        let pool: Vec<Rational> = pool.into_iter().collect();
        let size = pool.len() + gaps.iter().map(Vec::len).sum::<usize>();
        if size > self.limit {
            return Err(SemanticsError::LabelLimit {
                size,
                limit: self.limit,
            });
        }
        let mut out: Vec<Vec<Rational>> = (0..1u64 << pool.len())
            .map(|mask| {
                (0..pool.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| pool[i].clone())
                    .collect()
            })
            .collect();
        // points of one gap are interchangeable, so only their number matters
        for g in &gaps {
            out = out
                .into_iter()
                .flat_map(|base| {
                    (0..=g.len()).map(move |c| {
                        let mut s = base.clone();
                        s.extend(g[..c].iter().cloned());
                        s
                    })
                })
                .collect();
        }
        Ok(out
            .into_iter()
            .map(|s| FiniteSetQ::new(s).expect("positive labels"))
            .collect())
    }

    fn candidates(
        &self,
        guard: Guard,
        v: &str,
        body: &Formula,
        env: &BTreeMap<String, Value>,
    ) -> Result<Vec<Value>, SemanticsError> {
        let (at, labels) = self.anchors(env, v);
        let mut out = Vec::new();
        if guard != Guard::Pos {
            let existing: BTreeMap<Rational, FiniteSetQ> = self
                .consts
                .iter()
                .map(Value::concrete)
                .chain(env.iter().filter(|(k, _)| k.as_str() != v).map(|(_, x)| x.clone()))
                .map(|x| (x.at, x.label))
                .collect();
            let mut pos_anchors: Vec<Rational> = at.iter().filter(|x| x.is_positive()).cloned().collect();
            pos_anchors.extend(labels.iter().cloned());
            pos_anchors.sort();
            pos_anchors.dedup();
            let mut fresh_labels: Option<Vec<FiniteSetQ>> = None;
            for x in sample_points(&at, Guard::Neg) {
                match existing.get(&x) {
                    Some(l) => out.push(Value {
                        at: x,
                        label: l.clone(),
                    }),
                    None => {
                        if fresh_labels.is_none() {
                            fresh_labels = Some(self.labels(body, env, &pos_anchors)?);
                        }
                        for l in fresh_labels.as_ref().unwrap() {
                            out.push(Value {
                                at: x.clone(),
                                label: l.clone(),
                            });
                        }
                    }
                }
            }
        }
        if guard == Guard::Any {
            out.push(Value {
                at: Rational::zero(),
                label: FiniteSetQ::empty(),
            });
        }
        if guard != Guard::Neg {
            let mut anchors = at.clone();
            anchors.extend(labels);
            anchors.sort();
            anchors.dedup();
            for x in sample_points(&anchors, Guard::Pos) {
                out.push(Value {
                    at: x,
                    label: FiniteSetQ::empty(),
                });
            }
        }
        Ok(out)
    }

    fn eval(&self, f: &Formula, env: &mut BTreeMap<String, Value>) -> Result<bool, SemanticsError> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Atom(a) => self.atom(a, env),
            Formula::Not(g) => Ok(!self.eval(g, env)?),
            Formula::And(gs) => {
                for g in gs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Imp(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            Formula::Quant(q, Binder::Element(guard), v, body) => {
                if !body.free_variable_names().contains(v) {
                    return self.eval(body, env);
                }
                let candidates = self.candidates(*guard, v, body, env)?;
                let saved = env.remove(v);
                let want = *q == Quantifier::Exists;
                let mut result = Ok(!want);
                for c in candidates {
                    env.insert(v.clone(), c);
                    match self.eval(body, env) {
                        Ok(b) if b == want => {
                            result = Ok(want);
                            break;
                        }
                        Ok(_) => {}
                        Err(e) => {
                            result = Err(e);
                            break;
                        }
                    }
                }
                env.remove(v);
                if let Some(s) = saved {
                    env.insert(v.clone(), s);
                }
                result
            }
            Formula::Quant(_, Binder::Set, v, _) => Err(SemanticsError::NotOrderA(v.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{eval_a, find_set_in_interval};
    use crate::formula::{parse_formula, Language};
    use crate::rational::q;

    fn p(s: &str) -> Formula {
        parse_formula(s, Language::OrderA).unwrap()
    }

    fn point(pairs: &[(&str, &str)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, v)| (k.to_string(), q(v))).collect()
    }

    #[test]
    fn atoms_use_the_real_code() {
        assert!(eval_direct(&p("(A x y)"), &point(&[("x", "-1/2"), ("y", "1")])).unwrap());
        assert!(!eval_direct(&p("(A x y)"), &point(&[("x", "-1/2"), ("y", "2")])).unwrap());
        assert!(!eval_direct(&p("(A x y)"), &point(&[("x", "1"), ("y", "1")])).unwrap());
        assert_eq!(
            eval_direct(&p("(A -1/8 1/2)"), &BTreeMap::new()).unwrap(),
            eval_a(&q("-1/8"), &q("1/2"))
        );
    }

    #[test]
    fn quantified_codes_are_free() {
        // some code contains 17, and a concrete one can be found
        assert!(eval_direct(&p("(exists-neg t (A t y))"), &point(&[("y", "17")])).unwrap());
        let x = find_set_in_interval(&FiniteSetQ::singleton(q("17")).unwrap(), &q("-1"), &q("-1/2")).unwrap();
        assert!(eval_a(&x, &q("17")));
        // no code contains every positive rational
        assert!(!eval_direct(&p("(exists-neg t (forall-pos y (A t y)))"), &BTreeMap::new()).unwrap());
        // between two points there is a code avoiding y and one containing it
        let f = p("(forall-neg u (forall-neg w (imp (< u w) (exists t (and (< u t) (< t w) (A t y) (exists s (and (< u s) (< s w) (not (A s y)))))))))");
        assert!(eval_direct(&f, &point(&[("y", "3")])).unwrap());
    }

    #[test]
    fn fixed_points_keep_their_code() {
        // t = -1/2 forces the code {1}
        assert!(!eval_direct(&p("(exists-neg t (and (= t -1/2) (A t 2)))"), &BTreeMap::new()).unwrap());
        assert!(eval_direct(&p("(exists-neg t (and (= t -1/2) (A t 1)))"), &BTreeMap::new()).unwrap());
        assert!(eval_direct(&p("(exists-neg t (and (= t x) (A t 1)))"), &point(&[("x", "-3/2")])).unwrap());
    }

    #[test]
    fn finiteness_of_fibers() {
        // every fiber of a point is finite: it has an upper bound
        let f = p("(exists-pos b (forall-pos y (imp (A x y) (< y b))))");
        for x in ["-1/2", "-1/8", "-5/12", "-3"] {
            assert!(eval_direct(&f, &point(&[("x", x)])).unwrap());
        }
    }
}
