use std::collections::BTreeMap;

use super::{WValue, WmsoError};
use crate::dlo::sample_points;
use crate::formula::{Atom, Binder, Formula, Guard, Quantifier, SetTerm, Term};
use crate::rational::Rational;
use crate::wmso::FiniteSetQ;

/// Decides `f` by direct recursion over finite candidate sets.
///
/// An element quantifier ranges over the sample points (anchors, gap
/// midpoints, end points) of every value in scope: constants, elements of set
/// literals, current element values and elements of current sets. A set
/// quantifier ranges over all subsets of those anchors together with up to
/// `k` fresh points in each gap, where `k` counts the quantifiers in its
/// scope that could observe them. `anchor_limit` bounds the size of that
/// pool.
pub fn vs_evaluate(f: &Formula, env: &BTreeMap<String, WValue>, anchor_limit: usize) -> Result<bool, WmsoError> {
    let mut consts: Vec<Rational> = f.parameter_closure().into_iter().collect();
    consts.sort();
    let mut env = env.clone();
    Oracle {
        consts,
        limit: anchor_limit,
    }
    .eval(f, &mut env)
}

struct Oracle {
    consts: Vec<Rational>,
    limit: usize,
}

/// Fresh points per gap a set quantifier needs: one per element quantifier
/// that could find them, and one per set quantifier (plus one) when set
/// equality can tell sets apart by them.
fn fresh_needed(body: &Formula) -> usize {
    let (mut elems, mut sets, mut set_eq) = (0, 0, false);
    visit_live(body, &mut |b| match b {
        Binder::Element(_) => elems += 1,
        Binder::Set => sets += 1,
    });
    body.visit_atoms(&mut |a| set_eq |= matches!(a, Atom::SetEq(s, t) if s != t));
    elems + if set_eq { sets + 1 } else { 0 }
}

/// Binders whose variable occurs in their body.
fn visit_live(f: &Formula, out: &mut impl FnMut(Binder)) {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => {}
        Formula::Not(g) => visit_live(g, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| visit_live(g, out)),
        Formula::Imp(a, b) => {
            visit_live(a, out);
            visit_live(b, out);
        }
        Formula::Quant(_, b, v, body) => {
            if body.free_variable_names().contains(v) {
                out(*b);
            }
            visit_live(body, out);
        }
    }
}

/// `k` evenly spaced points in each gap of `0 < pos[0] < … < +∞`.
fn gap_points(pos: &[Rational], k: usize) -> Vec<Vec<Rational>> {
    if k == 0 {
        return Vec::new();
    }
    let mut cuts = vec![Rational::zero()];
    cuts.extend(pos.iter().cloned());
    cuts.iter()
        .enumerate()
        .map(|(i, lo)| {
            (1..=k)
                .map(|j| {
                    let j = Rational::from(j as i64);
                    match cuts.get(i + 1) {
                        Some(hi) => lo + &(&(hi - lo) * &j / Rational::from(k as i64 + 1)),
                        None => lo + &j,
                    }
                })
                .collect()
        })
        .collect()
}

/// Every subset of `pos`, combined with a prefix of each gap's points. Points
/// inside one gap are interchangeable by an order automorphism fixing the
/// anchors, so only the count per gap matters.
fn set_candidates(pos: &[Rational], gaps: &[Vec<Rational>]) -> Vec<WValue> {
    let mut out: Vec<Vec<Rational>> = (0..1u64 << pos.len())
        .map(|mask| {
            (0..pos.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pos[i].clone())
                .collect()
        })
        .collect();
    for g in gaps {
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
    out.into_iter()
        .map(|s| WValue::Set(FiniteSetQ::new(s).expect("positive pool")))
        .collect()
}

impl Oracle {
    fn anchors(&self, env: &BTreeMap<String, WValue>, skip: &str) -> Vec<Rational> {
        let mut a = self.consts.clone();
        for (k, v) in env {
            if k == skip {
                continue;
            }
            match v {
                WValue::Element(x) => a.push(x.clone()),
                WValue::Set(s) => a.extend(s.iter().cloned()),
            }
        }
        a.sort();
        a.dedup();
        a
    }

    fn term(&self, t: &Term, env: &BTreeMap<String, WValue>) -> Result<Rational, WmsoError> {
        match t {
            Term::Const(c) => Ok(c.clone()),
            Term::Var(v) => match env.get(v) {
                Some(WValue::Element(x)) => Ok(x.clone()),
                _ => Err(WmsoError::Unbound(v.clone())),
            },
        }
    }

    fn set(&self, s: &SetTerm, env: &BTreeMap<String, WValue>) -> Result<FiniteSetQ, WmsoError> {
        match s {
            SetTerm::Lit(l) => Ok(l.clone()),
            SetTerm::Var(v) => match env.get(v) {
                Some(WValue::Set(x)) => Ok(x.clone()),
                _ => Err(WmsoError::Unbound(v.clone())),
            },
        }
    }

    fn atom(&self, a: &Atom, env: &BTreeMap<String, WValue>) -> Result<bool, WmsoError> {
        Ok(match a {
            Atom::Lt(x, y) => self.term(x, env)? < self.term(y, env)?,
            Atom::Eq(x, y) => self.term(x, env)? == self.term(y, env)?,
            Atom::In(e, s) => self.set(s, env)?.contains(&self.term(e, env)?),
            Atom::SetEq(s, t) => self.set(s, env)? == self.set(t, env)?,
            Atom::A(..) => {
                return Err(WmsoError::FragmentViolation {
                    formula: a.to_string(),
                    reason: "relation A in weak monadic formula".into(),
                })
            }
        })
    }

    fn eval(&self, f: &Formula, env: &mut BTreeMap<String, WValue>) -> Result<bool, WmsoError> {
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
            Formula::Quant(q, binder, v, body) => {
                let anchors = self.anchors(env, v);
                let candidates: Vec<WValue> = match binder {
                    Binder::Element(_) => sample_points(&anchors, Guard::Pos)
                        .into_iter()
                        .map(WValue::Element)
                        .collect(),
                    Binder::Set => {
                        let pos: Vec<Rational> = anchors.iter().filter(|x| x.is_positive()).cloned().collect();
                        let k = fresh_needed(body);
                        let gaps = gap_points(&pos, k);
                        let size = pos.len() + gaps.len() * k;
                        if size > self.limit {
                            return Err(WmsoError::AnchorLimit {
                                size,
                                limit: self.limit,
                            });
                        }
                        set_candidates(&pos, &gaps)
                    }
                };
                if !body.free_variable_names().contains(v) {
                    return self.eval(body, env);
                }
                let saved = env.remove(v);
                let want = *q == Quantifier::Exists;
                let mut result = !want;
                for c in candidates {
                    env.insert(v.clone(), c);
                    let r = self.eval(body, env);
                    match r {
                        Ok(b) if b == want => {
                            result = want;
                            break;
                        }
                        Ok(_) => {}
                        Err(e) => {
                            env.remove(v);
                            if let Some(s) = saved {
                                env.insert(v.clone(), s);
                            }
                            return Err(e);
                        }
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
}
