//! Quantifier elimination in `(ℚ_{>0}, 𝓕, <, ∈)` on the fragment that the
//! pipeline produces.
//!
//! Quantifiers are removed innermost first. Membership in a set literal is
//! expanded to equalities. An element quantifier is eliminated by dense-order
//! test points unless its variable occurs in a membership atom against a set
//! variable, in which case it is kept as a residual for the set quantifier
//! that binds that variable. A block `∃F̄ Φ` is eliminated per disjunct of
//! `Φ` by enumerating membership patterns of the element terms against `F̄`:
//!
//! * existential residuals are pulled in front as element variables;
//! * universal residuals are merged into one `∀y ψ`, which holds for some
//!   choice of finite sets iff every `y` off the element terms that fails
//!   `ψ` with all memberships false can be repaired by some nonzero
//!   membership vector, and the failures form a finite set.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::pattern::MembershipPattern;
use super::WmsoError;
use crate::dlo::{exists_qf, map_atoms, simplify};
use crate::formula::{fresh_name, Atom, Binder, Formula, Guard, Language, Quantifier, SetTerm, Term};

/// A quantifier-free equivalent of `f` in `(ℚ_{>0}, 𝓕, <, ∈)`, provided every
/// membership of a quantified element in a quantified set can be resolved.
///
/// Quantifiers whose variable is tested for membership in a free set variable
/// cannot be removed; they are left in place and disappear once the set
/// variable is instantiated (see [`super::eval_wformula`]).
pub fn eliminate_w(f: &Formula) -> Result<Formula, WmsoError> {
    f.check_language(Language::Wmso)?;
    let f = f.rename_apart(&BTreeSet::new());
    let mut cx = Eliminator {
        names: f.all_names(),
        bound: Vec::new(),
    };
    let out = cx.elim(&f)?;
    Ok(fold_zero(&simplify(&out)))
}

/// Whether `eliminate_w` would accept `f` without reporting a fragment
/// violation; residual quantifiers against free set variables are allowed.
pub fn check_fragment(f: &Formula) -> Result<(), WmsoError> {
    eliminate_w(f).map(|_| ())
}

struct Eliminator {
    names: BTreeSet<String>,
    /// Set variables bound by enclosing set quantifiers.
    bound: Vec<String>,
}

/// Atoms `0 < t`, `t < 0`, `t = 0` have fixed truth values when every element
/// term is positive.
fn fold_zero(f: &Formula) -> Formula {
    let zero = Term::zero();
    simplify(&map_atoms(f, &|a| match a {
        Atom::Lt(x, y) if *x == zero && *y != zero => Formula::True,
        Atom::Lt(x, y) if *y == zero && *x != zero => Formula::False,
        Atom::Eq(x, y) if (*x == zero) != (*y == zero) => Formula::False,
        other => Formula::Atom(other.clone()),
    }))
}

fn expand_atom(a: &Atom) -> Formula {
    match a {
        Atom::In(e, SetTerm::Lit(l)) => match e {
            Term::Const(c) => {
                if l.contains(c) {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            Term::Var(_) => Formula::or_all(l.iter().map(|x| Formula::eq(e.clone(), Term::Const(x.clone())))),
        },
        Atom::SetEq(SetTerm::Lit(a), SetTerm::Lit(b)) => {
            if a == b {
                Formula::True
            } else {
                Formula::False
            }
        }
        other => simplify(&Formula::Atom(other.clone())),
    }
}

fn expand(f: &Formula) -> Formula {
    simplify(&map_atoms(f, &expand_atom))
}

/// `v` occurs inside a quantified subformula or in a membership against a
/// set variable.
fn blocked(v: &str, f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False => false,
        Formula::Atom(Atom::In(Term::Var(x), SetTerm::Var(_))) => x == v,
        Formula::Atom(_) => false,
        Formula::Not(g) => blocked(v, g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().any(|g| blocked(v, g)),
        Formula::Imp(a, b) => blocked(v, a) || blocked(v, b),
        Formula::Quant(..) => f.free_variable_names().contains(v),
    }
}

fn dual(q: Quantifier) -> Quantifier {
    match q {
        Quantifier::Exists => Quantifier::Forall,
        Quantifier::Forall => Quantifier::Exists,
    }
}

type Dnf = Vec<Vec<Formula>>;

fn product(a: Dnf, b: Dnf) -> Dnf {
    let mut out = Vec::new();
    for x in &a {
        for y in &b {
            let mut c = x.clone();
            for l in y {
                if !c.contains(l) {
                    c.push(l.clone());
                }
            }
            let clash = c.iter().any(|l| c.contains(&Formula::negate(l.clone())));
            if !clash {
                out.push(c);
            }
        }
    }
    out
}

/// Disjunctive normal form whose literals are atoms, negated atoms and
/// quantified subformulas (negations pushed through as dual quantifiers).
fn dnf(f: &Formula, positive: bool) -> Dnf {
    match (f, positive) {
        (Formula::True, true) | (Formula::False, false) => vec![vec![]],
        (Formula::True, false) | (Formula::False, true) => vec![],
        (Formula::Atom(_), true) => vec![vec![f.clone()]],
        (Formula::Atom(_), false) => vec![vec![Formula::not(f.clone())]],
        (Formula::Not(g), p) => dnf(g, !p),
        (Formula::And(gs), true) | (Formula::Or(gs), false) => {
            gs.iter().fold(vec![vec![]], |acc, g| product(acc, dnf(g, positive)))
        }
        (Formula::Or(gs), true) | (Formula::And(gs), false) => gs.iter().flat_map(|g| dnf(g, positive)).collect(),
        (Formula::Imp(a, b), true) => {
            let mut out = dnf(a, false);
            out.extend(dnf(b, true));
            out
        }
        (Formula::Imp(a, b), false) => product(dnf(a, true), dnf(b, false)),
        (Formula::Quant(..), true) => vec![vec![f.clone()]],
        (Formula::Quant(q, b, v, body), false) => {
            vec![vec![Formula::Quant(
                dual(*q),
                *b,
                v.clone(),
                Box::new(Formula::negate((**body).clone())),
            )]]
        }
    }
}

fn mentions(f: &Formula, sets: &BTreeSet<String>) -> bool {
    f.free_variable_names().iter().any(|v| sets.contains(v))
}

fn as_set_var<'a>(t: &'a SetTerm, sets: &BTreeSet<String>) -> Option<&'a str> {
    match t {
        SetTerm::Var(v) if sets.contains(v) => Some(v),
        _ => None,
    }
}

fn violation(f: &Formula, reason: &str) -> WmsoError {
    WmsoError::FragmentViolation {
        formula: f.to_string(),
        reason: reason.to_string(),
    }
}

impl Eliminator {
    fn fresh(&mut self, base: &str) -> String {
        let n = fresh_name(base, &self.names);
        self.names.insert(n.clone());
        n
    }

    fn elim(&mut self, f: &Formula) -> Result<Formula, WmsoError> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(a) => expand_atom(a),
            Formula::Not(g) => Formula::negate(self.elim(g)?),
            Formula::And(gs) => simplify(&Formula::and_all(
                gs.iter().map(|g| self.elim(g)).collect::<Result<Vec<_>, _>>()?,
            )),
            Formula::Or(gs) => simplify(&Formula::or_all(
                gs.iter().map(|g| self.elim(g)).collect::<Result<Vec<_>, _>>()?,
            )),
            Formula::Imp(a, b) => simplify(&Formula::imp(self.elim(a)?, self.elim(b)?)),
            Formula::Quant(q, Binder::Element(_), v, body) => {
                let b = self.elim(body)?;
                self.element_quantifier(*q, v, b)
            }
            Formula::Quant(q, Binder::Set, v, body) => {
                let mut vars = vec![v.clone()];
                let mut inner: &Formula = body;
                while let Formula::Quant(q2, Binder::Set, v2, b2) = inner {
                    if q2 != q {
                        break;
                    }
                    vars.push(v2.clone());
                    inner = b2;
                }
                self.bound.extend(vars.iter().cloned());
                let b = self.elim(inner);
                self.bound.truncate(self.bound.len() - vars.len());
                let b = b?;
                match q {
                    Quantifier::Exists => self.set_block(&vars, &b)?,
                    Quantifier::Forall => Formula::negate(self.set_block(&vars, &Formula::negate(b))?),
                }
            }
        })
    }

    /// `∃v φ` over `ℚ_{>0}` for quantifier-free `φ`.
    fn exists_positive(v: &str, phi: &Formula) -> Formula {
        let body = Formula::and_all([Formula::lt(Term::zero(), Term::var(v)), phi.clone()]);
        fold_zero(&exists_qf(v, &simplify(&body)))
    }

    fn element_quantifier(&mut self, q: Quantifier, v: &str, body: Formula) -> Formula {
        if !body.free_variable_names().contains(v) {
            return body;
        }
        if blocked(v, &body) {
            return Formula::Quant(q, Binder::Element(Guard::Any), v.to_string(), Box::new(body));
        }
        match q {
            Quantifier::Exists => Self::exists_positive(v, &body),
            Quantifier::Forall => Formula::negate(Self::exists_positive(v, &Formula::negate(body))),
        }
    }

    fn set_block(&mut self, vars: &[String], body: &Formula) -> Result<Formula, WmsoError> {
        let all: BTreeSet<String> = vars.iter().cloned().collect();
        let mut queue: VecDeque<(Vec<Formula>, Vec<String>, BTreeSet<String>)> = dnf(body, true)
            .into_iter()
            .map(|d| (d, Vec::new(), all.clone()))
            .collect();
        let mut out = Vec::new();
        'work: while let Some((lits, pulled, sets)) = queue.pop_front() {
            for (i, l) in lits.iter().enumerate() {
                match l {
                    Formula::Atom(Atom::SetEq(a, b))
                        if as_set_var(a, &sets).is_some() || as_set_var(b, &sets).is_some() =>
                    {
                        let (var, other) = match as_set_var(a, &sets) {
                            Some(v) => (v.to_string(), b.clone()),
                            None => (as_set_var(b, &sets).unwrap().to_string(), a.clone()),
                        };
                        let mut rest: Vec<Formula> = lits.clone();
                        rest.remove(i);
                        let mut sets2 = sets.clone();
                        // `F = F` is dropped; `F` stays bound
                        if other != SetTerm::Var(var.clone()) {
                            sets2.remove(&var);
                            rest = rest.iter().map(|g| expand(&g.subst_set(&var, &other))).collect();
                        }
                        for d in dnf(&Formula::and_all(rest), true) {
                            queue.push_back((d, pulled.clone(), sets2.clone()));
                        }
                        continue 'work;
                    }
                    Formula::Not(inner) if matches!(&**inner, Formula::Atom(Atom::SetEq(..))) && mentions(l, &sets) => {
                        let Formula::Atom(Atom::SetEq(a, b)) = &**inner else {
                            unreachable!()
                        };
                        let y = self.fresh("w");
                        let ya = Formula::member(Term::var(&y), a.clone());
                        let yb = Formula::member(Term::var(&y), b.clone());
                        let differ = Formula::or_all([
                            Formula::and_all([ya.clone(), Formula::not(yb.clone())]),
                            Formula::and_all([Formula::not(ya), yb]),
                        ]);
                        let mut rest = lits.clone();
                        rest[i] = Formula::exists(Binder::Element(Guard::Any), &y, expand(&differ));
                        queue.push_back((rest, pulled.clone(), sets.clone()));
                        continue 'work;
                    }
                    Formula::Quant(Quantifier::Exists, Binder::Element(_), v, b) if mentions(l, &sets) => {
                        let y = self.fresh(v);
                        let body = b.subst_element(v, &Term::var(&y));
                        let mut rest = lits.clone();
                        rest[i] = body;
                        let mut pulled2 = pulled.clone();
                        pulled2.push(y);
                        for d in dnf(&Formula::and_all(rest), true) {
                            queue.push_back((d, pulled2.clone(), sets.clone()));
                        }
                        continue 'work;
                    }
                    _ => {}
                }
            }
            let mut d = self.finish_disjunct(&lits, &sets)?;
            for y in pulled.iter().rev() {
                d = self.element_quantifier(Quantifier::Exists, y, d);
            }
            out.push(d);
        }
        Ok(simplify(&Formula::or_all(out)))
    }

    /// `∃F̄ ⋀lits` where the only literals mentioning `F̄` are atoms, negated
    /// atoms and universal residuals.
    fn finish_disjunct(&mut self, lits: &[Formula], sets: &BTreeSet<String>) -> Result<Formula, WmsoError> {
        let (inside, outside): (Vec<&Formula>, Vec<&Formula>) = lits.iter().partition(|l| mentions(l, sets));
        let outside = Formula::and_all(outside.into_iter().cloned());
        if inside.is_empty() {
            return Ok(outside);
        }
        let y = self.fresh("y");
        let mut matrix = Vec::new();
        let mut plain = Vec::new();
        for l in inside.iter().copied() {
            match l {
                Formula::Quant(Quantifier::Forall, Binder::Element(_), v, b) => {
                    if !b.is_quantifier_free() {
                        return Err(violation(
                            l,
                            "universal element quantifier over a set-quantified membership has a quantified matrix",
                        ));
                    }
                    matrix.push(b.subst_element(v, &Term::var(&y)));
                }
                Formula::Quant(..) => return Err(violation(l, "unexpected quantifier")),
                _ => plain.push(l.clone()),
            }
        }
        let psi = Formula::and_all(matrix);
        let set_list: Vec<String> = sets.iter().cloned().collect();
        let mut bad = None;
        psi.visit_atoms(&mut |a| {
            if let Atom::In(Term::Var(x), SetTerm::Var(s)) = a {
                if x == &y && !sets.contains(s) {
                    bad = Some((Formula::Atom(a.clone()), s.clone()));
                }
            }
        });
        if let Some((a, s)) = bad {
            if !self.bound.contains(&s) {
                // free set variable: keep the block until it is instantiated
                let block = set_list
                    .iter()
                    .rev()
                    .fold(Formula::and_all(inside.into_iter().cloned()), |acc, v| {
                        Formula::exists(Binder::Set, v, acc)
                    });
                return Ok(Formula::and_all([outside, block]));
            }
            return Err(violation(
                &a,
                "element bound inside the set block is tested against a set bound elsewhere",
            ));
        }
        let mut terms: Vec<Term> = Vec::new();
        let plain_f = Formula::and_all(plain);
        for f in [&plain_f, &psi] {
            f.visit_atoms(&mut |a| {
                if let Atom::In(e, SetTerm::Var(s)) = a {
                    if sets.contains(s) && e.as_var() != Some(y.as_str()) && !terms.contains(e) {
                        terms.push(e.clone());
                    }
                }
            });
        }
        if terms.len() * set_list.len() >= 20 {
            return Err(violation(&plain_f, "membership pattern table too large"));
        }
        let mut alternatives = Vec::new();
        for pat in MembershipPattern::enumerate(&terms, &set_list) {
            let guard = pat.guard();
            if guard == Formula::False {
                continue;
            }
            let lit_part = simplify(&map_atoms(&plain_f, &|a| resolve(a, &pat, &y, None, sets)));
            if lit_part == Formula::False {
                continue;
            }
            let forall_part = if psi == Formula::True {
                Formula::True
            } else {
                self.universal_conditions(&psi, &pat, &y, sets)
            };
            alternatives.push(simplify(&Formula::and_all([guard, lit_part, forall_part])));
        }
        Ok(simplify(&Formula::and_all([outside, Formula::or_all(alternatives)])))
    }

    /// Conditions on the element terms under which `∀y ψ` can be satisfied by
    /// finite sets extending `pat`.
    fn universal_conditions(
        &mut self,
        psi: &Formula,
        pat: &MembershipPattern,
        y: &str,
        sets: &BTreeSet<String>,
    ) -> Formula {
        let k = pat.sets.len();
        let with = |bits: &[bool]| -> Formula {
            let row: BTreeMap<&str, bool> = pat.sets.iter().map(String::as_str).zip(bits.iter().copied()).collect();
            simplify(&map_atoms(psi, &|a| resolve(a, pat, y, Some(&row), sets)))
        };
        let psi0 = with(&vec![false; k]);
        let others: Vec<Formula> = (1..1u32 << k)
            .map(|c| with(&(0..k).map(|j| c >> j & 1 == 1).collect::<Vec<_>>()))
            .collect();
        let yv = Term::var(y);
        let off_terms = Formula::and_all(
            pat.terms
                .iter()
                .map(|e| Formula::not(Formula::eq(yv.clone(), e.clone()))),
        );
        // (a) every failure off the terms is repairable
        let repair = Formula::imp(
            Formula::and_all([off_terms, Formula::negate(psi0.clone())]),
            Formula::or_all(others),
        );
        let a = self.element_quantifier(Quantifier::Forall, y, simplify(&repair));
        // (b) ψ holds at each term, with that term's memberships from the pattern
        let at_terms = Formula::and_all(pat.terms.iter().map(|e| {
            let inst = psi.subst_element(y, e);
            simplify(&map_atoms(&inst, &|at| resolve(at, pat, y, None, sets)))
        }));
        // (c) the failures of ψ₀ are finite: they contain no open interval
        let u = self.fresh("u");
        let w = self.fresh("w");
        let inside = Formula::and_all([
            Formula::lt(Term::var(&u), yv.clone()),
            Formula::lt(yv.clone(), Term::var(&w)),
        ]);
        let fails_throughout = self.element_quantifier(
            Quantifier::Forall,
            y,
            simplify(&Formula::imp(inside, Formula::negate(psi0.clone()))),
        );
        let interval = Formula::and_all([Formula::lt(Term::var(&u), Term::var(&w)), fails_throughout]);
        let some_w = self.element_quantifier(Quantifier::Exists, &w, interval);
        let some_interval = self.element_quantifier(Quantifier::Exists, &u, some_w);
        simplify(&Formula::and_all([a, at_terms, Formula::negate(some_interval)]))
    }
}

/// Replaces memberships against the block's sets by pattern bits (for element
/// terms) or by `row` (for the universally quantified `y`).
fn resolve(
    a: &Atom,
    pat: &MembershipPattern,
    y: &str,
    row: Option<&BTreeMap<&str, bool>>,
    sets: &BTreeSet<String>,
) -> Formula {
    if let Atom::In(e, SetTerm::Var(s)) = a {
        if sets.contains(s) {
            let bit = if e.as_var() == Some(y) {
                row.and_then(|r| r.get(s.as_str()).copied())
            } else {
                pat.bit(e, s)
            };
            if let Some(b) = bit {
                return if b { Formula::True } else { Formula::False };
            }
        }
    }
    Formula::Atom(a.clone())
}
