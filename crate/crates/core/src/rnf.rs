//! Relative normal forms: every `{<, 0, A}`-formula is, on each sign
//! stratum, a finite disjunction `χ ∧ Θ` with `χ` a pure-order formula over
//! the negative variables and `Θ` a weak monadic formula over the positive
//! variables and the codes `ρ(x)` of the negative ones.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::coding::{eval_a, fiber, rho};
use crate::dlo::{enumerate_cells_in, eval_qf, simplify, Domain, Env, OrderCell};
use crate::formula::Atom;
use crate::formula::{Binder, Formula, Guard, Quantifier, SetTerm, Term};
use crate::rational::Rational;
use crate::wmso::{check_fragment, eval_wformula, FiniteSetQ, WValue, WmsoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: &Rational) -> Sign {
        if x.is_negative() {
            Sign::Negative
        } else if x.is_zero() {
            Sign::Zero
        } else {
            Sign::Positive
        }
    }
}

/// A sign per free variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SignStratum(pub BTreeMap<String, Sign>);

impl SignStratum {
    pub fn of_point(point: &BTreeMap<String, Rational>) -> SignStratum {
        SignStratum(point.iter().map(|(k, v)| (k.clone(), Sign::of(v))).collect())
    }

    pub fn vars_with(&self, sign: Sign) -> Vec<String> {
        self.0
            .iter()
            .filter(|(_, s)| **s == sign)
            .map(|(k, _)| k.clone())
            .collect()
    }
}

impl Serialize for SignStratum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl fmt::Display for SignStratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, s)| match s {
                Sign::Negative => format!("{k}<0"),
                Sign::Zero => format!("{k}=0"),
                Sign::Positive => format!("{k}>0"),
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RnfError {
    #[error("variable `{0}` has no sign in the stratum")]
    Unsigned(String),
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error(transparent)]
    Wmso(#[from] WmsoError),
}

/// `χ ∧ Θ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disjunct {
    pub chi: Formula,
    pub theta: Formula,
}

impl Serialize for Disjunct {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("chi", &self.chi.to_string())?;
        m.serialize_entry("theta", &self.theta.to_string())?;
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelativeNormalForm {
    pub stratum: SignStratum,
    pub disjuncts: Vec<Disjunct>,
    /// Negative free variables, whose codes appear in `Θ` as `S_x`.
    #[serde(skip)]
    pub negative_vars: Vec<String>,
    /// Negative parameters the cells of `χ` range over.
    #[serde(skip)]
    pub params: Vec<Rational>,
}

/// Name of the free set variable standing for `ρ(x)`.
pub fn code_var(x: &str) -> String {
    format!("S_{x}")
}

fn sign_of_term(t: &Term, signs: &BTreeMap<String, Sign>) -> Option<Sign> {
    match t {
        Term::Const(c) => Some(Sign::of(c)),
        Term::Var(v) => signs.get(v).copied(),
    }
}

fn zero_out(t: &Term, signs: &BTreeMap<String, Sign>) -> Term {
    match sign_of_term(t, signs) {
        Some(Sign::Zero) => Term::zero(),
        _ => t.clone(),
    }
}

fn constant(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

/// Specializes `f` to known signs: zero variables become `0`, atoms across
/// signs fold to constants, and unguarded quantifiers split into their
/// negative, zero and positive cases.
fn specialize(f: &Formula, signs: &mut BTreeMap<String, Sign>) -> Result<Formula, RnfError> {
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => {
            let sign = |t: &Term| sign_of_term(t, signs).ok_or_else(|| RnfError::Unsigned(t.to_string()));
            match a {
                Atom::Lt(x, y) | Atom::Eq(x, y) => {
                    let (sx, sy) = (sign(x)?, sign(y)?);
                    let lt = matches!(a, Atom::Lt(..));
                    if sx != sy {
                        constant(lt && sx < sy)
                    } else if sx == Sign::Zero {
                        constant(!lt)
                    } else {
                        simplify(&Formula::Atom(if lt {
                            Atom::Lt(x.clone(), y.clone())
                        } else {
                            Atom::Eq(x.clone(), y.clone())
                        }))
                    }
                }
                Atom::A(x, y) => {
                    let (sx, sy) = (sign(x)?, sign(y)?);
                    match (x, y) {
                        (Term::Const(c), Term::Const(d)) => constant(eval_a(c, d)),
                        _ if sx == Sign::Negative && sy == Sign::Positive => {
                            Formula::Atom(Atom::A(zero_out(x, signs), zero_out(y, signs)))
                        }
                        _ => Formula::False,
                    }
                }
                other => Formula::Atom(other.clone()),
            }
        }
        Formula::Not(g) => Formula::negate(specialize(g, signs)?),
        Formula::And(gs) => Formula::and_all(gs.iter().map(|g| specialize(g, signs)).collect::<Result<Vec<_>, _>>()?),
        Formula::Or(gs) => Formula::or_all(gs.iter().map(|g| specialize(g, signs)).collect::<Result<Vec<_>, _>>()?),
        Formula::Imp(a, b) => Formula::imp(specialize(a, signs)?, specialize(b, signs)?),
        Formula::Quant(q, Binder::Element(guard), v, body) => {
            let branches: &[Sign] = match guard {
                Guard::Any => &[Sign::Negative, Sign::Zero, Sign::Positive],
                Guard::Neg => &[Sign::Negative],
                Guard::Pos => &[Sign::Positive],
            };
            let saved = signs.get(v).copied();
            let mut parts = Vec::new();
            for &s in branches {
                signs.insert(v.clone(), s);
                let b = specialize(body, signs)?;
                parts.push(match s {
                    Sign::Zero => b.subst_element(v, &Term::zero()),
                    Sign::Negative => Formula::Quant(*q, Binder::Element(Guard::Neg), v.clone(), Box::new(b)),
                    Sign::Positive => Formula::Quant(*q, Binder::Element(Guard::Pos), v.clone(), Box::new(b)),
                });
            }
            match saved {
                Some(s) => signs.insert(v.clone(), s),
                None => signs.remove(v),
            };
            match q {
                Quantifier::Exists => Formula::or_all(parts),
                Quantifier::Forall => Formula::and_all(parts),
            }
        }
        Formula::Quant(_, Binder::Set, v, _) => return Err(RnfError::Unsigned(v.clone())),
    })
}

/// One entry per assignment of signs to the free variables of `f`, with `f`
/// specialized to it.
pub fn sign_decompose(f: &Formula) -> Result<Vec<(SignStratum, Formula)>, RnfError> {
    let vars: Vec<String> = f.free_variable_names().into_iter().collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(vars.len() as u32) {
        let mut signs = BTreeMap::new();
        let mut c = code;
        for v in &vars {
            signs.insert(v.clone(), [Sign::Negative, Sign::Zero, Sign::Positive][c % 3]);
            c /= 3;
        }
        let stratum = SignStratum(signs.clone());
        out.push((stratum.clone(), specialize_to(f, &stratum)?));
    }
    Ok(out)
}

/// `f` specialized to `stratum`.
pub fn specialize_to(f: &Formula, stratum: &SignStratum) -> Result<Formula, RnfError> {
    let mut signs = stratum.0.clone();
    let zeros: BTreeMap<String, crate::formula::Replacement> = stratum
        .vars_with(Sign::Zero)
        .into_iter()
        .map(|v| (v, crate::formula::Replacement::Element(Term::zero())))
        .collect();
    let f = if zeros.is_empty() {
        f.clone()
    } else {
        f.substitute(&zeros).map_err(WmsoError::from)?
    };
    Ok(simplify(&specialize(&f, &mut signs)?))
}

/// A `Θ` for every complete order cell of the negative variables in scope.
struct CellMap {
    cells: Vec<OrderCell>,
    thetas: Vec<Formula>,
}

struct Rewriter {
    params: Vec<Rational>,
    signs: BTreeMap<String, Sign>,
}

impl Rewriter {
    fn cells(&self, scope: &[String]) -> Vec<OrderCell> {
        enumerate_cells_in(scope, &self.params, Domain::Negative)
    }

    fn pointwise(&self, scope: &[String], theta: impl Fn(&OrderCell) -> Formula) -> CellMap {
        let cells = self.cells(scope);
        let thetas = cells.iter().map(&theta).collect();
        CellMap { cells, thetas }
    }

    fn combine(a: CellMap, b: CellMap, op: impl Fn(Formula, Formula) -> Formula) -> CellMap {
        let thetas = a
            .thetas
            .into_iter()
            .zip(b.thetas)
            .map(|(x, y)| simplify(&op(x, y)))
            .collect();
        CellMap { cells: a.cells, thetas }
    }

    fn rewrite(&mut self, f: &Formula, scope: &mut Vec<String>) -> Result<CellMap, RnfError> {
        Ok(match f {
            Formula::True | Formula::False => self.pointwise(scope, |_| f.clone()),
            Formula::Atom(a) => self.atom(a, scope)?,
            Formula::Not(g) => {
                let m = self.rewrite(g, scope)?;
                CellMap {
                    cells: m.cells,
                    thetas: m.thetas.into_iter().map(Formula::negate).collect(),
                }
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let is_and = matches!(f, Formula::And(_));
                let mut acc = self.pointwise(scope, |_| constant(is_and));
                for g in gs {
                    let m = self.rewrite(g, scope)?;
                    acc = Self::combine(acc, m, |x, y| {
                        if is_and {
                            Formula::and_all([x, y])
                        } else {
                            Formula::or_all([x, y])
                        }
                    });
                }
                acc
            }
            Formula::Imp(a, b) => {
                let (ma, mb) = (self.rewrite(a, scope)?, self.rewrite(b, scope)?);
                Self::combine(ma, mb, Formula::imp)
            }
            Formula::Quant(q, Binder::Element(Guard::Pos), v, body) => {
                self.signs.insert(v.clone(), Sign::Positive);
                let m = self.rewrite(body, scope)?;
                let thetas = m
                    .thetas
                    .into_iter()
                    .map(|t| simplify(&Formula::Quant(*q, Binder::Element(Guard::Any), v.clone(), Box::new(t))))
                    .collect();
                CellMap { cells: m.cells, thetas }
            }
            Formula::Quant(q, Binder::Element(Guard::Neg), t, body) => self.negative_quantifier(*q, t, body, scope)?,
            Formula::Quant(_, _, v, _) => return Err(RnfError::Unsigned(v.clone())),
        })
    }

    fn atom(&self, a: &Atom, scope: &[String]) -> Result<CellMap, RnfError> {
        let sign = |t: &Term| sign_of_term(t, &self.signs).ok_or_else(|| RnfError::Unsigned(t.to_string()));
        Ok(match a {
            Atom::Lt(x, y) | Atom::Eq(x, y) if sign(x)? == Sign::Negative => {
                // decided by the cell
                let f = Formula::Atom(a.clone());
                self.pointwise(scope, |c| {
                    let env: Env = scope.iter().cloned().zip(c.representative()).collect();
                    constant(eval_qf(&f, &env).expect("negative atom over scope"))
                })
            }
            Atom::Lt(..) | Atom::Eq(..) => self.pointwise(scope, |_| Formula::Atom(a.clone())),
            Atom::A(u, v) => {
                let set = match u {
                    Term::Var(x) => SetTerm::var(&code_var(x)),
                    Term::Const(c) => SetTerm::Lit(rho(c).expect("negative parameter")),
                };
                let m = Formula::member(v.clone(), set);
                self.pointwise(scope, |_| m.clone())
            }
            other => self.pointwise(scope, |_| Formula::Atom(other.clone())),
        })
    }

    /// `∃t<0` (or `∀t<0`): each cell of the scope extended by `t` either
    /// forces `t` onto a variable (its code is that variable's), onto a
    /// parameter `c` (its code is the literal `ρ(c)`), or lets `t` range over
    /// an open interval, where every code occurs and `S_t` is quantified.
    fn negative_quantifier(
        &mut self,
        q: Quantifier,
        t: &str,
        body: &Formula,
        scope: &mut Vec<String>,
    ) -> Result<CellMap, RnfError> {
        self.signs.insert(t.to_string(), Sign::Negative);
        scope.push(t.to_string());
        let inner = self.rewrite(body, scope);
        scope.pop();
        let inner = inner?;
        let outer = self.cells(scope);
        let index: BTreeMap<&OrderCell, usize> = outer.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let keep: Vec<usize> = (0..scope.len()).collect();
        let tv = scope.len();
        let st = code_var(t);
        let mut parts: Vec<Vec<Formula>> = vec![Vec::new(); outer.len()];
        for (cell, theta) in inner.cells.iter().zip(inner.thetas) {
            let i = index[&cell.project(&keep)];
            let block = &cell.blocks()[cell.block_of_var(tv)];
            let part = if let Some(&x) = block.vars.iter().find(|&&x| x != tv) {
                theta.subst_set(&st, &SetTerm::var(&code_var(&scope[x])))
            } else if let Some(p) = block.param {
                theta.subst_set(&st, &SetTerm::Lit(rho(&cell.params()[p]).expect("negative parameter")))
            } else if theta.free_variable_names().contains(&st) {
                Formula::Quant(q, Binder::Set, st.clone(), Box::new(theta))
            } else {
                theta
            };
            parts[i].push(part);
        }
        let thetas = parts
            .into_iter()
            .map(|ps| {
                simplify(&match q {
                    Quantifier::Exists => Formula::or_all(ps),
                    Quantifier::Forall => Formula::and_all(ps),
                })
            })
            .collect();
        Ok(CellMap { cells: outer, thetas })
    }
}

/// The relative normal form of `f` on `stratum`. `f` may be given
/// unspecialized; it is specialized first.
pub fn to_rnf(f: &Formula, stratum: &SignStratum) -> Result<RelativeNormalForm, RnfError> {
    let g = specialize_to(f, stratum)?;
    let mut params: Vec<Rational> = g.element_constants().into_iter().filter(|c| c.is_negative()).collect();
    params.sort();
    let mut rw = Rewriter {
        params: params.clone(),
        signs: stratum.0.clone(),
    };
    let mut scope = stratum.vars_with(Sign::Negative);
    let negative_vars = scope.clone();
    let map = rw.rewrite(&g, &mut scope)?;
    let mut grouped: Vec<(Formula, Vec<Formula>)> = Vec::new();
    for (cell, theta) in map.cells.iter().zip(map.thetas) {
        if theta == Formula::False {
            continue;
        }
        check_fragment(&theta)?;
        match grouped.iter_mut().find(|(t, _)| *t == theta) {
            Some((_, cs)) => cs.push(cell.formula()),
            None => grouped.push((theta, vec![cell.formula()])),
        }
    }
    let disjuncts = grouped
        .into_iter()
        .map(|(theta, cells)| Disjunct {
            chi: simplify(&Formula::or_all(cells)),
            theta,
        })
        .collect();
    Ok(RelativeNormalForm {
        stratum: stratum.clone(),
        disjuncts,
        negative_vars,
        params,
    })
}

impl RelativeNormalForm {
    /// Truth at `point`, which must lie in the stratum: the disjunct whose `χ`
    /// holds there is chosen and its `Θ` is decided with `S_x := ρ(x)`.
    pub fn evaluate(&self, point: &BTreeMap<String, Rational>) -> Result<bool, RnfError> {
        let neg: Env = self
            .negative_vars
            .iter()
            .map(|v| {
                point
                    .get(v)
                    .cloned()
                    .map(|x| (v.clone(), x))
                    .ok_or_else(|| RnfError::Unbound(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut env: BTreeMap<String, WValue> = BTreeMap::new();
        for (v, x) in &neg {
            env.insert(code_var(v), WValue::Set(fiber(x)));
        }
        for v in self.stratum.vars_with(Sign::Positive) {
            let x = point.get(&v).ok_or_else(|| RnfError::Unbound(v.clone()))?;
            env.insert(v, WValue::Element(x.clone()));
        }
        for d in &self.disjuncts {
            if eval_qf(&d.chi, &neg).expect("chi is pure order") && eval_wformula(&d.theta, &env)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Truth of `f` at `point` through its relative normal form.
pub fn evaluate_point(f: &Formula, point: &BTreeMap<String, Rational>) -> Result<bool, RnfError> {
    let free = f.free_variable_names();
    if let Some(v) = free.iter().find(|v| !point.contains_key(*v)) {
        return Err(RnfError::Unbound(v.clone()));
    }
    let restricted: BTreeMap<String, Rational> = point
        .iter()
        .filter(|(k, _)| free.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    to_rnf(f, &SignStratum::of_point(&restricted))?.evaluate(&restricted)
}

/// Negative parameters of a normal form with their codes.
pub fn parameter_codes(rnf: &RelativeNormalForm) -> Vec<(Rational, FiniteSetQ)> {
    rnf.params.iter().map(|c| (c.clone(), fiber(c))).collect()
}


#[cfg(test)]
mod corpus_tests {
    use super::*;
    use crate::corpus::{order_a, order_a_point, rng};
    use crate::semantics::eval_direct;

    #[test]
    fn agrees_with_direct_semantics() {
        let mut r = rng(11);
        let (mut agree, mut skipped, mut trues, mut quant, mut mixed) = (0, 0, 0, 0, 0);
        for i in 0..200 {
            let f = order_a(&mut r, 3, 2);
            quant += (f.quantifier_count() > 0 && f.mentions_a()) as usize;
            let t0 = trues;
            for _ in 0..100 {
                let pt = order_a_point(&mut r, &["x", "y"]);
                let direct = match eval_direct(&f, &pt) {
                    Ok(b) => b,
                    Err(_) => {
                        skipped += 1;
                        continue;
                    }
                };
                let via = evaluate_point(&f, &pt).unwrap_or_else(|e| panic!("#{i} {f}: {e}"));
                assert_eq!(via, direct, "#{i} {f} at {pt:?}");
                agree += 1;
                trues += direct as usize;
            }
            mixed += (trues > t0 && trues < t0 + 100) as usize;
        }
        assert_eq!((agree, skipped), (20_000, 0));
        // the corpus is not dominated by constant or quantifier-free formulas
        assert!(quant >= 50 && mixed >= 50, "{quant} {mixed} {trues}");
    }
}
