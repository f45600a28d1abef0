//! Seeded random formula generators for the agreement checks.
//!
//! Every generator builds an AST, prints it and parses it back, so the
//! result is in the normalized (renamed-apart) form the parser produces.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::coding::fiber;
use crate::formula::{parse_formula, print_formula, Binder, Formula, Guard, Language, SetTerm, Term};
use crate::rational::{q, Rational};
use crate::wmso::FiniteSetQ;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn normalize(f: &Formula, lang: Language) -> Formula {
    parse_formula(&print_formula(f), lang).expect("generated formula parses")
}

fn consts(items: &[&str]) -> Vec<Rational> {
    items.iter().map(|s| q(s)).collect()
}

fn connect(rng: &mut StdRng, mut sub: impl FnMut(&mut StdRng) -> Formula) -> Formula {
    match rng.gen_range(0..4) {
        0 => Formula::not(sub(rng)),
        1 => Formula::And(vec![sub(rng), sub(rng)]),
        2 => Formula::Or(vec![sub(rng), sub(rng)]),
        _ => Formula::imp(sub(rng), sub(rng)),
    }
}

/// Pure-order formulas over `x, y, z` with at most `max_q` quantifiers and
/// literals from `{-2, -1, 0, 1}`.
pub fn pure_order(rng: &mut StdRng, depth: usize, max_q: usize) -> Formula {
    struct G {
        params: Vec<Rational>,
        quants: usize,
    }
    fn term(rng: &mut StdRng, g: &G) -> Term {
        if rng.gen_bool(0.3) {
            Term::Const(g.params.choose(rng).unwrap().clone())
        } else {
            Term::var(["x", "y", "z"].choose(rng).unwrap())
        }
    }
    fn go(rng: &mut StdRng, g: &mut G, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            let (a, b) = (term(rng, g), term(rng, g));
            return if rng.gen_bool(0.6) {
                Formula::lt(a, b)
            } else {
                Formula::eq(a, b)
            };
        }
        if g.quants > 0 && rng.gen_bool(0.4) {
            g.quants -= 1;
            let v = ["x", "y", "z"].choose(rng).unwrap();
            let body = go(rng, g, depth - 1);
            return if rng.gen_bool(0.5) {
                Formula::exists(Binder::Element(Guard::Any), v, body)
            } else {
                Formula::forall(Binder::Element(Guard::Any), v, body)
            };
        }
        connect(rng, |r| go(r, g, depth - 1))
    }
    let mut g = G {
        params: consts(&["-2", "-1", "0", "1"]),
        quants: max_q,
    };
    normalize(&go(rng, &mut g, depth), Language::OrderA)
}

/// Formulas of `(ℚ_{>0}, 𝓕, <, ∈)` in the supported fragment: a bound
/// element is only tested against sets bound outside it. Free variables are
/// `y` (element) and `T` (set).
pub fn wmso_fragment(rng: &mut StdRng, depth: usize) -> Formula {
    struct G {
        elems: Vec<(String, usize)>,
        sets: Vec<(String, usize)>,
        set_q: usize,
        elem_q: usize,
        level: usize,
        fresh: usize,
    }
    let params = consts(&["1", "1/2", "2"]);
    let lits: Vec<FiniteSetQ> = vec![
        FiniteSetQ::empty(),
        FiniteSetQ::new(consts(&["1"])).unwrap(),
        FiniteSetQ::new(consts(&["1", "2"])).unwrap(),
    ];
    fn elem(rng: &mut StdRng, g: &G, params: &[Rational]) -> (Term, usize) {
        let mut choices: Vec<(Term, usize)> = params.iter().map(|c| (Term::Const(c.clone()), 0)).collect();
        choices.push((Term::var("y"), 0));
        for (v, l) in &g.elems {
            choices.push((Term::var(v), *l));
            choices.push((Term::var(v), *l));
        }
        choices.choose(rng).unwrap().clone()
    }
    fn go(rng: &mut StdRng, g: &mut G, depth: usize, params: &[Rational], lits: &[FiniteSetQ]) -> Formula {
        if depth == 0 || rng.gen_bool(0.2) {
            let (e, el) = elem(rng, g, params);
            return match rng.gen_range(0..10) {
                0..=2 => Formula::lt(e, elem(rng, g, params).0),
                3 => Formula::eq(e, elem(rng, g, params).0),
                4 if !g.sets.is_empty() => {
                    let s = SetTerm::var(&g.sets.choose(rng).unwrap().0);
                    let t = if rng.gen_bool(0.5) {
                        SetTerm::Lit(lits.choose(rng).unwrap().clone())
                    } else {
                        SetTerm::var(if rng.gen_bool(0.5) {
                            "T"
                        } else {
                            &g.sets.choose(rng).unwrap().0
                        })
                    };
                    Formula::Atom(crate::formula::Atom::SetEq(s, t))
                }
                _ => {
                    // a set bound at or after the element's own binder would
                    // leave the fragment
                    let bound: Vec<SetTerm> = g
                        .sets
                        .iter()
                        .filter(|(_, l)| el == 0 || *l < el)
                        .map(|(s, _)| SetTerm::var(s))
                        .collect();
                    let mut sets: Vec<SetTerm> = bound.iter().chain(&bound).chain(&bound).cloned().collect();
                    sets.push(SetTerm::var("T"));
                    sets.extend(lits.iter().cloned().map(SetTerm::Lit));
                    Formula::member(e, sets.choose(rng).unwrap().clone())
                }
            };
        }
        let r = rng.gen_range(0..10);
        if r < 2 && g.set_q > 0 {
            g.set_q -= 1;
            g.level += 1;
            g.fresh += 1;
            let v = format!("S{}", g.fresh);
            g.sets.push((v.clone(), g.level));
            let body = go(rng, g, depth - 1, params, lits);
            g.sets.pop();
            g.level -= 1;
            return if rng.gen_bool(0.5) {
                Formula::exists(Binder::Set, &v, body)
            } else {
                Formula::forall(Binder::Set, &v, body)
            };
        }
        if r < 4 && g.elem_q > 0 {
            g.elem_q -= 1;
            g.level += 1;
            g.fresh += 1;
            let v = format!("z{}", g.fresh);
            g.elems.push((v.clone(), g.level));
            let body = go(rng, g, depth - 1, params, lits);
            g.elems.pop();
            g.level -= 1;
            let b = Binder::Element(Guard::Any);
            return if rng.gen_bool(0.5) {
                Formula::exists(b, &v, body)
            } else {
                Formula::forall(b, &v, body)
            };
        }
        connect(rng, |r| go(r, g, depth - 1, params, lits))
    }
    let mut g = G {
        elems: Vec::new(),
        sets: Vec::new(),
        set_q: 2,
        elem_q: 2,
        level: 0,
        fresh: 0,
    };
    normalize(&go(rng, &mut g, depth, &params, &lits), Language::Wmso)
}

/// Formulas of `(ℚ, <, 0, A)` over free `x, y` with literals from
/// `{-3/2, -1/2, 1, 2}` and at most `max_q` quantifiers.
pub fn order_a(rng: &mut StdRng, depth: usize, max_q: usize) -> Formula {
    let params = consts(&["-3/2", "-1/2", "0", "1", "2"]);
    fn go(rng: &mut StdRng, vars: &mut Vec<String>, quants: &mut usize, depth: usize, params: &[Rational]) -> Formula {
        let term = |rng: &mut StdRng, vars: &Vec<String>| {
            if rng.gen_bool(0.3) {
                Term::Const(params.choose(rng).unwrap().clone())
            } else {
                Term::var(vars.choose(rng).unwrap())
            }
        };
        if depth == 0 || rng.gen_bool(0.25) {
            let (a, b) = (term(rng, vars), term(rng, vars));
            return match rng.gen_range(0..5) {
                0 | 1 => Formula::rel_a(a, b),
                2 | 3 => Formula::lt(a, b),
                _ => Formula::eq(a, b),
            };
        }
        if *quants > 0 && rng.gen_bool(0.4) {
            *quants -= 1;
            let v = format!("t{}", vars.len());
            vars.push(v.clone());
            let body = go(rng, vars, quants, depth - 1, params);
            vars.pop();
            let guard = *[Guard::Any, Guard::Neg, Guard::Pos].choose(rng).unwrap();
            return if rng.gen_bool(0.5) {
                Formula::exists(Binder::Element(guard), &v, body)
            } else {
                Formula::forall(Binder::Element(guard), &v, body)
            };
        }
        connect(rng, |r| go(r, vars, quants, depth - 1, params))
    }
    let mut vars = vec!["x".to_string(), "y".to_string()];
    let mut quants = max_q;
    normalize(&go(rng, &mut vars, &mut quants, depth, &params), Language::OrderA)
}

/// A random point for `names`. Coordinates hit the order-`A` parameters, 0,
/// and members of the fibers of earlier negative coordinates often enough
/// that both sides of every atom get exercised.
pub fn order_a_point(rng: &mut StdRng, names: &[&str]) -> BTreeMap<String, Rational> {
    let params = consts(&["-3/2", "-1/2", "0", "1", "2"]);
    let mut out: BTreeMap<String, Rational> = BTreeMap::new();
    for name in names {
        let members: Vec<Rational> = out
            .values()
            .filter(|x| x.is_negative())
            .flat_map(|x| fiber(x).iter().cloned().collect::<Vec<_>>())
            .collect();
        let v = match rng.gen_range(0..10) {
            0 | 1 => params.choose(rng).unwrap().clone(),
            2 if !members.is_empty() => members.choose(rng).unwrap().clone(),
            _ => {
                // denominators 2^a 3^b 5^c keep codes small but varied
                let den = 2i64.pow(rng.gen_range(0..6)) * 3i64.pow(rng.gen_range(0..3)) * 5i64.pow(rng.gen_range(0..2));
                let num = rng.gen_range(-4 * den..=4 * den);
                Rational::new(num, den).expect("nonzero denominator")
            }
        };
        out.insert(name.to_string(), v);
    }
    out
}

/// Unary formulas in `y` whose sets are open by construction: finite unions
/// and intersections of open rays, complements of points and of finite
/// fibers `¬A(c, y)`, projections of open sets of the plane, and the
/// projection `∃x<0 (a<x<b ∧ A(x,y)) ∧ 0<y`, which is `y > 0` by density.
pub fn open_unary(rng: &mut StdRng, depth: usize) -> Formula {
    fn c(rng: &mut StdRng, items: &[&str]) -> Term {
        Term::Const(crate::rational::q(items.choose(rng).unwrap()))
    }
    const PARAMS: [&str; 6] = ["-2", "-1/3", "1/2", "1", "2", "3"];
    // ρ of these are {1}, {1}, {1, 1/2}, {1/2}, {1}
    const CODED: [&str; 5] = ["-1/2", "-3/2", "-1/8", "-3/4", "-5/6"];
    fn plane(rng: &mut StdRng, depth: usize) -> Formula {
        let (x, y) = (Term::var("x"), Term::var("y"));
        if depth == 0 || rng.gen_bool(0.3) {
            return match rng.gen_range(0..6) {
                0 => Formula::lt(x, y),
                1 => Formula::lt(y, x),
                2 => Formula::lt(x, c(rng, &PARAMS)),
                3 => Formula::lt(c(rng, &PARAMS), x),
                4 => Formula::not(Formula::eq(x, y)),
                // inside the interior of ¬A
                _ => Formula::And(vec![
                    Formula::not(Formula::rel_a(x.clone(), y.clone())),
                    Formula::Or(vec![Formula::lt(Term::zero(), x), Formula::lt(y, Term::zero())]),
                ]),
            };
        }
        let (a, b) = (plane(rng, depth - 1), plane(rng, depth - 1));
        if rng.gen_bool(0.5) {
            Formula::And(vec![a, b])
        } else {
            Formula::Or(vec![a, b])
        }
    }
    fn go(rng: &mut StdRng, depth: usize) -> Formula {
        let y = Term::var("y");
        if depth == 0 || rng.gen_bool(0.3) {
            return match rng.gen_range(0..7) {
                0 => Formula::lt(y, c(rng, &PARAMS)),
                1 => Formula::lt(c(rng, &PARAMS), y),
                2 => Formula::not(Formula::eq(y, c(rng, &PARAMS))),
                3 | 4 => Formula::not(Formula::rel_a(c(rng, &CODED), y)),
                5 => Formula::exists(Binder::Element(Guard::Any), "x", plane(rng, 2)),
                _ => {
                    let (a, b) = (c(rng, &["-3", "-1"]), c(rng, &["-1/2", "-1/100"]));
                    let x = Term::var("x");
                    Formula::And(vec![
                        Formula::exists(
                            Binder::Element(Guard::Neg),
                            "x",
                            Formula::And(vec![
                                Formula::lt(a, x.clone()),
                                Formula::lt(x.clone(), b),
                                Formula::rel_a(x, y.clone()),
                            ]),
                        ),
                        Formula::lt(Term::zero(), y),
                    ])
                }
            };
        }
        let (a, b) = (go(rng, depth - 1), go(rng, depth - 1));
        if rng.gen_bool(0.5) {
            Formula::And(vec![a, b])
        } else {
            Formula::Or(vec![a, b])
        }
    }
    normalize(&go(rng, depth), Language::OrderA)
}

/// Unconstrained well-sorted formulas of either language, for round trips.
pub fn any_formula(rng: &mut StdRng, depth: usize, lang: Language) -> Formula {
    match lang {
        Language::OrderA => order_a(rng, depth, depth),
        Language::Wmso => wmso_fragment(rng, depth),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_and_well_formed() {
        for seed in 0..50 {
            let a = pure_order(&mut rng(seed), 4, 2);
            assert_eq!(a, pure_order(&mut rng(seed), 4, 2));
            assert!(a.is_pure_order());
            assert!(a.quantifier_count() <= 2);
            let w = wmso_fragment(&mut rng(seed), 4);
            assert!(w.check_language(Language::Wmso).is_ok());
            let o = order_a(&mut rng(seed), 3, 2);
            assert!(o.check_language(Language::OrderA).is_ok());
            assert!(o.free_variable_names().iter().all(|v| v == "x" || v == "y"));
        }
    }

    #[test]
    fn round_trip_on_random_asts() {
        let mut r = rng(7);
        for i in 0..10_000 {
            let lang = if i % 2 == 0 { Language::OrderA } else { Language::Wmso };
            let f = any_formula(&mut r, 6, lang);
            assert!(f.depth() <= 6);
            assert_eq!(parse_formula(&print_formula(&f), lang).unwrap(), f);
        }
    }
}
