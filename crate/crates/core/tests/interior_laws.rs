use std::collections::BTreeSet;

use opencore::corpus::{order_a_point, rng};
use opencore::dlo::{enumerate_cells, semantic_eval, Env};
use opencore::formula::{parse_formula, Formula, Language};
use opencore::interior::interior_formula;
use opencore::rational::Rational;
use opencore::semantics::eval_direct;

fn p(s: &str) -> Formula {
    parse_formula(s, Language::OrderA).unwrap()
}

fn catalogue() -> Vec<Formula> {
    [
        "(A x y)",
        "(not (A x y))",
        "(< x -1)",
        "(or (A x y) (and (< -1 x) (< x 0) (< 1 y) (< y 2)))",
        "(and (not (A x y)) (< x 0))",
        "(or (A x y) (< y x))",
    ]
    .iter()
    .map(|s| p(s))
    .collect()
}

fn vars() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

/// `f → g` on every order cell over the constants of both.
fn implies(f: &Formula, g: &Formula) -> bool {
    let mut consts: BTreeSet<Rational> = f.element_constants();
    consts.extend(g.element_constants());
    consts.insert(Rational::zero());
    let consts: Vec<Rational> = consts.into_iter().collect();
    enumerate_cells(&vars(), &consts).iter().all(|c| {
        let env: Env = vars().into_iter().zip(c.representative()).collect();
        !semantic_eval(f, &env).unwrap() || semantic_eval(g, &env).unwrap()
    })
}

fn equivalent(f: &Formula, g: &Formula) -> bool {
    implies(f, g) && implies(g, f)
}

#[test]
fn interior_is_idempotent() {
    for f in catalogue() {
        let i = interior_formula(&f).unwrap();
        let ii = interior_formula(&i).unwrap();
        assert!(equivalent(&i, &ii), "{f}: {i} vs {ii}");
    }
}

#[test]
fn interior_is_monotone_and_meets() {
    let cat = catalogue();
    for f in &cat {
        for g in &cat {
            let (fi, gi) = (interior_formula(f).unwrap(), interior_formula(g).unwrap());
            let union = interior_formula(&Formula::or_all([f.clone(), g.clone()])).unwrap();
            assert!(implies(&fi, &union) && implies(&gi, &union), "{f}, {g}");
            let meet = interior_formula(&Formula::and_all([f.clone(), g.clone()])).unwrap();
            assert!(equivalent(&meet, &Formula::and_all([fi, gi])), "{f}, {g}");
        }
    }
}

#[test]
fn interior_points_belong_to_the_set() {
    let mut r = rng(5);
    let points: Vec<_> = (0..300).map(|_| order_a_point(&mut r, &["x", "y"])).collect();
    for f in catalogue() {
        let i = interior_formula(&f).unwrap();
        for pt in &points {
            if eval_direct(&i, pt).unwrap() {
                assert!(eval_direct(&f, pt).unwrap(), "{f} at {pt:?}");
            }
        }
    }
}

#[test]
fn a_union_box_keeps_the_box() {
    let f = p("(or (A x y) (and (< -1 x) (< x 0) (< 1 y) (< y 2)))");
    let expected = p("(and (< -1 x) (< x 0) (< 1 y) (< y 2))");
    assert!(equivalent(&interior_formula(&f).unwrap(), &expected));
}
