//! Interiors of definable sets as pure-order formulas, with cubes for
//! interior points and certificates for the rest.

use std::collections::BTreeMap;

use opencore::formula::{parse_formula, Language};
use opencore::interior::{non_interior_certificate, Interior};
use opencore::rational::q;

fn main() {
    for s in [
        "(A x y)",
        "(not (A x y))",
        "(or (A x y) (and (< -1 x) (< x 0) (< 1 y) (< y 2)))",
    ] {
        let f = parse_formula(s, Language::OrderA).unwrap();
        let plan = Interior::new(&f).unwrap();
        println!("Int {f} = {}", plan.formula().unwrap());
    }
    let not_a = parse_formula("(not (A x y))", Language::OrderA).unwrap();
    let plan = Interior::new(&not_a).unwrap();
    let inside = BTreeMap::from([("x".to_string(), q("1/3")), ("y".to_string(), q("5"))]);
    println!(
        "cube at (1/3, 5): half-width 2^-{}",
        plan.interior_cube(&inside, 64).unwrap().unwrap()
    );
    let boundary = BTreeMap::from([("x".to_string(), q("-5/7")), ("y".to_string(), q("1000/3"))]);
    let cert = non_interior_certificate(&not_a, &boundary, 6).unwrap().unwrap();
    for p in cert {
        println!("  A holds at ({}, {})", p["x"], p["y"]);
    }
}
