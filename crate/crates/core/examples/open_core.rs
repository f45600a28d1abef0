//! Unary definable sets: open ones are finite unions of intervals, and
//! non-open ones come with a counterexample.

use opencore::corpus::{open_unary, rng};
use opencore::formula::{parse_formula, Language};
use opencore::interior::open_core_check;

fn main() {
    for s in ["(and (exists x (A x y)) (< 0 y))", "(A -1/2 y)", "(not (A -3/4 y))"] {
        let f = parse_formula(s, Language::OrderA).unwrap();
        let rep = open_core_check(&f, 100, 1, 10).unwrap();
        match (&rep.description, &rep.counterexample) {
            (Some(d), _) => println!("{f}: open, {d}"),
            (None, Some(c)) => println!("{f}: not open at {c}, interior {}", rep.interior),
            _ => unreachable!(),
        }
    }
    let mut r = rng(3);
    for _ in 0..5 {
        let f = open_unary(&mut r, 2);
        let rep = open_core_check(&f, 100, 1, 10).unwrap();
        println!("{f}\n  = {}", rep.description.unwrap());
    }
}
