//! Relative normal forms: on each sign stratum a formula becomes a
//! disjunction of order cells paired with weak monadic conditions on codes.

use std::collections::BTreeMap;

use opencore::formula::{parse_formula, Language};
use opencore::rational::q;
use opencore::rnf::{evaluate_point, sign_decompose, to_rnf};
use opencore::semantics::eval_direct;

fn main() {
    let f = parse_formula("(exists-neg z (and (< x z) (A z y) (not (A x y))))", Language::OrderA).unwrap();
    println!("{f}");
    for (stratum, _) in sign_decompose(&f).unwrap() {
        let r = to_rnf(&f, &stratum).unwrap();
        println!("[{stratum}] {} disjuncts", r.disjuncts.len());
        for d in &r.disjuncts {
            println!("  {}  with  {}", d.chi, d.theta);
        }
    }
    let pt = BTreeMap::from([("x".to_string(), q("-3/4")), ("y".to_string(), q("1"))]);
    println!(
        "at x=-3/4, y=1: {} (direct {})",
        evaluate_point(&f, &pt).unwrap(),
        eval_direct(&f, &pt).unwrap()
    );
}
