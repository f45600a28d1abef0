//! Codes of negative rationals, their fibers, and points with a chosen code
//! in a small interval.

use opencore::coding::{find_set_in_interval, rho, unbounded_fiber_witness};
use opencore::rational::q;
use opencore::wmso::FiniteSetQ;

fn main() {
    for x in ["-1/2", "-1/172", "-5/7", "-3/4"] {
        println!("rho({x}) = {}", rho(&q(x)).unwrap());
    }
    let target = FiniteSetQ::new([q("17"), q("1/1000")]).unwrap();
    let x = find_set_in_interval(&target, &q("-1/1000000"), &q("-999999/1000000000000")).unwrap();
    println!("{x} codes {}", rho(&x).unwrap());
    for n in [0, 3, 5] {
        let w = unbounded_fiber_witness(n);
        println!("witness {n}: {w} with fiber {}", rho(&w).unwrap());
    }
}
