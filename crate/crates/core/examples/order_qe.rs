//! Quantifier elimination for the dense order with constants, and the cells
//! it is checked against.

use opencore::dlo::{eliminate_quantifiers, enumerate_cells, minimize};
use opencore::formula::{parse_formula, Language};
use opencore::rational::q;

fn main() {
    for s in [
        "(exists x (and (< y x) (< x z)))",
        "(forall x (or (< x y) (< 1 x)))",
        "(exists x (and (< x 0) (forall z (imp (< z x) (< z y)))))",
    ] {
        let f = parse_formula(s, Language::OrderA).unwrap();
        let g = eliminate_quantifiers(&f).unwrap();
        println!("{f}\n  => {}", minimize(&g, &[]).unwrap());
    }
    let cells = enumerate_cells(&["x1".to_string(), "x2".to_string()], &[q("0")]);
    println!("{} cells of two variables over one constant", cells.len());
}
