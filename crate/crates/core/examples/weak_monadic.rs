//! Elimination in the weak monadic theory of the positive rationals,
//! cross-checked against the finite-candidate oracle.

use std::collections::BTreeMap;

use opencore::formula::{parse_formula, Language};
use opencore::rational::q;
use opencore::wmso::{eliminate_w, eval_wformula, vs_evaluate, FiniteSetQ, WValue, DEFAULT_ANCHOR_LIMIT};

fn main() {
    let env = BTreeMap::from([
        ("y".to_string(), WValue::Element(q("3/2"))),
        (
            "T".to_string(),
            WValue::Set(FiniteSetQ::new([q("1/2"), q("2")]).unwrap()),
        ),
    ]);
    for s in [
        "(exists-set S (and (in y S) (in 2 S)))",
        "(exists-set S (forall z (imp (in z S) (< z y))))",
        "(exists-set S (and (in y S) (= S T)))",
        "(forall-set S (imp (in 1 S) (exists z (and (in z S) (< z y)))))",
    ] {
        let f = parse_formula(s, Language::Wmso).unwrap();
        let g = eliminate_w(&f).unwrap();
        let (a, b) = (
            eval_wformula(&f, &env).unwrap(),
            vs_evaluate(&f, &env, DEFAULT_ANCHOR_LIMIT).unwrap(),
        );
        println!("{f}\n  => {g}\n  at y=3/2, T={{1/2, 2}}: {a} (oracle {b})");
    }
}
