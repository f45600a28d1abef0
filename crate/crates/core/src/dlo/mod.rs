//! Dense linear orders: complete order cells, quantifier elimination, and
//! descriptions of unary definable sets.

mod cell;
mod eval;
mod interval;
mod minimize;
mod qe;

use thiserror::Error;

use crate::formula::Formula;
use crate::rational::Rational;

pub use cell::{cell_of_point, enumerate_cells, enumerate_cells_in, Block, Domain, OrderCell};
pub use eval::{eval_qf, sample_points, semantic_eval, Env};
pub use interval::{Endpoint, IntervalUnion, Part};
pub use minimize::minimize;
pub use qe::{eliminate_quantifiers, simplify};
pub(crate) use qe::{exists_qf, map_atoms};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DloError {
    #[error("atom `{0}` is not an order atom")]
    NonOrderAtom(String),
    #[error("set quantifier over `{0}` in a pure-order formula")]
    SetQuantifier(String),
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("quantifier in a formula expected to be quantifier-free")]
    Quantified,
    #[error("expected at most one free variable, found {0:?}")]
    NotUnary(Vec<String>),
}

/// The cells of `vars` over `params` on which the quantifier-free `f` holds.
pub fn decompose_to_cells(f: &Formula, vars: &[String], params: &[Rational]) -> Result<Vec<OrderCell>, DloError> {
    let mut out = Vec::new();
    for c in enumerate_cells(vars, params) {
        let env: Env = vars.iter().cloned().zip(c.representative()).collect();
        if eval_qf(f, &env)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// The subset of ℚ defined by a pure-order formula with at most one free
/// variable.
pub fn describe_unary(f: &Formula) -> Result<IntervalUnion, DloError> {
    let free: Vec<String> = f.free_variable_names().into_iter().collect();
    if free.len() > 1 {
        return Err(DloError::NotUnary(free));
    }
    let g = eliminate_quantifiers(f)?;
    let mut cuts: Vec<Rational> = g.element_constants().into_iter().collect();
    cuts.extend(f.element_constants());
    let var = free.first().cloned().unwrap_or_else(|| "x".to_string());
    let mut err = None;
    let u = IntervalUnion::from_pieces(&cuts, |x| {
        let env = Env::from([(var.clone(), x.clone())]);
        eval_qf(&g, &env).unwrap_or_else(|e| {
            err = Some(e);
            false
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Language};
    use crate::rational::q;
    use proptest::prelude::*;

    fn p(s: &str) -> Formula {
        parse_formula(s, Language::OrderA).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let v = vec!["x1".to_string(), "x2".to_string()];
        let cells = decompose_to_cells(&p("(or (< x1 x2) (= x1 x2))"), &v, &[]).unwrap();
        assert_eq!(cells.len(), 2);
        let x = vec!["x".to_string()];
        assert_eq!(decompose_to_cells(&Formula::True, &x, &[q("3")]).unwrap().len(), 3);
        let cells = decompose_to_cells(&p("(and (not (= x 3)) (< x 3))"), &x, &[q("3")]).unwrap();
        assert_eq!(cells.len(), 1);
        assert!(cells[0].contains(&[q("2")]));
    }

    #[test]
    fn describe_examples() {
        assert_eq!(
            describe_unary(&p("(or (< x 3) (= x 5))")).unwrap().to_string(),
            "(-inf, 3) ∪ {5}"
        );
        assert_eq!(describe_unary(&p("(= x x)")).unwrap(), IntervalUnion::full());
        assert!(describe_unary(&p("(exists z (and (< x z) (< z x)))"))
            .unwrap()
            .is_empty());
        assert!(describe_unary(&p("(< x y)")).is_err());
    }

    proptest! {
        #[test]
        fn describe_agrees_with_evaluation(a in -3i64..3, b in -3i64..3, c in -3i64..3, n in -30i64..30) {
            let f = p(&format!("(or (and (< {a} x) (< x {b})) (= x {c}) (exists y (and (< x y) (< y {a}))))"));
            let u = describe_unary(&f).unwrap();
            let x = Rational::new(n, 4).unwrap();
            let env = Env::from([("x".to_string(), x.clone())]);
            prop_assert_eq!(u.contains(&x), semantic_eval(&f, &env).unwrap());
            let parts = u.parts();
            for w in parts.windows(2) {
                let hi = match &w[0] { Part::Point(r) => Endpoint::Finite(r.clone()), Part::Interval(_, h) => h.clone() };
                let lo = match &w[1] { Part::Point(r) => Endpoint::Finite(r.clone()), Part::Interval(l, _) => l.clone() };
                prop_assert!(hi <= lo);
            }
        }
    }
}
