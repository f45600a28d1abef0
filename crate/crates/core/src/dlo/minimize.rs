//! Short disjunctive forms for quantifier-free order formulas.

use super::{enumerate_cells, eval_qf, DloError, Env};
use crate::formula::{Formula, Term};
use crate::rational::Rational;

/// The relation between two terms at a point, as one atom.
fn relation(a: Term, b: Term, x: &Rational, y: &Rational) -> Formula {
    match x.cmp(y) {
        std::cmp::Ordering::Less => Formula::lt(a, b),
        std::cmp::Ordering::Equal => Formula::eq(a, b),
        std::cmp::Ordering::Greater => Formula::lt(b, a),
    }
}

/// An equivalent disjunction of conjunctions of atoms over the free
/// variables and constants of `f` (plus `extra` constants).
///
/// Each cell where `f` holds starts as its full description; literals are
/// dropped greedily while the disjunct stays inside `f`, and disjuncts
/// covered by the others are removed.
pub fn minimize(f: &Formula, extra: &[Rational]) -> Result<Formula, DloError> {
    let vars: Vec<String> = f.free_variable_names().into_iter().collect();
    let mut consts: Vec<Rational> = f.element_constants().into_iter().chain(extra.iter().cloned()).collect();
    consts.sort();
    consts.dedup();
    let cells = enumerate_cells(&vars, &consts);
    let reps: Vec<Vec<Rational>> = cells.iter().map(|c| c.representative()).collect();
    let envs: Vec<Env> = reps
        .iter()
        .map(|p| vars.iter().cloned().zip(p.iter().cloned()).collect())
        .collect();
    let target: Vec<bool> = envs.iter().map(|e| eval_qf(f, e)).collect::<Result<_, _>>()?;
    if target.iter().all(|&t| t) {
        return Ok(Formula::True);
    }
    if !target.iter().any(|&t| t) {
        return Ok(Formula::False);
    }
    let truth = |lit: &Formula| -> Result<Vec<bool>, DloError> { envs.iter().map(|e| eval_qf(lit, e)).collect() };
    let meet = |sets: &[Vec<bool>]| -> Vec<bool> { (0..envs.len()).map(|i| sets.iter().all(|s| s[i])).collect() };
    let inside = |s: &[bool]| s.iter().zip(&target).all(|(&a, &t)| !a || t);

    let mut disjuncts: Vec<(Vec<Formula>, Vec<bool>)> = Vec::new();
    for (k, p) in reps.iter().enumerate() {
        if !target[k] || disjuncts.iter().any(|(_, s)| s[k]) {
            continue;
        }
        let mut lits = Vec::new();
        for i in 0..vars.len() {
            for c in &consts {
                lits.push(relation(Term::var(&vars[i]), Term::Const(c.clone()), &p[i], c));
            }
            for j in i + 1..vars.len() {
                lits.push(relation(Term::var(&vars[i]), Term::var(&vars[j]), &p[i], &p[j]));
            }
        }
        let mut sets: Vec<Vec<bool>> = lits.iter().map(&truth).collect::<Result<_, _>>()?;
        let mut i = 0;
        while i < lits.len() {
            let mut rest = sets.clone();
            rest.remove(i);
            if inside(&meet(&rest)) {
                lits.remove(i);
                sets = rest;
            } else {
                i += 1;
            }
        }
        disjuncts.push((lits, meet(&sets)));
    }
    let mut i = 0;
    while i < disjuncts.len() {
        let covered = (0..envs.len())
            .filter(|&k| disjuncts[i].1[k])
            .all(|k| disjuncts.iter().enumerate().any(|(j, (_, s))| j != i && s[k]));
        if covered {
            disjuncts.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(Formula::or_all(
        disjuncts.into_iter().map(|(lits, _)| Formula::and_all(lits)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlo::semantic_eval;
    use crate::formula::{parse_formula, Language};
    use crate::rational::q;

    fn p(s: &str) -> Formula {
        parse_formula(s, Language::OrderA).unwrap()
    }

    #[test]
    fn shortens() {
        let f = p("(or (and (< x 0) (< y 0)) (and (= x 0) (< y 0)) (and (< 0 x) (< y 0)) (and (< 0 x) (= y 0)) (and (< 0 x) (< 0 y)))");
        assert_eq!(minimize(&f, &[]).unwrap().to_string(), "(or (< y 0) (< 0 x))");
        assert_eq!(minimize(&p("(or (< x 1) (not (< x 1)))"), &[]).unwrap(), Formula::True);
        assert_eq!(minimize(&p("(and (< x y) (< y x))"), &[]).unwrap(), Formula::False);
        assert_eq!(
            minimize(&p("(and (< x 1) (< x 2))"), &[q("0")]).unwrap().to_string(),
            "(< x 1)"
        );
    }

    #[test]
    fn equivalent_on_corpus() {
        let mut r = crate::corpus::rng(21);
        for _ in 0..150 {
            let f = crate::dlo::eliminate_quantifiers(&crate::corpus::pure_order(&mut r, 3, 2)).unwrap();
            let g = minimize(&f, &[]).unwrap();
            let vars: Vec<String> = f.free_variable_names().into_iter().collect();
            let consts: Vec<Rational> = f.element_constants().into_iter().collect();
            for c in enumerate_cells(&vars, &consts) {
                let env: Env = vars.iter().cloned().zip(c.representative()).collect();
                assert_eq!(
                    semantic_eval(&f, &env).unwrap(),
                    semantic_eval(&g, &env).unwrap(),
                    "{f} vs {g}"
                );
            }
        }
    }
}
