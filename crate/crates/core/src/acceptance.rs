//! The acceptance suite: ten end-to-end checks with pinned sizes and time
//! budgets. Each check returns a report instead of panicking so that the
//! CLI `selftest` and the `acceptance` test target print the same lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::Rng;
use serde::Serialize;

use crate::coding::{fiber, find_code_in_interval, rho, set_of_index, unbounded_fiber_witness};
use crate::corpus::{open_unary, order_a, order_a_point, pure_order, rng, wmso_fragment};
use crate::dlo::{eliminate_quantifiers, enumerate_cells, eval_qf, semantic_eval, Env};
use crate::formula::Formula;
use crate::interior::{interior_formula, non_interior_certificate, nonelementarity_report, open_core_check, Interior};
use crate::rational::{q, Rational};
use crate::rnf::evaluate_point;
use crate::semantics::eval_direct;
use crate::wmso::{
    eliminate_w, eval_wformula, parameter_bound, s_preimage, set_intersection, set_max, set_min, set_union,
    vs_evaluate, FiniteSetQ, WValue, WmsoError, DEFAULT_ANCHOR_LIMIT,
};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: Option<f64>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let budget = self.budget_seconds.map_or(String::new(), |b| format!(" (budget {b}s)"));
        write!(
            f,
            "criterion {:>2} {verdict} {}: {} [{:.2}s{budget}]",
            self.id, self.name, self.detail, self.seconds
        )
    }
}

type Outcome = (bool, String);

fn timed(id: u8, name: &'static str, budget: Option<f64>, check: impl FnOnce() -> Outcome) -> CriterionReport {
    let start = Instant::now();
    let (ok, detail) = check();
    let seconds = start.elapsed().as_secs_f64();
    let within = budget.is_none_or(|b| seconds < b);
    let detail = if ok && !within {
        format!("{detail}; over the time budget")
    } else {
        detail
    };
    CriterionReport {
        id,
        name,
        passed: ok && within,
        detail,
        seconds,
        budget_seconds: budget,
    }
}

/// Runs criterion `id` (1 to 10).
pub fn run(id: u8, seed: u64) -> Option<CriterionReport> {
    Some(match id {
        1 => timed(1, "coding density", Some(5.0), || coding_density(seed)),
        2 => timed(2, "finite and unbounded fibers", Some(1.0), || finite_fibers(seed)),
        3 => timed(3, "DLO QE oracle agreement", Some(30.0), || qe_agreement(seed)),
        4 => timed(4, "cell count", None, cell_count),
        5 => timed(5, "RNF soundness", Some(60.0), || rnf_soundness(seed)),
        6 => timed(6, "WMSO oracle agreement and parameter bound", Some(30.0), || {
            wmso_agreement(seed)
        }),
        7 => timed(7, "interior pipeline", Some(60.0), || interior_pipeline(seed)),
        8 => timed(8, "open core o-minimality", Some(120.0), || open_core(seed)),
        9 => timed(9, "non-elementarity", None, nonelementarity),
        10 => timed(10, "finite-set algebra", None, set_algebra),
        _ => return None,
    })
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    (1..=10).filter_map(|i| run(i, seed)).collect()
}

fn fail(msg: String) -> Outcome {
    (false, msg)
}

fn coding_density(seed: u64) -> Outcome {
    let mut r = rng(seed ^ 1);
    let mut calls = 0;
    for _ in 0..200 {
        // left end in (−10⁶, 0), width at least 10⁻⁶
        let a = Rational::new(-r.gen_range(1..1_000_000_000i64), 1000).expect("nonzero");
        let w = Rational::new(r.gen_range(1..=1_000_000_000i64), 1_000_000).expect("nonzero");
        let b = (&a + &w).min(Rational::zero());
        for n in 0..64u32 {
            let target = set_of_index(&BigUint::from(n));
            match find_code_in_interval(&BigUint::from(n), &a, &b) {
                Ok(x) if a < x && x < b && rho(&x).as_ref() == Ok(&target) => calls += 1,
                Ok(x) => return fail(format!("n={n} on ({a}, {b}) gave {x}")),
                Err(e) => return fail(format!("n={n} on ({a}, {b}): {e}")),
            }
        }
    }
    (
        true,
        format!("{calls} points found, each inside its interval with the prescribed code"),
    )
}

fn finite_fibers(seed: u64) -> Outcome {
    let mut r = rng(seed ^ 2);
    for _ in 0..1000 {
        let x = Rational::new(-r.gen_range(1..1_000_000i64), r.gen_range(1..1_000_000i64)).expect("nonzero");
        // a code is read off the denominator, one element per gamma pair or
        // per bit of the 2-adic valuation
        let bound = x.denom_magnitude().bits() as usize;
        if fiber(&x).len() > bound {
            return fail(format!("fiber of {x} has {} elements", fiber(&x).len()));
        }
    }
    for n in 0..=64u32 {
        let size = fiber(&unbounded_fiber_witness(n)).len();
        if size <= n as usize {
            return fail(format!("witness for N={n} has a fiber of size {size}"));
        }
    }
    (
        true,
        "10^3 sampled fibers within the denominator bound; |fiber(witness N)| = N+1 for N ≤ 64".into(),
    )
}

fn cells_agree(f: &Formula, g: &Formula) -> Result<bool, String> {
    let vars: Vec<String> = f
        .free_variable_names()
        .union(&g.free_variable_names())
        .cloned()
        .collect();
    let mut consts: Vec<Rational> = f.element_constants().into_iter().collect();
    consts.extend(g.element_constants());
    for c in enumerate_cells(&vars, &consts) {
        let env: Env = vars.iter().cloned().zip(c.representative()).collect();
        let a = semantic_eval(f, &env).map_err(|e| e.to_string())?;
        let b = eval_qf(g, &env).map_err(|e| e.to_string())?;
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}

fn qe_agreement(seed: u64) -> Outcome {
    let mut r = rng(seed ^ 3);
    let mut quantified = 0;
    for i in 0..600 {
        let f = pure_order(&mut r, 4, 3);
        let g = match eliminate_quantifiers(&f) {
            Ok(g) if g.is_quantifier_free() => g,
            Ok(g) => return fail(format!("#{i} {f}: output {g} still quantified")),
            Err(e) => return fail(format!("#{i} {f}: {e}")),
        };
        match cells_agree(&f, &g) {
            Ok(true) => quantified += (f.quantifier_count() > 0) as usize,
            Ok(false) => return fail(format!("#{i} {f}: output {g} disagrees")),
            Err(e) => return fail(format!("#{i} {f}: {e}")),
        }
    }
    (
        true,
        format!("600 formulas ({quantified} quantified) agree on every cell representative"),
    )
}

fn cell_count() -> Outcome {
    let vars = vec!["x1".to_string(), "x2".to_string()];
    let c = q("0");
    let cells = enumerate_cells(&vars, std::slice::from_ref(&c));
    // weak orders of {x1, x2, c}: rank maps into {0, 1, 2} with no gaps
    let mut brute: BTreeSet<Vec<usize>> = BTreeSet::new();
    for code in 0..27usize {
        let ranks = [code % 3, code / 3 % 3, code / 9];
        let mut used: Vec<usize> = ranks.to_vec();
        used.sort();
        used.dedup();
        brute.insert(
            ranks
                .iter()
                .map(|r| used.iter().position(|u| u == r).unwrap())
                .collect(),
        );
    }
    let realized: BTreeSet<Vec<usize>> = cells
        .iter()
        .map(|cell| {
            let p = cell.representative();
            let vals = [p[0].clone(), p[1].clone(), c.clone()];
            vals.iter()
                .map(|v| vals.iter().filter(|w| *w < v).collect::<BTreeSet<_>>().len())
                .collect()
        })
        .collect();
    let ok = cells.len() == 13 && brute.len() == 13 && realized == brute;
    (
        ok,
        format!(
            "enumerate_cells(r=2, |C|=1) = {}, brute-force weak orders = {}, representatives cover them: {}",
            cells.len(),
            brute.len(),
            realized == brute
        ),
    )
}

fn rnf_soundness(seed: u64) -> Outcome {
    let mut r = rng(seed ^ 5);
    let (mut formulas, mut points) = (0, 0);
    while formulas < 200 {
        let f = order_a(&mut r, 3, 2);
        for _ in 0..100 {
            let p = order_a_point(&mut r, &["x", "y"]);
            let direct = match eval_direct(&f, &p) {
                Ok(b) => b,
                Err(e) => return fail(format!("{f} at {p:?}: direct evaluation failed: {e}")),
            };
            match evaluate_point(&f, &p) {
                Ok(b) if b == direct => points += 1,
                Ok(b) => {
                    return fail(format!(
                        "{f} at {p:?}: normal form says {b}, direct evaluation {direct}"
                    ))
                }
                Err(e) => return fail(format!("{f} at {p:?}: {e}")),
            }
        }
        formulas += 1;
    }
    (true, format!("{formulas} formulas × 100 points, {points} agreements"))
}

fn wmso_agreement(seed: u64) -> Outcome {
    let envs: Vec<BTreeMap<String, WValue>> = vec![
        BTreeMap::from([
            ("y".to_string(), WValue::Element(q("3/2"))),
            (
                "T".to_string(),
                WValue::Set(FiniteSetQ::new([q("1/2"), q("2")]).expect("positive")),
            ),
        ]),
        BTreeMap::from([
            ("y".to_string(), WValue::Element(q("1"))),
            ("T".to_string(), WValue::Set(FiniteSetQ::empty())),
        ]),
    ];
    let mut r = rng(seed ^ 6);
    let (mut compared, mut skipped, mut tried) = (0, 0, 0);
    while compared < 500 && tried < 2000 {
        tried += 1;
        let f = wmso_fragment(&mut r, 4);
        let out = match eliminate_w(&f) {
            Ok(g) => g,
            Err(e) => return fail(format!("{f}: {e}")),
        };
        if !out.parameter_closure().is_subset(&parameter_bound(&f)) {
            return fail(format!("{f}: output {out} has parameters outside E"));
        }
        let mut all = true;
        for e in &envs {
            let oracle = match vs_evaluate(&f, e, DEFAULT_ANCHOR_LIMIT) {
                Ok(b) => b,
                Err(WmsoError::AnchorLimit { .. }) => {
                    all = false;
                    continue;
                }
                Err(err) => return fail(format!("{f}: oracle failed: {err}")),
            };
            match eval_wformula(&f, e) {
                Ok(b) if b == oracle => {}
                Ok(b) => return fail(format!("{f} under {e:?}: eliminator {b}, oracle {oracle}")),
                Err(err) => return fail(format!("{f}: {err}")),
            }
        }
        if all {
            compared += 1;
        } else {
            skipped += 1;
        }
    }
    let ok = compared >= 500;
    (ok, format!("{compared} formulas agree in both environments with parameters inside E; {skipped} left out for exceeding the oracle's anchor limit"))
}

/// A rational `a + r·s` with `s` in `(−1, 1)`.
fn jitter(rng: &mut StdRng, a: &Rational, r: &Rational) -> Rational {
    let den: i64 = 1 << rng.gen_range(1..12);
    let s = Rational::new(rng.gen_range(1 - den..den), den).expect("nonzero");
    a + &(r * &s)
}

/// Checks the interior of `f` on `points`: interior points get a cube
/// verified symbolically, then `per_box` direct evaluations inside it,
/// half of them steered onto `A`; other points of the set get a
/// certificate of depth 10.
fn check_interior_points(
    f: &Formula,
    points: &[BTreeMap<String, Rational>],
    per_box: usize,
    r: &mut StdRng,
) -> Result<(usize, usize), String> {
    let plan = Interior::new(f).map_err(|e| e.to_string())?;
    let g = plan.formula().map_err(|e| e.to_string())?;
    let (mut inside, mut certified) = (0, 0);
    for p in points {
        if eval_qf(&g, p).map_err(|e| e.to_string())? {
            let k = plan
                .interior_cube(p, 64)
                .map_err(|e| e.to_string())?
                .ok_or(format!("no cube inside at {p:?}"))?;
            let half = Rational::new(1, num_bigint::BigInt::from(1u8) << k).expect("nonzero");
            for i in 0..per_box {
                let mut s: BTreeMap<String, Rational> =
                    p.iter().map(|(v, a)| (v.clone(), jitter(r, a, &half))).collect();
                if i % 2 == 0 {
                    steer_onto_a(&mut s, p, &half);
                }
                if !eval_direct(f, &s).map_err(|e| e.to_string())? {
                    return Err(format!(
                        "{s:?} in the cube of half-width 2^-{k} around {p:?} is outside the set"
                    ));
                }
            }
            inside += 1;
        } else if eval_direct(f, p).map_err(|e| e.to_string())? {
            match non_interior_certificate(f, p, 10).map_err(|e| e.to_string())? {
                Some(_) => certified += 1,
                None => return Err(format!("{p:?} is outside the computed interior but has no certificate")),
            }
        } else {
            certified += 1;
        }
    }
    Ok((inside, certified))
}

/// Moves `x` so that `A(x, y)` holds, when the cube allows it.
fn steer_onto_a(s: &mut BTreeMap<String, Rational>, center: &BTreeMap<String, Rational>, half: &Rational) {
    let (Some(x), Some(y)) = (s.get("x").cloned(), s.get("y").cloned()) else {
        return;
    };
    if !x.is_negative() || !y.is_positive() {
        return;
    }
    let lo = &center["x"] - half;
    let hi = (&center["x"] + half).min(Rational::zero());
    if let Ok(x) = crate::coding::find_set_in_interval(&FiniteSetQ::singleton(y).expect("positive"), &lo, &hi) {
        s.insert("x".to_string(), x);
    }
}

fn interior_pipeline(seed: u64) -> Outcome {
    let a = crate::formula::parse_formula("(A x y)", crate::formula::Language::OrderA).expect("parses");
    let not_a = Formula::not(a.clone());
    let expected =
        crate::formula::parse_formula("(or (< 0 x) (< y 0))", crate::formula::Language::OrderA).expect("parses");
    let (int_a, int_not_a) = match (interior_formula(&a), interior_formula(&not_a)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return fail(e.to_string()),
    };
    if int_a != Formula::False {
        return fail(format!("Int(A) = {int_a}"));
    }
    if int_not_a.mentions_a() || !int_not_a.is_pure_order() {
        return fail(format!("Int(¬A) = {int_not_a} is not a pure-order formula"));
    }
    match cells_agree(&expected, &int_not_a) {
        Ok(true) => {}
        _ => return fail(format!("Int(¬A) = {int_not_a}")),
    }
    let mut r = rng(seed ^ 7);
    let points: Vec<BTreeMap<String, Rational>> = (0..1000).map(|_| order_a_point(&mut r, &["x", "y"])).collect();
    let mut detail = vec!["Int(A) = false, Int(¬A) ≡ x>0 ∨ y<0 on every cell".to_string()];
    for (name, f) in [("A", &a), ("¬A", &not_a)] {
        match check_interior_points(f, &points, 10_000, &mut r) {
            Ok((inside, other)) => detail.push(format!(
                "{name}: {inside} interior points with 10^4 cube samples each, {other} others certified"
            )),
            Err(e) => return fail(format!("{name}: {e}")),
        }
    }
    (true, detail.join("; "))
}

fn open_core(seed: u64) -> Outcome {
    let mut r = rng(seed ^ 8);
    let mut shapes = BTreeSet::new();
    for i in 0..50 {
        let f = open_unary(&mut r, 2);
        let report = match open_core_check(&f, 200, seed, 10) {
            Ok(rep) => rep,
            Err(e) => return fail(format!("#{i} {f}: {e}")),
        };
        let Some(d) = report.description.clone() else {
            return fail(format!("#{i} {f}: reported not open at {:?}", report.counterexample));
        };
        let mut anchors: BTreeSet<Rational> = f.element_constants();
        for c in f.element_constants() {
            anchors.extend(fiber(&c).iter().cloned());
        }
        let anchors: Vec<Rational> = anchors.into_iter().collect();
        for k in 0..1000 {
            let y = if k < anchors.len() {
                anchors[k].clone()
            } else {
                let a = &anchors[r.gen_range(0..anchors.len())];
                jitter(&mut r, a, &q("4"))
            };
            let direct = match eval_direct(&f, &BTreeMap::from([("y".to_string(), y.clone())])) {
                Ok(b) => b,
                Err(e) => return fail(format!("#{i} {f} at {y}: {e}")),
            };
            if d.contains(&y) != direct {
                return fail(format!("#{i} {f}: description {d} and direct evaluation differ at {y}"));
            }
        }
        shapes.insert(d.components());
    }
    (true, format!("50 open formulas, each a finite union of intervals agreeing with direct evaluation at 10^3 points; component counts seen {shapes:?}"))
}

fn nonelementarity() -> Outcome {
    for n in 0..=64 {
        let rep = nonelementarity_report(n);
        if rep.fiber_size <= n as usize || rep.complement_components != rep.fiber_size + 1 {
            return fail(format!(
                "N={n}: fiber size {}, {} components",
                rep.fiber_size, rep.complement_components
            ));
        }
    }
    (
        true,
        "for N ≤ 64 the witness fiber has N+1 points and its complement N+2 convex components".into(),
    )
}

fn set_algebra() -> Outcome {
    let universe = [q("1/2"), q("1"), q("3/2"), q("2")];
    let subsets: Vec<FiniteSetQ> = (0..16u32)
        .map(|m| FiniteSetQ::new((0..4).filter(|i| m >> i & 1 == 1).map(|i| universe[i].clone())).expect("positive"))
        .collect();
    let members = |s: &FiniteSetQ| -> Vec<Rational> { s.iter().cloned().collect() };
    let from = |xs: Vec<Rational>| FiniteSetQ::new(xs).expect("positive");
    let mut checked = 0;
    for a in &subsets {
        let least: Vec<Rational> = members(a).into_iter().filter(|x| a.iter().all(|y| x <= y)).collect();
        let greatest: Vec<Rational> = members(a).into_iter().filter(|x| a.iter().all(|y| x >= y)).collect();
        if set_min(a) != from(least) || set_max(a) != from(greatest) {
            return fail(format!("min/max of {a}"));
        }
        for b in &subsets {
            let union: Vec<Rational> = universe
                .iter()
                .filter(|u| a.contains(u) || b.contains(u))
                .cloned()
                .collect();
            let inter: Vec<Rational> = universe
                .iter()
                .filter(|u| a.contains(u) && b.contains(u))
                .cloned()
                .collect();
            // i has a successor j in A: nothing of A lies strictly between
            let pre: Vec<Rational> = members(a)
                .into_iter()
                .filter(|i| {
                    a.iter()
                        .any(|j| i < j && b.contains(j) && !a.iter().any(|k| i < k && k < j))
                })
                .collect();
            if set_union(a, b) != from(union) || set_intersection(a, b) != from(inter) || s_preimage(a, b) != from(pre)
            {
                return fail(format!("operations on {a}, {b}"));
            }
            checked += 1;
        }
    }
    let fixes_empty = set_min(&FiniteSetQ::empty()).is_empty() && set_max(&FiniteSetQ::empty()).is_empty();
    (
        fixes_empty,
        format!("{checked} pairs of subsets of a 4-element universe; min and max fix ∅: {fixes_empty}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_criteria() {
        for id in [4, 9, 10] {
            let rep = run(id, 0).unwrap();
            assert!(rep.passed, "{rep}");
        }
        assert!(run(11, 0).is_none());
    }
}
