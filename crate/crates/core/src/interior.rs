//! Interiors of sets definable in `(ℚ, <, 0, A)`, computed in the pure order.
//!
//! A point is interior to `X` when some open box around it lies in `X`. On a
//! sign stratum the box condition splits over the complete order cells `δ`
//! of the negative coordinates: whenever the negative part of the box meets
//! `δ`, every label tuple compatible with `δ` must satisfy `Θ_δ` on the whole
//! positive part. Both halves are pure-order conditions on the endpoints,
//! which are then eliminated. A box around a point with zero coordinates
//! crosses strata and is split along them, so no separate gluing step is
//! needed.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::coding::{fiber, find_set_in_interval, unbounded_fiber_witness};
use crate::dlo::{
    eliminate_quantifiers, enumerate_cells_in, eval_qf, sample_points, simplify, DloError, Domain, Env, IntervalUnion,
    OrderCell,
};
use crate::formula::{fresh_name, Atom, Binder, Formula, Guard, SetTerm, Term};
use crate::rational::Rational;
use crate::rnf::{code_var, evaluate_point, to_rnf, RelativeNormalForm, RnfError, Sign, SignStratum};
use crate::semantics::{eval_direct, SemanticsError};
use crate::wmso::{eliminate_w, FiniteSetQ, WmsoError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InteriorError {
    #[error(transparent)]
    Rnf(#[from] RnfError),
    #[error(transparent)]
    Wmso(#[from] WmsoError),
    #[error(transparent)]
    Dlo(#[from] DloError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("expected at most one free variable, found {0:?}")]
    NotUnary(Vec<String>),
    #[error("interval ({0}, {1}) is not a nonempty open interval on one side of 0")]
    BadBox(Rational, Rational),
    #[error("point {0} satisfies the interior formula but not the formula")]
    Unsound(String),
}

/// An open box `∏(ℓᵢ, uᵢ) × ∏(pⱼ, qⱼ)` with `ℓᵢ < uᵢ ≤ 0 ≤ pⱼ < qⱼ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpenBox {
    pub negative: Vec<(Rational, Rational)>,
    pub positive: Vec<(Rational, Rational)>,
}

impl OpenBox {
    pub fn new(
        negative: Vec<(Rational, Rational)>,
        positive: Vec<(Rational, Rational)>,
    ) -> Result<Self, InteriorError> {
        for (l, u) in &negative {
            if l >= u || u.is_positive() {
                return Err(InteriorError::BadBox(l.clone(), u.clone()));
            }
        }
        for (p, q) in &positive {
            if p >= q || p.is_negative() {
                return Err(InteriorError::BadBox(p.clone(), q.clone()));
            }
        }
        Ok(OpenBox { negative, positive })
    }
}

/// One coordinate of a box in terms of endpoint terms. A missing lower bound
/// on a positive coordinate means the interval starts at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Side {
    pub lo: Option<Term>,
    pub hi: Term,
}

impl Side {
    pub fn new(lo: impl Into<Term>, hi: impl Into<Term>) -> Side {
        Side {
            lo: Some(lo.into()),
            hi: hi.into(),
        }
    }

    fn bounds(&self, v: &str) -> Vec<Formula> {
        let mut out: Vec<Formula> = self.lo.iter().map(|lo| Formula::lt(lo.clone(), Term::var(v))).collect();
        out.push(Formula::lt(Term::var(v), self.hi.clone()));
        out
    }
}

fn set_eq(a: SetTerm, b: SetTerm) -> Formula {
    Formula::Atom(Atom::SetEq(a, b))
}

/// `Comp_δ`: the labels of variables the cell forces equal are equal, and a
/// variable the cell puts on a parameter `c` carries `ρ(c)`.
pub fn comp_formula(cell: &OrderCell, setvars: &[String]) -> Formula {
    let mut parts = Vec::new();
    for b in cell.blocks() {
        let Some(&first) = b.vars.first() else { continue };
        for &v in &b.vars[1..] {
            parts.push(set_eq(SetTerm::var(&setvars[first]), SetTerm::var(&setvars[v])));
        }
        if let Some(p) = b.param {
            parts.push(set_eq(
                SetTerm::var(&setvars[first]),
                SetTerm::Lit(fiber(&cell.params()[p])),
            ));
        }
    }
    Formula::and_all(parts)
}

/// `Meet_δ`: the box with the given sides meets the cell.
pub fn meet_formula(cell: &OrderCell, sides: &[Side]) -> Result<Formula, DloError> {
    let mut body = vec![cell.formula()];
    for (v, s) in cell.vars().iter().zip(sides) {
        body.extend(s.bounds(v));
    }
    let mut f = Formula::and_all(body);
    for v in cell.vars().iter().rev() {
        f = Formula::exists(Binder::Element(Guard::Any), v, f);
    }
    eliminate_quantifiers(&f)
}

/// `γ_δ`: every label tuple compatible with the cell satisfies `theta` at
/// every point of the positive part of the box. `theta` refers to the labels
/// as `S_x` and to the positive coordinates by `pos_vars`.
pub fn gamma_formula(
    cell: &OrderCell,
    theta: &Formula,
    pos_vars: &[String],
    sides: &[Side],
) -> Result<Formula, WmsoError> {
    let setvars: Vec<String> = cell.vars().iter().map(|v| code_var(v)).collect();
    let mut hyp = vec![comp_formula(cell, &setvars)];
    for (y, s) in pos_vars.iter().zip(sides) {
        hyp.extend(s.bounds(y));
    }
    let mut g = Formula::imp(Formula::and_all(hyp), theta.clone());
    for y in pos_vars.iter().rev() {
        g = Formula::forall(Binder::Element(Guard::Any), y, g);
    }
    for s in setvars.iter().rev() {
        g = Formula::forall(Binder::Set, s, g);
    }
    eliminate_w(&g)
}

/// The pure-order condition on the endpoints for the box to lie inside the
/// set defined by `rnf` on its stratum. Sides follow the order of the
/// negative and positive variables of the stratum.
pub fn box_subset_formula(
    rnf: &RelativeNormalForm,
    neg_sides: &[Side],
    pos_sides: &[Side],
) -> Result<Formula, InteriorError> {
    let neg = &rnf.negative_vars;
    let pos = rnf.stratum.vars_with(Sign::Positive);
    let mut parts = Vec::new();
    for cell in enumerate_cells_in(neg, &rnf.params, Domain::Negative) {
        let env: Env = neg.iter().cloned().zip(cell.representative()).collect();
        let mut thetas = Vec::new();
        for d in &rnf.disjuncts {
            if eval_qf(&d.chi, &env)? {
                thetas.push(d.theta.clone());
            }
        }
        let gamma = gamma_formula(&cell, &Formula::or_all(thetas), &pos, pos_sides)?;
        if gamma == Formula::True {
            continue;
        }
        parts.push(Formula::imp(meet_formula(&cell, neg_sides)?, gamma));
    }
    Ok(simplify(&Formula::and_all(parts)))
}

/// Whether the concrete box lies in the set `rnf` defines on its stratum.
pub fn box_subset(rnf: &RelativeNormalForm, b: &OpenBox) -> Result<bool, InteriorError> {
    let neg = &rnf.negative_vars;
    let pos = rnf.stratum.vars_with(Sign::Positive);
    let mut names: BTreeSet<String> = neg.iter().chain(&pos).cloned().collect();
    for d in &rnf.disjuncts {
        names.extend(d.theta.all_names());
    }
    let mut env = Env::new();
    let mut side = |l: &Rational, u: &Rational, env: &mut Env| {
        let lo = fresh_name("l", &names);
        names.insert(lo.clone());
        let hi = fresh_name("u", &names);
        names.insert(hi.clone());
        env.insert(lo.clone(), l.clone());
        env.insert(hi.clone(), u.clone());
        Side::new(Term::var(&lo), Term::var(&hi))
    };
    let neg_sides: Vec<Side> = b.negative.iter().map(|(l, u)| side(l, u, &mut env)).collect();
    let pos_sides: Vec<Side> = b
        .positive
        .iter()
        .map(|(p, q)| {
            let s = side(p, q, &mut env);
            // γ assumes positive endpoints; a face at 0 is no bound at all
            if p.is_zero() {
                Side { lo: None, ..s }
            } else {
                s
            }
        })
        .collect();
    Ok(eval_qf(&box_subset_formula(rnf, &neg_sides, &pos_sides)?, &env)?)
}

fn sign_formula(v: &str, s: Sign) -> Formula {
    match s {
        Sign::Negative => Formula::lt(Term::var(v), Term::zero()),
        Sign::Zero => Formula::eq(Term::var(v), Term::zero()),
        Sign::Positive => Formula::lt(Term::zero(), Term::var(v)),
    }
}

fn all_strata(vars: &[String]) -> Vec<SignStratum> {
    let mut out = vec![SignStratum(BTreeMap::new())];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                [Sign::Negative, Sign::Zero, Sign::Positive].map(|g| {
                    let mut t = s.clone();
                    t.0.insert(v.clone(), g);
                    t
                })
            })
            .collect();
    }
    out
}

/// The box condition around points of one sign stratum, before the
/// endpoints are eliminated.
#[derive(Debug, Clone)]
struct StratumPlan {
    signs: SignStratum,
    ends: BTreeMap<String, (String, String)>,
    condition: Formula,
}

/// Interior computation for one formula; see [`interior_formula`].
#[derive(Debug, Clone)]
pub struct Interior {
    vars: Vec<String>,
    strata: Vec<StratumPlan>,
}

impl Interior {
    pub fn new(f: &Formula) -> Result<Interior, InteriorError> {
        let vars: Vec<String> = f.free_variable_names().into_iter().collect();
        let mut names = f.all_names();
        let mut ends = BTreeMap::new();
        for v in &vars {
            let lo = fresh_name(&format!("l_{v}"), &names);
            names.insert(lo.clone());
            let hi = fresh_name(&format!("u_{v}"), &names);
            names.insert(hi.clone());
            ends.insert(v.clone(), (lo, hi));
        }
        let mut rnfs: BTreeMap<SignStratum, RelativeNormalForm> = BTreeMap::new();
        let mut strata = Vec::new();
        for tau in all_strata(&vars) {
            let mut parts = Vec::new();
            for (v, (lo, hi)) in &ends {
                let (lo, hi) = (Term::var(lo), Term::var(hi));
                match tau.0[v] {
                    Sign::Negative => parts.extend([
                        Formula::lt(lo, Term::var(v)),
                        Formula::lt(Term::var(v), hi.clone()),
                        Formula::lt(hi, Term::zero()),
                    ]),
                    Sign::Positive => parts.extend([
                        Formula::lt(Term::zero(), lo.clone()),
                        Formula::lt(lo, Term::var(v)),
                        Formula::lt(Term::var(v), hi),
                    ]),
                    Sign::Zero => parts.extend([Formula::lt(lo, Term::zero()), Formula::lt(Term::zero(), hi)]),
                }
            }
            // the box meets every stratum that refines `tau` on its zero
            // coordinates
            let zeros = tau.vars_with(Sign::Zero);
            for refinement in all_strata(&zeros) {
                let mut sigma = tau.clone();
                sigma.0.extend(refinement.0);
                if !rnfs.contains_key(&sigma) {
                    rnfs.insert(sigma.clone(), to_rnf(f, &sigma)?);
                }
                let rnf = &rnfs[&sigma];
                let side = |v: &String| {
                    let (lo, hi) = &ends[v];
                    match (tau.0[v], sigma.0[v]) {
                        (Sign::Zero, Sign::Negative) => Side::new(Term::var(lo), Term::zero()),
                        (Sign::Zero, _) => Side {
                            lo: None,
                            hi: Term::var(hi),
                        },
                        _ => Side::new(Term::var(lo), Term::var(hi)),
                    }
                };
                let neg: Vec<Side> = rnf.negative_vars.iter().map(side).collect();
                let pos: Vec<Side> = sigma.vars_with(Sign::Positive).iter().map(side).collect();
                parts.push(box_subset_formula(rnf, &neg, &pos)?);
            }
            strata.push(StratumPlan {
                signs: tau,
                ends: ends.clone(),
                condition: simplify(&Formula::and_all(parts)),
            });
        }
        Ok(Interior { vars, strata })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// The pure-order formula defining the interior.
    pub fn formula(&self) -> Result<Formula, DloError> {
        crate::dlo::minimize(&self.raw_formula()?, &[Rational::zero()])
    }

    fn raw_formula(&self) -> Result<Formula, DloError> {
        let mut out = Vec::new();
        for plan in &self.strata {
            let mut g = plan.condition.clone();
            for (lo, hi) in plan.ends.values().rev() {
                g = Formula::exists(
                    Binder::Element(Guard::Any),
                    lo,
                    Formula::exists(Binder::Element(Guard::Any), hi, g),
                );
            }
            let signs = plan.signs.0.iter().map(|(v, s)| sign_formula(v, *s));
            out.push(Formula::and_all(signs.chain([eliminate_quantifiers(&g)?])));
        }
        Ok(simplify(&Formula::or_all(out)))
    }

    /// Whether the cube of half-width `2^-k` around `point` passes the
    /// symbolic box condition. Cubes that cross 0 in a nonzero coordinate
    /// are not considered.
    pub fn cube_inside(&self, point: &BTreeMap<String, Rational>, k: u32) -> Result<bool, InteriorError> {
        let r = half_width(k);
        let restricted: BTreeMap<String, Rational> = self
            .vars
            .iter()
            .map(|v| {
                (
                    v.clone(),
                    point.get(v).cloned().ok_or_else(|| RnfError::Unbound(v.clone())),
                )
            })
            .map(|(v, x)| x.map(|x| (v, x)))
            .collect::<Result<_, _>>()?;
        let tau = SignStratum::of_point(&restricted);
        let plan = self
            .strata
            .iter()
            .find(|p| p.signs == tau)
            .expect("every stratum is planned");
        let mut env: Env = restricted.clone();
        for (v, (lo, hi)) in &plan.ends {
            let a = &restricted[v];
            let (l, u) = (a - &r, a + &r);
            match tau.0[v] {
                Sign::Negative if !u.is_negative() => return Ok(false),
                Sign::Positive if !l.is_positive() => return Ok(false),
                _ => {}
            }
            env.insert(lo.clone(), l);
            env.insert(hi.clone(), u);
        }
        Ok(eval_qf(&plan.condition, &env)?)
    }

    /// The least `k ≤ depth` whose cube around `point` lies in the set.
    pub fn interior_cube(&self, point: &BTreeMap<String, Rational>, depth: u32) -> Result<Option<u32>, InteriorError> {
        for k in 0..=depth {
            if self.cube_inside(point, k)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

fn half_width(k: u32) -> Rational {
    Rational::new(1, num_bigint::BigInt::from(1u8) << k).expect("nonzero")
}

/// A pure-order formula defining the interior of the set `f` defines, in
/// the product topology on `ℚⁿ`.
pub fn interior_formula(f: &Formula) -> Result<Formula, InteriorError> {
    Ok(Interior::new(f)?.formula()?)
}

/// Points of the complement of `f` in every cube of half-width `2^-k`
/// around `point`, `k ≤ depth`, or `None` if some cube yields none.
///
/// Candidates per coordinate are the coordinate itself and the two points
/// halfway to the cube's faces; negative coordinates also get points whose
/// codes are the empty set, singletons of positive candidates of the other
/// coordinates or of positive constants of `f`, and all of these together.
pub fn non_interior_certificate(
    f: &Formula,
    point: &BTreeMap<String, Rational>,
    depth: u32,
) -> Result<Option<Vec<BTreeMap<String, Rational>>>, InteriorError> {
    let vars: Vec<String> = f.free_variable_names().into_iter().collect();
    let consts: Vec<Rational> = f
        .element_constants()
        .into_iter()
        .filter(Rational::is_positive)
        .collect();
    let mut out = Vec::new();
    for k in 0..=depth {
        let r = half_width(k + 1);
        let mut cands: Vec<Vec<Rational>> = Vec::new();
        for v in &vars {
            let a = point.get(v).ok_or_else(|| RnfError::Unbound(v.clone()))?;
            cands.push(vec![a.clone(), a - &r, a + &r]);
        }
        for (i, v) in vars.iter().enumerate() {
            let a = &point[v];
            let (lo, hi) = (a - &r, (a + &r).min(Rational::zero()));
            if lo >= hi {
                continue;
            }
            let mut pool: BTreeSet<Rational> = consts.iter().cloned().collect();
            for (j, c) in cands.iter().enumerate() {
                if j != i {
                    pool.extend(c.iter().filter(|x| x.is_positive()).cloned());
                }
            }
            let mut labels = vec![
                FiniteSetQ::empty(),
                FiniteSetQ::new(pool.iter().cloned()).expect("positive"),
            ];
            labels.extend(pool.iter().map(|x| FiniteSetQ::singleton(x.clone()).expect("positive")));
            for l in labels {
                cands[i].push(find_set_in_interval(&l, &lo, &hi).expect("nonempty negative interval"));
            }
        }
        let mut found = None;
        let mut idx = vec![0usize; vars.len()];
        'search: loop {
            let p: BTreeMap<String, Rational> = vars
                .iter()
                .zip(&idx)
                .enumerate()
                .map(|(i, (v, &j))| (v.clone(), cands[i][j].clone()))
                .collect();
            if !eval_direct(f, &p)? {
                found = Some(p);
                break;
            }
            for i in 0..vars.len() {
                idx[i] += 1;
                if idx[i] < cands[i].len() {
                    continue 'search;
                }
                idx[i] = 0;
            }
            break;
        }
        match found {
            Some(p) => out.push(p),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// The outcome of [`open_core_check`].
#[derive(Debug, Clone, Serialize)]
pub struct OpenCoreReport {
    pub variable: String,
    pub is_open: bool,
    pub interior: IntervalUnion,
    /// The set itself, when it is open.
    pub description: Option<IntervalUnion>,
    pub pure_order_formula: Formula,
    /// A point of the set outside its interior, with complement points in
    /// every cube around it.
    pub counterexample: Option<Rational>,
    pub certificate: Option<Vec<Rational>>,
    /// Codes of the negative constants of the formula.
    pub codes: Vec<(Rational, FiniteSetQ)>,
    pub checked_points: usize,
}

/// Openness of a unary definable set and, when open, its description as a
/// finite union of points and intervals.
///
/// The set is compared with its interior at the sample points of all
/// constants involved (including the codes of negative ones) and at
/// `samples` further random points.
pub fn open_core_check(f: &Formula, samples: usize, seed: u64, depth: u32) -> Result<OpenCoreReport, InteriorError> {
    let free: Vec<String> = f.free_variable_names().into_iter().collect();
    if free.len() > 1 {
        return Err(InteriorError::NotUnary(free));
    }
    let var = free.first().cloned().unwrap_or_else(|| "x".to_string());
    let g = interior_formula(f)?;
    let interior = crate::dlo::describe_unary(&g)?;
    let mut anchors: BTreeSet<Rational> = f.element_constants();
    let codes: Vec<(Rational, FiniteSetQ)> = f
        .element_constants()
        .into_iter()
        .filter(Rational::is_negative)
        .map(|c| (c.clone(), fiber(&c)))
        .collect();
    for (_, s) in &codes {
        anchors.extend(s.iter().cloned());
    }
    anchors.extend(g.element_constants());
    anchors.insert(Rational::zero());
    let anchors: Vec<Rational> = anchors.into_iter().collect();
    let mut points = sample_points(&anchors, Guard::Any);
    let mut rng = crate::corpus::rng(seed);
    let (lo, hi) = (
        anchors[0].clone() - Rational::one(),
        anchors[anchors.len() - 1].clone() + Rational::one(),
    );
    for _ in 0..samples {
        let den: i64 = rng.gen_range(1..=64);
        let t = Rational::new(rng.gen_range(0..=den), den).expect("nonzero");
        points.push(&lo + &(&(&hi - &lo) * &t));
    }
    let mut counterexample = None;
    for x in &points {
        let p = BTreeMap::from([(var.clone(), x.clone())]);
        let inside = if free.is_empty() {
            evaluate_point(f, &BTreeMap::new())?
        } else {
            evaluate_point(f, &p)?
        };
        let int = interior.contains(x);
        if int && !inside {
            return Err(InteriorError::Unsound(x.to_string()));
        }
        if inside && !int && counterexample.is_none() {
            counterexample = Some(x.clone());
        }
    }
    let certificate = match &counterexample {
        Some(x) if !free.is_empty() => non_interior_certificate(f, &BTreeMap::from([(var.clone(), x.clone())]), depth)?
            .map(|ps| ps.into_iter().map(|p| p[&var].clone()).collect()),
        _ => None,
    };
    let is_open = counterexample.is_none();
    Ok(OpenCoreReport {
        variable: var,
        is_open,
        description: is_open.then(|| interior.clone()),
        interior,
        pure_order_formula: g,
        counterexample,
        certificate,
        codes,
        checked_points: points.len(),
    })
}

/// Closed discrete definable sets of every finite size: the fiber of the
/// witness for `N` and the convex components of its complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonElementarity {
    pub n: u32,
    pub witness: Rational,
    pub fiber: FiniteSetQ,
    pub fiber_size: usize,
    pub complement_components: usize,
}

pub fn nonelementarity_report(n: u32) -> NonElementarity {
    let witness = unbounded_fiber_witness(n);
    let fiber = fiber(&witness);
    // a finite set is closed, so it is its own closure
    let points: Vec<Rational> = fiber.iter().cloned().collect();
    let complement = IntervalUnion::from_pieces(&points, |x| !fiber.contains(x));
    NonElementarity {
        n,
        fiber_size: fiber.len(),
        complement_components: complement.components(),
        witness,
        fiber,
    }
}
