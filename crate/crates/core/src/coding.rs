//! The dense coding of finite sets of positive rationals by negative
//! rationals, and the relation `A(x, y) ⟺ x < 0 < y ∧ y ∈ ρ(x)`.
//!
//! Positive rationals are enumerated in Calkin–Wilf order and a natural
//! number `n` names the set `F_n` of enumerated rationals at the set bits of
//! `n`. Write the denominator of a negative `x` as `2^v · 3^w · R` with `R`
//! prime to 6. Then
//!
//! ```text
//! ρ(x) = F_v  Δ  Dec(⌊R / 6⌋)
//! ```
//!
//! where `Dec(t)` reads the binary digits of `t` after the leading one as
//! Elias-gamma coded pairs `(a, b)`, one element `a/b` per pair, ignoring an
//! incomplete tail. On denominators `2ᵃ3ᵇ` this is `F_{v₂(den)}`. The second
//! term lets every finite set be coded by a denominator whose size is linear
//! in the size of the set, so small boxes can be hit with any prescribed
//! label.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::dlo::OrderCell;
use crate::rational::Rational;
use crate::wmso::FiniteSetQ;

/// Sets whose index has at most this many bits are coded through the power
/// of two alone; larger ones go through the gamma-coded factor.
const LOW_BITS: u64 = 12;

/// Default bound on the bit length of Calkin–Wilf indices accepted by
/// [`index_of`] and [`index_of_set`].
pub const DEFAULT_INDEX_BITS: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingError {
    #[error("{0} is not negative; the coding is defined on negative rationals only")]
    NotNegative(Rational),
    #[error("{0} is not positive")]
    NotPositive(Rational),
    #[error("interval ({a}, {b}) is empty or not contained in the negative rationals")]
    BadInterval { a: Rational, b: Rational },
    #[error("enumeration index of {value} exceeds the search limit of {limit} bits")]
    IndexLimit { value: Rational, limit: u64 },
    #[error("incompatible labels: {0}")]
    IncompatibleLabels(String),
    #[error("box does not meet the cell")]
    EmptyBoxCell,
}

/// The `i`-th element (from 0) of the Calkin–Wilf sequence `1, 1/2, 2, 1/3, 3/2, …`.
///
/// Walks the binary digits of `i + 1` below the leading one: a 0 bit goes to
/// the left child `a/(a+b)`, a 1 bit to the right child `(a+b)/b`.
pub fn enum_positive_rational(i: &BigUint) -> Rational {
    let node = i + 1u32;
    let bits = node.bits();
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    for k in (0..bits - 1).rev() {
        if node.bit(k) {
            a = &a + &b;
        } else {
            b = &a + &b;
        }
    }
    Rational::new(a, b).expect("positive denominator")
}

/// Calkin–Wilf index of a positive rational.
///
/// The index has bit length equal to the depth of the value in the tree,
/// which is the sum of its continued-fraction terms; values deeper than
/// `limit_bits` are rejected.
pub fn index_of(value: &Rational, limit_bits: u64) -> Result<BigUint, CodingError> {
    if !value.is_positive() {
        return Err(CodingError::NotPositive(value.clone()));
    }
    let (mut a, mut b) = (value.numer().magnitude().clone(), value.denom().magnitude().clone());
    // Collect runs of identical steps from the leaf up to the root.
    let mut runs: Vec<(bool, BigUint)> = Vec::new();
    let mut depth = BigUint::zero();
    while !(a.is_one() && b.is_one()) {
        if a > b {
            let (mut k, r) = a.div_rem(&b);
            let a_next = if r.is_zero() {
                k -= 1u32;
                b.clone()
            } else {
                r
            };
            depth += &k;
            runs.push((true, k));
            a = a_next;
        } else {
            let (mut k, r) = b.div_rem(&a);
            let b_next = if r.is_zero() {
                k -= 1u32;
                a.clone()
            } else {
                r
            };
            depth += &k;
            runs.push((false, k));
            b = b_next;
        }
        if depth >= BigUint::from(limit_bits) {
            return Err(CodingError::IndexLimit {
                value: value.clone(),
                limit: limit_bits,
            });
        }
    }
    let mut node = BigUint::one();
    for (bit, len) in runs.iter().rev() {
        let len = len.to_u64().expect("bounded by the limit");
        node <<= len;
        if *bit {
            node += (BigUint::one() << len) - 1u32;
        }
    }
    Ok(node - 1u32)
}

/// `F_n`: the enumerated rationals at the set bits of `n`.
pub fn set_of_index(n: &BigUint) -> FiniteSetQ {
    let elems = (0..n.bits())
        .filter(|&i| n.bit(i))
        .map(|i| enum_positive_rational(&BigUint::from(i)));
    FiniteSetQ::new(elems).expect("enumerated rationals are positive")
}

/// Inverse of [`set_of_index`].
pub fn index_of_set(set: &FiniteSetQ, limit_bits: u64) -> Result<BigUint, CodingError> {
    let mut n = BigUint::zero();
    for r in set.iter() {
        let i = index_of(r, limit_bits)?;
        let i = i.to_u64().ok_or_else(|| CodingError::IndexLimit {
            value: r.clone(),
            limit: limit_bits,
        })?;
        n.set_bit(i, true);
    }
    Ok(n)
}

fn strip(n: &mut BigUint, p: u32) -> u64 {
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return k;
        }
        *n = q;
        k += 1;
    }
}

fn push_gamma(bits: &mut Vec<bool>, n: &BigUint) {
    let len = n.bits();
    bits.extend(std::iter::repeat_n(false, len as usize - 1));
    bits.extend((0..len).rev().map(|i| n.bit(i)));
}

/// Reads one gamma code from `bits[*at..]`, or `None` if it is incomplete.
fn read_gamma(bits: &[bool], at: &mut usize) -> Option<BigUint> {
    let zeros = bits[*at..].iter().take_while(|b| !**b).count();
    if *at + 2 * zeros + 1 > bits.len() {
        return None;
    }
    let mut n = BigUint::zero();
    for &b in &bits[*at + zeros..*at + 2 * zeros + 1] {
        n = (n << 1u32) + BigUint::from(b as u32);
    }
    *at += 2 * zeros + 1;
    Some(n)
}

fn decode(t: &BigUint) -> FiniteSetQ {
    if t.is_zero() {
        return FiniteSetQ::empty();
    }
    let bits: Vec<bool> = (0..t.bits() - 1).rev().map(|i| t.bit(i)).collect();
    let mut at = 0;
    let mut out = Vec::new();
    while let (Some(a), Some(b)) = (read_gamma(&bits, &mut at), read_gamma(&bits, &mut at)) {
        out.push(Rational::new(BigInt::from(a), BigInt::from(b)).expect("gamma codes are positive"));
    }
    FiniteSetQ::new(out).expect("positive")
}

fn encode(set: &FiniteSetQ) -> BigUint {
    let mut bits = vec![true];
    for r in set.iter() {
        push_gamma(&mut bits, r.numer().magnitude());
        push_gamma(&mut bits, r.denom().magnitude());
    }
    bits.iter()
        .fold(BigUint::zero(), |acc, &b| (acc << 1u32) + BigUint::from(b as u32))
}

fn symmetric_difference(a: &FiniteSetQ, b: &FiniteSetQ) -> FiniteSetQ {
    FiniteSetQ::new(
        a.iter()
            .filter(|r| !b.contains(r))
            .chain(b.iter().filter(|r| !a.contains(r)))
            .cloned(),
    )
    .expect("positive")
}

/// `ρ(x)` for negative `x`.
pub fn rho(x: &Rational) -> Result<FiniteSetQ, CodingError> {
    if !x.is_negative() {
        return Err(CodingError::NotNegative(x.clone()));
    }
    let mut rest = x.denom_magnitude().clone();
    let v = strip(&mut rest, 2);
    strip(&mut rest, 3);
    let low = set_of_index(&BigUint::from(v));
    Ok(symmetric_difference(&low, &decode(&(rest / 6u32))))
}

/// The Calkin–Wilf set index of `ρ(x)`, when its elements are shallower
/// than [`DEFAULT_INDEX_BITS`].
pub fn code(x: &Rational) -> Result<BigUint, CodingError> {
    index_of_set(&rho(x)?, DEFAULT_INDEX_BITS)
}

/// `A(x, y)`.
pub fn eval_a(x: &Rational, y: &Rational) -> bool {
    x.is_negative() && y.is_positive() && fiber(x).contains(y)
}

/// `A_x`: `ρ(x)` for negative `x`, empty otherwise.
pub fn fiber(x: &Rational) -> FiniteSetQ {
    rho(x).unwrap_or_else(|_| FiniteSetQ::empty())
}

/// Whether two negative rationals code the same set.
pub fn same_fiber(x: &Rational, y: &Rational) -> Result<bool, CodingError> {
    Ok(rho(x)? == rho(y)?)
}

/// The power of two and the factor prime to 6 of a denominator coding `set`.
fn realization(set: &FiniteSetQ) -> (u64, BigUint) {
    match index_of_set(set, LOW_BITS) {
        Ok(n) if n.bits() <= LOW_BITS => (n.to_u64().expect("small"), BigUint::one()),
        _ => (0, encode(set) * 6u32 + 1u32),
    }
}

/// A point of `(a, b) ⊆ ℚ_{<0}` with code `F_n`.
pub fn find_code_in_interval(n: &BigUint, a: &Rational, b: &Rational) -> Result<Rational, CodingError> {
    find_set_in_interval(&set_of_index(n), a, b)
}

/// A point of `(a, b) ⊆ ℚ_{<0}` whose code is `set`.
///
/// The denominator is `D = 2^v · 3^m · R` for the realization `(v, R)` of
/// `set`, with `m` least such that the window `(−b·D, −a·D)` is longer than
/// `6R + 1`. Such a window holds an integer `k` prime to `6R`; the least one
/// gives `x = −k/D`, whose denominator is exactly `D`. For small sets `R = 1`
/// and this is the search over `2ⁿ3ᵐ` with seven lattice points.
pub fn find_set_in_interval(set: &FiniteSetQ, a: &Rational, b: &Rational) -> Result<Rational, CodingError> {
    if a >= b || b.is_positive() {
        return Err(CodingError::BadInterval {
            a: a.clone(),
            b: b.clone(),
        });
    }
    let (v, r) = realization(set);
    let modulus = BigInt::from(&r * 6u32);
    let threshold = Rational::from_integer(&modulus + 1);
    let width = b - a;
    let mut d = (BigUint::one() << v) * &r;
    while &width * &Rational::from_integer(BigInt::from(d.clone())) <= threshold {
        d *= 3u32;
    }
    let dr = Rational::from_integer(BigInt::from(d.clone()));
    // least integer strictly above −b·D
    let mut k: BigInt = (-(b * &dr)).floor().numer().clone() + 1;
    while !k.gcd(&modulus).is_one() {
        k += 1;
    }
    let x = Rational::new(-k, BigInt::from(d)).expect("nonzero denominator");
    debug_assert!(a < &x && &x < b);
    Ok(x)
}

/// A negative rational whose fiber has exactly `N + 1` elements, namely the
/// first `N + 1` enumerated rationals. For `N ≤ 11` this is
/// `−1/2^{2^{N+1}−1}`; beyond that the denominator is the gamma-coded one.
pub fn unbounded_fiber_witness(n: u32) -> Rational {
    let set = set_of_index(&((BigUint::one() << (n + 1)) - 1u32));
    let (v, r) = realization(&set);
    Rational::new(-1, BigInt::from((BigUint::one() << v) * r)).expect("nonzero denominator")
}

/// A point of `cell ∩ box` whose coordinates carry the given codes.
///
/// `bounds[i]` is the open interval for variable `i`. Classes are placed in
/// chain order; each goes into `(L, R)` where `L` is the last placed value
/// (or lower box bounds) and `R` the least upper bound any later class or
/// parameter imposes, so every later class stays placeable.
pub fn realize_labels(
    cell: &OrderCell,
    bounds: &[(Rational, Rational)],
    labels: &[FiniteSetQ],
) -> Result<Vec<Rational>, CodingError> {
    let r = cell.vars().len();
    assert!(
        bounds.len() == r && labels.len() == r,
        "one interval and one label per variable"
    );
    let params = cell.params();
    let blocks = cell.blocks();
    let mut out: Vec<Option<Rational>> = vec![None; r];
    let mut lo: Option<Rational> = None;
    for (i, b) in blocks.iter().enumerate() {
        if let Some(&first) = b.vars.first() {
            if let Some(v) = b.vars.iter().find(|&&v| labels[v] != labels[first]) {
                return Err(CodingError::IncompatibleLabels(format!(
                    "{} = {} but {} ≠ {}",
                    cell.vars()[first],
                    cell.vars()[*v],
                    labels[first],
                    labels[*v]
                )));
            }
        }
        if let Some(p) = b.param {
            let c = &params[p];
            for &v in &b.vars {
                if labels[v] != fiber(c) {
                    return Err(CodingError::IncompatibleLabels(format!(
                        "{} = {c} forces {}",
                        cell.vars()[v],
                        fiber(c)
                    )));
                }
                if !(bounds[v].0 < *c && *c < bounds[v].1) {
                    return Err(CodingError::EmptyBoxCell);
                }
                out[v] = Some(c.clone());
            }
            lo = Some(c.clone());
            continue;
        }
        let left = b
            .vars
            .iter()
            .map(|&v| bounds[v].0.clone())
            .chain(lo.clone())
            .max()
            .expect("nonempty block");
        let mut right = Rational::zero();
        for later in &blocks[i..] {
            if let Some(p) = later.param {
                right = right.min(params[p].clone());
                break;
            }
            for &v in &later.vars {
                right = right.min(bounds[v].1.clone());
            }
        }
        if left >= right {
            return Err(CodingError::EmptyBoxCell);
        }
        let x = find_set_in_interval(&labels[b.vars[0]], &left, &right)?;
        for &v in &b.vars {
            out[v] = Some(x.clone());
        }
        lo = Some(x);
    }
    Ok(out
        .into_iter()
        .map(|x| x.expect("every variable sits in a block"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;
    use std::collections::{BTreeSet, VecDeque};

    fn set(xs: &[&str]) -> FiniteSetQ {
        FiniteSetQ::new(xs.iter().map(|s| q(s))).unwrap()
    }

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Breadth-first traversal of the Stern–Brocot tree; row k of that tree is
    /// a bit-reversal permutation of row k of the Calkin–Wilf tree, so both
    /// enumerate each row's value set identically, and the left-to-right
    /// order of Calkin–Wilf rows is recovered from the Stern–Brocot path.
    fn stern_brocot_rows(rows: usize) -> Vec<Vec<(Rational, Vec<bool>)>> {
        // left and right neighbours (a/b, c/d) with the path to the mediant
        type Node = ((i64, i64, i64, i64), Vec<bool>);
        let mut out = Vec::new();
        let mut queue: VecDeque<Node> = VecDeque::from([((0, 1, 1, 0), Vec::new())]);
        for _ in 0..rows {
            let mut row = Vec::new();
            for _ in 0..queue.len() {
                let ((a, b, c, d), path) = queue.pop_front().unwrap();
                let (m, n) = (a + c, b + d);
                row.push((Rational::new(m, n).unwrap(), path.clone()));
                let mut l = path.clone();
                l.push(false);
                let mut r = path;
                r.push(true);
                queue.push_back(((a, b, m, n), l));
                queue.push_back(((m, n, c, d), r));
            }
            out.push(row);
        }
        out
    }

    #[test]
    fn enumeration_matches_stern_brocot_oracle() {
        let rows = stern_brocot_rows(12);
        for (k, row) in rows.iter().enumerate() {
            let sb: BTreeSet<Rational> = row.iter().map(|(r, _)| r.clone()).collect();
            let start = (1u64 << k) - 1;
            let cw: Vec<Rational> = (start..start + (1 << k))
                .map(|i| enum_positive_rational(&u(i)))
                .collect();
            assert_eq!(cw.iter().cloned().collect::<BTreeSet<_>>(), sb, "row {k}");
            // A Stern–Brocot path read backwards is the Calkin–Wilf path.
            for (r, path) in row {
                let pos = path.iter().rev().fold(0u64, |acc, &bit| acc * 2 + bit as u64);
                assert_eq!(&cw[pos as usize], r);
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enum_positive_rational(&u(0)), q("1"));
        assert_eq!(enum_positive_rational(&u(1)), q("1/2"));
        assert_eq!(enum_positive_rational(&u(2)), q("2"));
        assert_eq!(enum_positive_rational(&u(3)), q("1/3"));
    }

    #[test]
    fn recurrence_agrees() {
        let mut cur = q("1");
        for i in 0..2000u64 {
            assert_eq!(enum_positive_rational(&u(i)), cur);
            let two_floor = &cur.floor() * &q("2");
            cur = (&(&two_floor - &cur) + &q("1")).recip();
        }
    }

    #[test]
    fn index_of_inverts_enumeration() {
        let mut seen = BTreeSet::new();
        for i in 0..10_000u64 {
            let r = enum_positive_rational(&u(i));
            assert!(seen.insert(r.clone()), "duplicate at {i}");
            assert_eq!(index_of(&r, DEFAULT_INDEX_BITS).unwrap(), u(i));
        }
        assert!(index_of(&q("1000000"), 64).is_err());
        assert_eq!(index_of(&q("17"), DEFAULT_INDEX_BITS).unwrap(), (u(1) << 17) - 2u32);
    }

    #[test]
    fn set_index_examples() {
        assert_eq!(set_of_index(&u(0)), FiniteSetQ::empty());
        assert_eq!(set_of_index(&u(1)), set(&["1"]));
        assert_eq!(set_of_index(&u(5)), set(&["1", "2"]));
        assert_eq!(index_of_set(&FiniteSetQ::empty(), 64).unwrap(), u(0));
        assert_eq!(index_of_set(&set(&["1"]), 64).unwrap(), u(1));
        assert_eq!(index_of_set(&set(&["1", "2"]), 64).unwrap(), u(5));
    }

    #[test]
    fn set_index_bijection() {
        for n in 0..(1u64 << 14) {
            assert_eq!(index_of_set(&set_of_index(&u(n)), 64).unwrap(), u(n));
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&q("-1/2")).unwrap(), set(&["1"]));
        assert_eq!(rho(&q("-3")).unwrap(), FiniteSetQ::empty());
        assert_eq!(rho(&q("-5/12")).unwrap(), set(&["1/2"]));
        assert!(rho(&q("0")).is_err());
        assert!(rho(&q("2")).is_err());
    }

    #[test]
    fn gamma_factor_contributes() {
        // 5 = 6·0 + 5 decodes to nothing; 13 = 6·2 + 1 reads "0" as an
        // incomplete code; 6·0b1_1_1 + 1 = 43 reads the pair (1, 1)
        assert_eq!(rho(&q("-1/5")).unwrap(), FiniteSetQ::empty());
        assert_eq!(rho(&q("-1/13")).unwrap(), FiniteSetQ::empty());
        assert_eq!(rho(&q("-1/43")).unwrap(), set(&["1"]));
        // the two terms cancel
        assert_eq!(rho(&q("-1/86")).unwrap(), FiniteSetQ::empty());
        assert_eq!(rho(&q("-1/172")).unwrap(), set(&["1", "1/2"]));
        for s in [set(&["1"]), set(&["17", "3/1024"]), set(&["5/7", "1/1000", "999/2"])] {
            assert_eq!(decode(&encode(&s)), s);
        }
    }

    #[test]
    fn relation_and_fibers() {
        assert!(eval_a(&q("-1/2"), &q("1")));
        assert!(!eval_a(&q("-1/2"), &q("2")));
        assert!(!eval_a(&q("1"), &q("1")));
        assert_eq!(fiber(&q("-1/2")), set(&["1"]));
        assert_eq!(fiber(&q("7")), FiniteSetQ::empty());
        assert_eq!(fiber(&q("-1/8")), set(&["1", "1/2"]));
        assert!(same_fiber(&q("-1/2"), &q("-3/2")).unwrap());
        assert!(!same_fiber(&q("-1/2"), &q("-1/4")).unwrap());
        assert!(same_fiber(&q("-3"), &q("-5")).unwrap());
        assert!(same_fiber(&q("1"), &q("-5")).is_err());
    }

    #[test]
    fn find_code_examples() {
        let x = find_code_in_interval(&u(0), &q("-1"), &q("-1/2")).unwrap();
        assert!(q("-1") < x && x < q("-1/2"));
        assert_eq!(rho(&x).unwrap(), FiniteSetQ::empty());
        let x = find_code_in_interval(&u(1), &q("-10"), &q("-9")).unwrap();
        assert!(q("-10") < x && x < q("-9"));
        assert_eq!(x.v2_denominator(), 1);
        let x = find_code_in_interval(&u(4), &q("-1/100"), &q("-99/10000")).unwrap();
        assert_eq!(x.v2_denominator(), 4);
        assert_eq!(code(&x).unwrap(), u(4));
        assert!(find_code_in_interval(&u(0), &q("-1"), &q("1")).is_err());
        assert!(find_code_in_interval(&u(0), &q("-1"), &q("-2")).is_err());
    }

    #[test]
    fn deep_sets_have_small_codes() {
        let n = (u(1) << 40) + u(3);
        let x = find_code_in_interval(&n, &q("-2"), &q("-1")).unwrap();
        assert_eq!(code(&x).unwrap(), n);
        assert_eq!(rho(&x).unwrap().len(), 3);
        // 17 sits at index 2^17 − 2, far beyond any power-of-two code
        let s = set(&["17", "1/1000"]);
        let x = find_set_in_interval(&s, &q("-1/1000"), &q("-999/1000000")).unwrap();
        assert!(q("-1/1000") < x && x < q("-999/1000000"));
        assert_eq!(rho(&x).unwrap(), s);
        assert!(x.denom_magnitude().bits() < 200);
    }

    #[test]
    fn witnesses() {
        assert_eq!(unbounded_fiber_witness(0), q("-1/2"));
        assert_eq!(unbounded_fiber_witness(1), q("-1/8"));
        assert_eq!(unbounded_fiber_witness(3), q("-1/32768"));
        assert_eq!(fiber(&unbounded_fiber_witness(3)), set(&["1", "1/2", "2", "1/3"]));
        for n in 0..=64 {
            let w = unbounded_fiber_witness(n);
            assert_eq!(fiber(&w).len(), n as usize + 1);
        }
    }

    proptest! {
        #[test]
        fn smooth_denominators_code_by_valuation(num in 1i64..10_000, a in 0u32..20, b in 0u32..8) {
            let x = Rational::new(-num, 2i64.pow(a) * 3i64.pow(b)).unwrap();
            prop_assert_eq!(rho(&x).unwrap(), set_of_index(&u(x.v2_denominator())));
        }

        #[test]
        fn found_points_have_the_code(n in 0u64..(1 << 20), lo in -1_000_000i64..0, num in 1i64..1_000_000, den in 1i64..1_000_000) {
            let a = Rational::from_integer(lo);
            let w = Rational::new(num, den).unwrap();
            let b = (&a + &w).min(Rational::zero());
            prop_assume!(a < b);
            let x = find_code_in_interval(&u(n), &a, &b).unwrap();
            prop_assert!(a < x && x < b);
            prop_assert_eq!(code(&x).unwrap(), u(n));
        }

        #[test]
        fn fibers_are_finite_and_coded(num in -10_000i64..10_000, den in 1i64..10_000) {

            let x = Rational::new(num, den).unwrap();
            let f = fiber(&x);
            if x.is_negative() {
                prop_assert_eq!(f, rho(&x).unwrap());
            } else {
                prop_assert!(f.is_empty());
            }
        }
    }

    fn negative_cell(vars: &[&str], point: &[&str], params: &[&str]) -> OrderCell {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let point: Vec<Rational> = point.iter().map(|s| q(s)).collect();
        let params: Vec<Rational> = params.iter().map(|s| q(s)).collect();
        crate::dlo::cell_of_point(&vars, &point, &params).with_domain(crate::dlo::Domain::Negative)
    }

    #[test]
    fn realize_labels_examples() {
        let unit = (q("-2"), q("-1"));
        let cell = negative_cell(&["x1", "x2"], &["-3/2", "-5/4"], &[]);
        let a = realize_labels(&cell, &[unit.clone(), unit.clone()], &[set(&[]), set(&["1"])]).unwrap();
        assert!(a[0] < a[1] && cell.contains(&a));
        assert_eq!((rho(&a[0]).unwrap(), rho(&a[1]).unwrap()), (set(&[]), set(&["1"])));

        let cell = negative_cell(&["x1", "x2"], &["-3/2", "-3/2"], &[]);
        let a = realize_labels(&cell, &[unit.clone(), unit.clone()], &[set(&["1"]), set(&["1"])]).unwrap();
        assert_eq!(a[0], a[1]);
        assert_eq!(rho(&a[0]).unwrap(), set(&["1"]));
        assert!(matches!(
            realize_labels(&cell, &[unit.clone(), unit.clone()], &[set(&["1"]), set(&[])]),
            Err(CodingError::IncompatibleLabels(_))
        ));

        // a parameter pins both the point and its label
        let cell = negative_cell(&["x"], &["-1/2"], &["-1/2"]);
        let wide = (q("-1"), q("-1/4"));
        assert_eq!(
            realize_labels(&cell, std::slice::from_ref(&wide), &[set(&["1"])]).unwrap(),
            vec![q("-1/2")]
        );
        assert!(realize_labels(&cell, &[wide], &[set(&[])]).is_err());
        // the box misses the cell
        let cell = negative_cell(&["x1", "x2"], &["-3/2", "-5/4"], &[]);
        assert_eq!(
            realize_labels(&cell, &[(q("-1"), q("-1/2")), unit], &[set(&[]), set(&[])]),
            Err(CodingError::EmptyBoxCell)
        );
    }

    proptest! {
        #[test]
        fn realized_points_lie_in_box_and_cell(
            pts in proptest::collection::vec(-40i64..0, 3),
            width in 1i64..8,
            codes in proptest::collection::vec(0u32..64, 3),
        ) {
            // boxes around a point of the cell always meet it
            let names = ["x1", "x2", "x3"];
            let point: Vec<Rational> = pts.iter().map(|&p| Rational::from(p) / Rational::from(8)).collect();
            let vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
            let params = vec![q("-3"), q("-1")];
            let cell = crate::dlo::cell_of_point(&vars, &point, &params).with_domain(crate::dlo::Domain::Negative);
            let w = Rational::new(width, 64).unwrap();
            let bounds: Vec<(Rational, Rational)> = point.iter().map(|p| (p - &w, (p + &w).min(Rational::zero()))).collect();
            // equal coordinates need equal labels, parameters their own
            let labels: Vec<FiniteSetQ> = (0..3).map(|i| {
                match params.iter().find(|c| **c == point[i]) {
                    Some(c) => fiber(c),
                    None => {
                        let first = (0..3).find(|&j| point[j] == point[i]).unwrap();
                        set_of_index(&BigUint::from(codes[first]))
                    }
                }
            }).collect();
            let a = realize_labels(&cell, &bounds, &labels).unwrap();
            prop_assert!(cell.contains(&a));
            for i in 0..3 {
                prop_assert!(bounds[i].0 < a[i] && a[i] < bounds[i].1);
                prop_assert_eq!(rho(&a[i]).unwrap(), labels[i].clone());
            }
        }
    }
}
