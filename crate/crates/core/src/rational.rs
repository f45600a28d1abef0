//! Exact rationals: the universe of the ordered structure.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("empty interval: {lo} is not below {hi}")]
    EmptyInterval { lo: Rational, hi: Rational },
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
}

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, RationalError> {
        let den = den.into();
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn compare(&self, other: &Rational) -> Ordering {
        self.cmp(other)
    }

    /// The midpoint of `lo` and `hi`, which must satisfy `lo < hi`.
    pub fn between(lo: &Rational, hi: &Rational) -> Result<Rational, RationalError> {
        if lo >= hi {
            return Err(RationalError::EmptyInterval {
                lo: lo.clone(),
                hi: hi.clone(),
            });
        }
        Ok(lo.midpoint(hi))
    }

    pub fn midpoint(&self, other: &Rational) -> Rational {
        Rational((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    /// Exponent of 2 in the denominator.
    pub fn v2_denominator(&self) -> u64 {
        self.denom().magnitude().trailing_zeros().unwrap_or(0)
    }

    pub fn denom_magnitude(&self) -> &BigUint {
        self.denom().magnitude()
    }

    pub fn sign(&self) -> Sign {
        self.numer().sign()
    }

    pub fn floor(&self) -> Rational {
        Rational(self.0.floor())
    }

    pub fn recip(&self) -> Rational {
        Rational(self.0.recip())
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RationalError::Malformed(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let digits = |t: &str, signed: bool| {
            let body = if signed {
                t.strip_prefix(['-', '+']).unwrap_or(t)
            } else {
                t
            };
            !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
        };
        if !digits(num, true) || !digits(den, false) {
            return Err(bad());
        }
        let num: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Rational::new(num, den)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literals in tests and examples: `q("-1/2")`.
///
/// Panics on malformed input.
pub fn q(s: &str) -> Rational {
    s.parse().unwrap_or_else(|e| panic!("bad rational literal {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn make_rational_canonical_forms() {
        assert_eq!(Rational::new(2, 4).unwrap(), q("1/2"));
        assert_eq!(Rational::new(3, -6).unwrap().to_string(), "-1/2");
        let z = Rational::new(0, 7).unwrap();
        assert_eq!((z.numer().clone(), z.denom().clone()), (BigInt::zero(), BigInt::one()));
        assert_eq!(Rational::new(1, 0), Err(RationalError::ZeroDenominator));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(q("1/2").compare(&q("2/3")), Ordering::Less);
        assert_eq!(q("-1/2").compare(&q("-1/2")), Ordering::Equal);
        assert_eq!(q("0").compare(&q("-1/3")), Ordering::Greater);
    }

    #[test]
    fn between_is_midpoint() {
        assert_eq!(Rational::between(&q("0"), &q("1")).unwrap(), q("1/2"));
        assert_eq!(Rational::between(&q("-1"), &q("-1/2")).unwrap(), q("-3/4"));
        assert_eq!(Rational::between(&q("1/3"), &q("2/3")).unwrap(), q("1/2"));
        assert!(Rational::between(&q("1"), &q("1")).is_err());
        assert!(Rational::between(&q("2"), &q("1")).is_err());
    }

    #[test]
    fn v2_examples() {
        assert_eq!(q("-1/2").v2_denominator(), 1);
        assert_eq!(q("-3").v2_denominator(), 0);
        assert_eq!(q("-5/12").v2_denominator(), 2);
    }

    #[test]
    fn text_form() {
        assert_eq!(q("7"), Rational::new(7, 1).unwrap());
        assert_eq!(q("+3/9").to_string(), "1/3");
        for bad in ["", "1/", "/2", "a", "1/-2", "1.5", "--1"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad}");
        }
        assert!("3/0".parse::<Rational>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn scaling_invariance(n in -1000i64..1000, d in 1i64..1000, k in 1i64..50, neg in any::<bool>()) {
            let k = if neg { -k } else { k };
            prop_assert_eq!(Rational::new(n, d).unwrap(), Rational::new(n * k, d * k).unwrap());
        }

        #[test]
        fn between_strictly_inside(a in -10_000i64..10_000, b in -10_000i64..10_000, da in 1i64..100, db in 1i64..100) {
            let x = Rational::new(a, da).unwrap();
            let y = Rational::new(b, db).unwrap();
            prop_assume!(x != y);
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            let m = Rational::between(&lo, &hi).unwrap();
            prop_assert!(lo < m && m < hi);
        }

        #[test]
        fn order_is_antisymmetric_and_transitive(v in proptest::collection::vec((-50i64..50, 1i64..20), 3)) {
            let [a, b, c]: [Rational; 3] = v.iter().map(|&(n, d)| Rational::new(n, d).unwrap())
                .collect::<Vec<_>>().try_into().unwrap();
            prop_assert_eq!(a.compare(&b), b.compare(&a).reverse());
            if a <= b && b <= c { prop_assert!(a <= c); }
            // cross-multiplication agrees with the derived order
            let cross = (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()));
            prop_assert_eq!(a.compare(&b), cross);
        }
    }
}
