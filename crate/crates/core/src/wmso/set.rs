//! Finite sets of positive rationals and the set operations of the
//! weak monadic language: union, intersection, min, max and the successor
//! preimage `s⁻¹`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("finite sets hold positive rationals only; got {0}")]
pub struct NonPositiveElement(pub Rational);

/// A finite set of positive rationals, kept sorted.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteSetQ(BTreeSet<Rational>);

impl FiniteSetQ {
    pub fn empty() -> Self {
        FiniteSetQ(BTreeSet::new())
    }

    pub fn new(elems: impl IntoIterator<Item = Rational>) -> Result<Self, NonPositiveElement> {
        let mut set = BTreeSet::new();
        for e in elems {
            if !e.is_positive() {
                return Err(NonPositiveElement(e));
            }
            set.insert(e);
        }
        Ok(FiniteSetQ(set))
    }

    pub fn singleton(e: Rational) -> Result<Self, NonPositiveElement> {
        Self::new([e])
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Rational> + ExactSizeIterator {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.0.contains(r)
    }

    pub fn as_set(&self) -> &BTreeSet<Rational> {
        &self.0
    }

    pub fn union(&self, other: &FiniteSetQ) -> FiniteSetQ {
        FiniteSetQ(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &FiniteSetQ) -> FiniteSetQ {
        FiniteSetQ(self.0.intersection(&other.0).cloned().collect())
    }

    /// `{min A}`, with `∅ ↦ ∅`.
    pub fn min_set(&self) -> FiniteSetQ {
        FiniteSetQ(self.0.first().cloned().into_iter().collect())
    }

    /// `{max A}`, with `∅ ↦ ∅`.
    pub fn max_set(&self) -> FiniteSetQ {
        FiniteSetQ(self.0.last().cloned().into_iter().collect())
    }

    /// `s⁻¹(A, B) = {i ∈ A : s_A(i) ∈ B}` where `s_A` is the successor
    /// inside `A`; the maximum of `A` has no successor.
    pub fn s_preimage(&self, b: &FiniteSetQ) -> FiniteSetQ {
        let elems: Vec<&Rational> = self.0.iter().collect();
        FiniteSetQ(
            elems
                .windows(2)
                .filter(|w| b.contains(w[1]))
                .map(|w| w[0].clone())
                .collect(),
        )
    }
}

impl fmt::Display for FiniteSetQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FiniteSetQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as the sorted list of element strings.
impl Serialize for FiniteSetQ {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|r| r.to_string()))
    }
}

pub fn set_union(a: &FiniteSetQ, b: &FiniteSetQ) -> FiniteSetQ {
    a.union(b)
}

pub fn set_intersection(a: &FiniteSetQ, b: &FiniteSetQ) -> FiniteSetQ {
    a.intersection(b)
}

pub fn set_min(a: &FiniteSetQ) -> FiniteSetQ {
    a.min_set()
}

pub fn set_max(a: &FiniteSetQ) -> FiniteSetQ {
    a.max_set()
}

pub fn s_preimage(a: &FiniteSetQ, b: &FiniteSetQ) -> FiniteSetQ {
    a.s_preimage(b)
}
