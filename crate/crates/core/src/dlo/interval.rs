use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::Finite(r) => write!(f, "{r}"),
            Endpoint::PosInf => f.write_str("+inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Part {
    Point(Rational),
    Interval(Endpoint, Endpoint),
}

impl Part {
    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            Part::Point(p) => p == x,
            Part::Interval(lo, hi) => {
                let fx = Endpoint::Finite(x.clone());
                lo < &fx && &fx < hi
            }
        }
    }
}

impl Serialize for Part {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Part", 2)?;
        match self {
            Part::Point(p) => {
                st.serialize_field("kind", "point")?;
                st.serialize_field("endpoints", &[p.to_string()])?;
            }
            Part::Interval(lo, hi) => {
                st.serialize_field("kind", "interval")?;
                st.serialize_field("endpoints", &[lo.to_string(), hi.to_string()])?;
            }
        }
        st.end()
    }
}

/// A finite union of points and open intervals in normal form: sorted,
/// disjoint, and with no interval–point–interval run that could be merged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct IntervalUnion {
    parts: Vec<Part>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        IntervalUnion {
            parts: vec![Part::Interval(Endpoint::NegInf, Endpoint::PosInf)],
        }
    }

    /// Builds the union from a predicate evaluated once on each piece of the
    /// partition of ℚ by `breakpoints`: `(−∞, c₀), {c₀}, (c₀, c₁), …`.
    pub fn from_pieces(breakpoints: &[Rational], mut member: impl FnMut(&Rational) -> bool) -> Self {
        let mut cuts = breakpoints.to_vec();
        cuts.sort();
        cuts.dedup();
        let mut pieces: Vec<(Part, bool)> = Vec::new();
        let gap_sample = |i: usize| -> Rational {
            match (i.checked_sub(1).map(|j| &cuts[j]), cuts.get(i)) {
                (Some(l), Some(h)) => l.midpoint(h),
                (Some(l), None) => l + &Rational::one(),
                (None, Some(h)) => h - &Rational::one(),
                (None, None) => Rational::zero(),
            }
        };
        for i in 0..=cuts.len() {
            let lo = i
                .checked_sub(1)
                .map_or(Endpoint::NegInf, |j| Endpoint::Finite(cuts[j].clone()));
            let hi = cuts.get(i).map_or(Endpoint::PosInf, |c| Endpoint::Finite(c.clone()));
            let s = gap_sample(i);
            pieces.push((Part::Interval(lo, hi), member(&s)));
            if let Some(c) = cuts.get(i) {
                pieces.push((Part::Point(c.clone()), member(c)));
            }
        }
        let mut parts = Vec::new();
        let mut k = 0;
        while k < pieces.len() {
            if !pieces[k].1 {
                k += 1;
                continue;
            }
            let mut end = k;
            while end + 1 < pieces.len() && pieces[end + 1].1 {
                end += 1;
            }
            // pieces[k..=end] is a maximal run of members
            let mut a = k;
            let mut b = end;
            if let Part::Point(p) = &pieces[a].0 {
                parts.push(Part::Point(p.clone()));
                a += 1;
            }
            let mut trailing = None;
            if a <= b {
                if let Part::Point(p) = &pieces[b].0 {
                    trailing = Some(p.clone());
                    b -= 1;
                }
            }
            if a <= b {
                let lo = match &pieces[a].0 {
                    Part::Interval(lo, _) => lo.clone(),
                    Part::Point(_) => unreachable!(),
                };
                let hi = match &pieces[b].0 {
                    Part::Interval(_, hi) => hi.clone(),
                    Part::Point(_) => unreachable!(),
                };
                parts.push(Part::Interval(lo, hi));
            }
            if let Some(p) = trailing {
                parts.push(Part::Point(p));
            }
            k = end + 1;
        }
        IntervalUnion { parts }
    }

    /// Normal form of an arbitrary list of points and open intervals.
    pub fn normalize(parts: Vec<Part>) -> Self {
        let mut cuts = Vec::new();
        for p in &parts {
            match p {
                Part::Point(r) => cuts.push(r.clone()),
                Part::Interval(lo, hi) => {
                    for e in [lo, hi] {
                        if let Endpoint::Finite(r) = e {
                            cuts.push(r.clone());
                        }
                    }
                }
            }
        }
        IntervalUnion::from_pieces(&cuts, |x| parts.iter().any(|p| p.contains(x)))
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of convex components. A point at the end of an adjacent
    /// interval belongs to the same component.
    pub fn components(&self) -> usize {
        let mut n = 0;
        let mut prev_hi: Option<&Endpoint> = None;
        let mut prev_point: Option<&Rational> = None;
        for p in &self.parts {
            let joins = match p {
                Part::Point(r) => prev_hi == Some(&Endpoint::Finite(r.clone())),
                Part::Interval(lo, _) => matches!(lo, Endpoint::Finite(r) if prev_point == Some(r)),
            };
            if !joins {
                n += 1;
            }
            match p {
                Part::Point(r) => {
                    prev_point = Some(r);
                    prev_hi = None;
                }
                Part::Interval(_, hi) => {
                    prev_hi = Some(hi);
                    prev_point = None;
                }
            }
        }
        n
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        let texts: Vec<String> = self
            .parts
            .iter()
            .map(|p| match p {
                Part::Point(r) => format!("{{{r}}}"),
                Part::Interval(lo, hi) => format!("({lo}, {hi})"),
            })
            .collect();
        f.write_str(&texts.join(" ∪ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn merging_runs() {
        let u = IntervalUnion::from_pieces(&[q("3"), q("5")], |x| x < &q("3") || x == &q("5"));
        assert_eq!(u.to_string(), "(-inf, 3) ∪ {5}");
        let u = IntervalUnion::from_pieces(&[q("1")], |x| x != &q("1"));
        assert_eq!(u.to_string(), "(-inf, 1) ∪ (1, +inf)");
        assert_eq!(u.components(), 2);
        let u = IntervalUnion::from_pieces(&[q("1")], |_| true);
        assert_eq!(u, IntervalUnion::full());
        let u = IntervalUnion::from_pieces(&[q("0"), q("1")], |x| x >= &q("0") && x <= &q("1"));
        assert_eq!(u.to_string(), "{0} ∪ (0, 1) ∪ {1}");
        assert_eq!(u.components(), 1);
    }

    #[test]
    fn normalize_merges_adjacent() {
        let parts = vec![
            Part::Interval(Endpoint::Finite(q("1")), Endpoint::Finite(q("2"))),
            Part::Point(q("2")),
            Part::Interval(Endpoint::Finite(q("2")), Endpoint::PosInf),
        ];
        assert_eq!(IntervalUnion::normalize(parts).to_string(), "(1, +inf)");
    }

    #[test]
    fn serialization() {
        let u = IntervalUnion::from_pieces(&[q("3"), q("5")], |x| x < &q("3") || x == &q("5"));
        assert_eq!(
            serde_json::to_string(&u).unwrap(),
            r#"[{"kind":"interval","endpoints":["-inf","3"]},{"kind":"point","endpoints":["5"]}]"#
        );
    }
}
