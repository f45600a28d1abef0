use crate::formula::{Formula, Term};
use crate::rational::Rational;
use crate::wmso::FiniteSetQ;

/// Membership bits of element terms (rows) against set variables (columns).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MembershipPattern {
    pub terms: Vec<Term>,
    pub sets: Vec<String>,
    pub bits: Vec<Vec<bool>>,
}

impl MembershipPattern {
    /// All `2^(rows·columns)` patterns.
    pub fn enumerate(terms: &[Term], sets: &[String]) -> Vec<MembershipPattern> {
        let cells = terms.len() * sets.len();
        assert!(cells < 24, "pattern table too large");
        (0..1u64 << cells)
            .map(|code| MembershipPattern {
                terms: terms.to_vec(),
                sets: sets.to_vec(),
                bits: (0..terms.len())
                    .map(|i| (0..sets.len()).map(|j| code >> (i * sets.len() + j) & 1 == 1).collect())
                    .collect(),
            })
            .collect()
    }

    pub fn bit(&self, term: &Term, set: &str) -> Option<bool> {
        let i = self.terms.iter().position(|t| t == term)?;
        let j = self.sets.iter().position(|s| s == set)?;
        Some(self.bits[i][j])
    }

    /// The condition under which the pattern is consistent: terms with
    /// different rows must denote different elements.
    pub fn guard(&self) -> Formula {
        let mut parts = Vec::new();
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                if self.bits[i] != self.bits[j] {
                    let (a, b) = (&self.terms[i], &self.terms[j]);
                    match (a, b) {
                        (Term::Const(x), Term::Const(y)) if x == y => return Formula::False,
                        (Term::Const(_), Term::Const(_)) => {}
                        _ if a == b => return Formula::False,
                        _ => parts.push(Formula::not(Formula::eq(a.clone(), b.clone()))),
                    }
                }
            }
        }
        Formula::and_all(parts)
    }

    /// Consistency at concrete values of the terms.
    pub fn is_consistent_at(&self, values: &[Rational]) -> bool {
        (0..self.terms.len())
            .all(|i| (0..self.terms.len()).all(|j| values[i] != values[j] || self.bits[i] == self.bits[j]))
    }

    /// Sets realizing the pattern at concrete positive values, if consistent.
    pub fn realize(&self, values: &[Rational]) -> Option<Vec<FiniteSetQ>> {
        if !self.is_consistent_at(values) {
            return None;
        }
        (0..self.sets.len())
            .map(|j| {
                FiniteSetQ::new(
                    (0..self.terms.len())
                        .filter(|&i| self.bits[i][j])
                        .map(|i| values[i].clone()),
                )
                .ok()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn realization_exactly_on_consistent_patterns() {
        let terms: Vec<Term> = ["a", "b", "c", "d"].iter().map(|s| Term::var(s)).collect();
        let sets = vec!["S".to_string()];
        let value_choices = [
            vec![q("1"), q("2"), q("3"), q("4")],
            vec![q("1"), q("1"), q("2"), q("3")],
            vec![q("1"), q("1"), q("1"), q("2")],
            vec![q("1/2"), q("1/2"), q("1/2"), q("1/2")],
        ];
        for values in &value_choices {
            for pat in MembershipPattern::enumerate(&terms, &sets) {
                match pat.realize(values) {
                    Some(real) => {
                        for (i, v) in values.iter().enumerate() {
                            assert_eq!(real[0].contains(v), pat.bits[i][0]);
                        }
                    }
                    None => assert!(!pat.is_consistent_at(values)),
                }
            }
        }
    }

    #[test]
    fn guards() {
        let terms = vec![Term::var("y"), Term::var("z")];
        let sets = vec!["S".to_string()];
        let pats = MembershipPattern::enumerate(&terms, &sets);
        assert_eq!(pats.len(), 4);
        let mixed = pats.iter().find(|p| p.bits[0][0] && !p.bits[1][0]).unwrap();
        assert_eq!(mixed.guard().to_string(), "(not (= y z))");
        let one = [Term::Const(q("1")), Term::Const(q("1"))];
        let pats = MembershipPattern::enumerate(&one, &sets);
        assert_eq!(pats.iter().filter(|p| p.guard() != Formula::False).count(), 2);
    }
}
