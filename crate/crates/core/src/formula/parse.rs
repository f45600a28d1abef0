//! Parenthesized prefix grammar.
//!
//! ```text
//! formula := true | false
//!          | (< t t) | (= t t) | (A t t) | (in t S) | (= S S)
//!          | (not f) | (and f…) | (or f…) | (imp f f)
//!          | (exists v f) | (forall v f)
//!          | (exists-neg v f) | (exists-pos v f) | (forall-neg v f) | (forall-pos v f)
//!          | (exists-set S f) | (forall-set S f)
//! t       := identifier | rational literal p/q
//! S       := identifier | (set r…)
//! ```

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Atom, Binder, Formula, Guard, Language, Quantifier, SetTerm, Sort, Term};
use crate::rational::Rational;
use crate::wmso::FiniteSetQ;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("sort error in `{atom}`: {message}")]
    Sort { atom: String, message: String },
    #[error("language error: {0}")]
    Language(String),
}

#[derive(Debug, Clone)]
enum Sexp {
    Symbol(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Symbol(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn text(&self) -> String {
        match self {
            Sexp::Symbol(s, _) => s.clone(),
            Sexp::List(items, _) => {
                let inner: Vec<String> = items.iter().map(Sexp::text).collect();
                format!("({})", inner.join(" "))
            }
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            Sexp::List(items, _) => match items.first() {
                Some(Sexp::Symbol(s, _)) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

fn read_sexp(text: &str) -> Result<Sexp, ParseError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut done: Option<Sexp> = None;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if done.is_some() {
            return Err(syntax(i, "trailing input after formula"));
        }
        match c {
            b'(' => {
                stack.push((Vec::new(), i));
                i += 1;
            }
            b')' => {
                let (items, start) = stack.pop().ok_or_else(|| syntax(i, "unbalanced `)`"))?;
                let node = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => done = Some(node),
                }
                i += 1;
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                    i += 1;
                }
                let node = Sexp::Symbol(text[start..i].to_string(), start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => done = Some(node),
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(syntax(*start, "unbalanced `(`"));
    }
    done.ok_or_else(|| syntax(0, "empty input"))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn is_number(s: &str) -> bool {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    body.starts_with(|c: char| c.is_ascii_digit())
}

fn quantifier_keyword(s: &str) -> Option<(Quantifier, Binder)> {
    Some(match s {
        "exists" => (Quantifier::Exists, Binder::Element(Guard::Any)),
        "exists-neg" => (Quantifier::Exists, Binder::Element(Guard::Neg)),
        "exists-pos" => (Quantifier::Exists, Binder::Element(Guard::Pos)),
        "exists-set" => (Quantifier::Exists, Binder::Set),
        "forall" => (Quantifier::Forall, Binder::Element(Guard::Any)),
        "forall-neg" => (Quantifier::Forall, Binder::Element(Guard::Neg)),
        "forall-pos" => (Quantifier::Forall, Binder::Element(Guard::Pos)),
        "forall-set" => (Quantifier::Forall, Binder::Set),
        _ => return None,
    })
}

struct Reader {
    lang: Language,
    free_sorts: BTreeMap<String, Sort>,
    scope: Vec<(String, Sort)>,
}

impl Reader {
    fn sort_of(&self, name: &str) -> Option<Sort> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
            .or_else(|| self.free_sorts.get(name).copied())
    }

    /// First pass: fixes the sort of every free identifier from its positions.
    fn infer_free(&mut self, e: &Sexp, bound: &mut Vec<(String, Sort)>) -> Result<(), ParseError> {
        let Sexp::List(items, _) = e else {
            return Ok(());
        };
        let head = e.head().unwrap_or("");
        if let Some((_, binder)) = quantifier_keyword(head) {
            if items.len() != 3 {
                return Ok(());
            }
            if let Sexp::Symbol(v, _) = &items[1] {
                bound.push((v.clone(), binder.sort()));
                self.infer_free(&items[2], bound)?;
                bound.pop();
            }
            return Ok(());
        }
        let note = |s: &Sexp, sort: Sort, this: &mut Self| -> Result<(), ParseError> {
            if let Sexp::Symbol(name, _) = s {
                if is_identifier(name) && !bound.iter().any(|(b, _)| b == name) {
                    if let Some(prev) = this.free_sorts.insert(name.clone(), sort) {
                        if prev != sort {
                            return Err(ParseError::Sort {
                                atom: e.text(),
                                message: format!("`{name}` is used both as an element and as a set"),
                            });
                        }
                    }
                }
            }
            Ok(())
        };
        match head {
            "<" | "A" if items.len() == 3 => {
                note(&items[1], Sort::Element, self)?;
                note(&items[2], Sort::Element, self)?;
            }
            "in" if items.len() == 3 => {
                note(&items[1], Sort::Element, self)?;
                note(&items[2], Sort::Set, self)?;
            }
            "not" | "and" | "or" | "imp" => {
                for it in &items[1..] {
                    self.infer_free(it, bound)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn element_term(&self, s: &Sexp, atom: &Sexp) -> Result<Term, ParseError> {
        match s {
            Sexp::Symbol(tok, pos) if is_number(tok) => {
                let r: Rational = tok.parse().map_err(|e| syntax(*pos, format!("{e}")))?;
                Ok(Term::Const(r))
            }
            Sexp::Symbol(tok, pos) if is_identifier(tok) => match self.sort_of(tok) {
                Some(Sort::Set) => Err(ParseError::Sort {
                    atom: atom.text(),
                    message: format!("set variable `{tok}` used where an element is required"),
                }),
                _ => Ok(Term::Var(tok.clone())),
            }
            .map_err(|e| if tok.is_empty() { syntax(*pos, "empty token") } else { e }),
            Sexp::Symbol(tok, pos) => Err(syntax(*pos, format!("unexpected token `{tok}`"))),
            Sexp::List(..) if s.head() == Some("set") => Err(ParseError::Sort {
                atom: atom.text(),
                message: "set literal used where an element is required".into(),
            }),
            Sexp::List(_, pos) => Err(syntax(*pos, "expected a term")),
        }
    }

    fn set_term(&self, s: &Sexp, atom: &Sexp) -> Result<SetTerm, ParseError> {
        match s {
            Sexp::List(items, pos) if s.head() == Some("set") => {
                let mut elems = Vec::new();
                for it in &items[1..] {
                    match it {
                        Sexp::Symbol(tok, p) if is_number(tok) => {
                            elems.push(tok.parse::<Rational>().map_err(|e| syntax(*p, format!("{e}")))?)
                        }
                        other => return Err(syntax(other.pos(), "set literals contain rational literals only")),
                    }
                }
                FiniteSetQ::new(elems)
                    .map(SetTerm::Lit)
                    .map_err(|e| syntax(*pos, e.to_string()))
            }
            Sexp::Symbol(tok, _) if is_identifier(tok) => match self.sort_of(tok) {
                Some(Sort::Element) => Err(ParseError::Sort {
                    atom: atom.text(),
                    message: format!("element `{tok}` used where a set is required"),
                }),
                _ => Ok(SetTerm::Var(tok.clone())),
            },
            Sexp::Symbol(tok, _) if is_number(tok) => Err(ParseError::Sort {
                atom: atom.text(),
                message: format!("element literal `{tok}` used where a set is required"),
            }),
            other => Err(syntax(other.pos(), "expected a set term")),
        }
    }

    fn is_set_like(&self, s: &Sexp) -> bool {
        match s {
            Sexp::List(..) => s.head() == Some("set"),
            Sexp::Symbol(tok, _) => is_identifier(tok) && self.sort_of(tok) == Some(Sort::Set),
        }
    }

    fn formula(&mut self, e: &Sexp) -> Result<Formula, ParseError> {
        let items = match e {
            Sexp::Symbol(s, _) if s == "true" => return Ok(Formula::True),
            Sexp::Symbol(s, _) if s == "false" => return Ok(Formula::False),
            Sexp::Symbol(s, p) => return Err(syntax(*p, format!("expected a formula, found `{s}`"))),
            Sexp::List(items, _) => items,
        };
        let pos = e.pos();
        let head = e.head().ok_or_else(|| syntax(pos, "expected an operator"))?;
        let arity = |n: usize| -> Result<(), ParseError> {
            if items.len() != n + 1 {
                Err(syntax(
                    pos,
                    format!("`{head}` expects {n} argument(s), got {}", items.len() - 1),
                ))
            } else {
                Ok(())
            }
        };
        match head {
            "<" => {
                arity(2)?;
                Ok(Formula::Atom(Atom::Lt(
                    self.element_term(&items[1], e)?,
                    self.element_term(&items[2], e)?,
                )))
            }
            "=" => {
                arity(2)?;
                if self.is_set_like(&items[1]) || self.is_set_like(&items[2]) {
                    if self.lang == Language::OrderA {
                        return Err(ParseError::Language(format!(
                            "set equality `{}` outside the order language",
                            e.text()
                        )));
                    }
                    Ok(Formula::Atom(Atom::SetEq(
                        self.set_term(&items[1], e)?,
                        self.set_term(&items[2], e)?,
                    )))
                } else {
                    Ok(Formula::Atom(Atom::Eq(
                        self.element_term(&items[1], e)?,
                        self.element_term(&items[2], e)?,
                    )))
                }
            }
            "A" => {
                arity(2)?;
                if self.lang == Language::Wmso {
                    return Err(ParseError::Language(format!(
                        "relation A in weak monadic formula `{}`",
                        e.text()
                    )));
                }
                Ok(Formula::Atom(Atom::A(
                    self.element_term(&items[1], e)?,
                    self.element_term(&items[2], e)?,
                )))
            }
            "in" => {
                arity(2)?;
                if self.lang == Language::OrderA {
                    return Err(ParseError::Language(format!(
                        "membership `{}` outside the order language",
                        e.text()
                    )));
                }
                Ok(Formula::Atom(Atom::In(
                    self.element_term(&items[1], e)?,
                    self.set_term(&items[2], e)?,
                )))
            }
            "not" => {
                arity(1)?;
                Ok(Formula::Not(Box::new(self.formula(&items[1])?)))
            }
            "and" | "or" => {
                let parts = items[1..]
                    .iter()
                    .map(|it| self.formula(it))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(if head == "and" {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                })
            }
            "imp" => {
                arity(2)?;
                Ok(Formula::imp(self.formula(&items[1])?, self.formula(&items[2])?))
            }
            _ => {
                let (q, binder) =
                    quantifier_keyword(head).ok_or_else(|| syntax(pos, format!("unknown operator `{head}`")))?;
                arity(2)?;
                let v = match &items[1] {
                    Sexp::Symbol(v, _) if is_identifier(v) => v.clone(),
                    other => return Err(syntax(other.pos(), "expected a variable after quantifier")),
                };
                match (self.lang, binder) {
                    (Language::OrderA, Binder::Set) => {
                        return Err(ParseError::Language(format!(
                            "set quantifier `{head}` outside the weak monadic language"
                        )))
                    }
                    (Language::Wmso, Binder::Element(Guard::Neg | Guard::Pos)) => {
                        return Err(ParseError::Language(format!(
                            "`{head}` is not a weak monadic quantifier"
                        )))
                    }
                    _ => {}
                }
                self.scope.push((v.clone(), binder.sort()));
                let body = self.formula(&items[2]);
                self.scope.pop();
                Ok(Formula::Quant(q, binder, v, Box::new(body?)))
            }
        }
    }
}

/// Parses `text` in the given language, checks sorts and renames bound
/// variables apart from each other and from the free variables.
pub fn parse_formula(text: &str, language: Language) -> Result<Formula, ParseError> {
    let sexp = read_sexp(text)?;
    let mut reader = Reader {
        lang: language,
        free_sorts: BTreeMap::new(),
        scope: Vec::new(),
    };
    if language == Language::Wmso {
        reader.infer_free(&sexp, &mut Vec::new())?;
    }
    let f = reader.formula(&sexp)?;
    f.check_language(language)
        .map_err(|e| ParseError::Language(e.message))?;
    Ok(f.rename_apart(&BTreeSet::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn parses_quantified_order_formula() {
        let f = parse_formula("(exists t (and (< t 0) (A t y)))", Language::OrderA).unwrap();
        let expected = Formula::exists(
            Binder::Element(Guard::Any),
            "t",
            Formula::And(vec![
                Formula::lt(Term::var("t"), Term::zero()),
                Formula::rel_a(Term::var("t"), Term::var("y")),
            ]),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_membership_in_literal() {
        let f = parse_formula("(in y (set 1/2 3))", Language::Wmso).unwrap();
        let lit = FiniteSetQ::new(vec![q("1/2"), q("3")]).unwrap();
        assert_eq!(f, Formula::member(Term::var("y"), SetTerm::Lit(lit)));
    }

    #[test]
    fn membership_sort_errors() {
        assert!(matches!(
            parse_formula("(in (set 1) y)", Language::Wmso),
            Err(ParseError::Sort { .. })
        ));
        assert!(matches!(
            parse_formula("(and (in y S) (< S y))", Language::Wmso),
            Err(ParseError::Sort { .. })
        ));
        assert!(matches!(
            parse_formula("(exists-set S (< S 1))", Language::Wmso),
            Err(ParseError::Sort { .. })
        ));
        assert!(matches!(
            parse_formula("(in x 3)", Language::Wmso),
            Err(ParseError::Sort { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_formula("(and (< x y)", Language::OrderA) {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 0),
            other => panic!("{other:?}"),
        }
        match parse_formula("(< x y))", Language::OrderA) {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 7),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("(frob x)", Language::OrderA).is_err());
        assert!(parse_formula("(< x)", Language::OrderA).is_err());
        assert!(parse_formula("", Language::OrderA).is_err());
        assert!(parse_formula("(in y (set -1))", Language::Wmso).is_err());
    }

    #[test]
    fn language_boundaries() {
        assert!(matches!(
            parse_formula("(A x y)", Language::Wmso),
            Err(ParseError::Language(_))
        ));
        assert!(matches!(
            parse_formula("(in x S)", Language::OrderA),
            Err(ParseError::Language(_))
        ));
        assert!(matches!(
            parse_formula("(exists-neg x (< x 1))", Language::Wmso),
            Err(ParseError::Language(_))
        ));
        assert!(matches!(
            parse_formula("(< x -1)", Language::Wmso),
            Err(ParseError::Language(_))
        ));
    }

    #[test]
    fn set_equality_is_recognized() {
        let f = parse_formula("(forall-set F (exists-set G (= F G)))", Language::Wmso).unwrap();
        assert!(matches!(f, Formula::Quant(_, Binder::Set, _, _)));
        let g = parse_formula("(= S (set 1))", Language::Wmso).unwrap();
        assert!(matches!(g, Formula::Atom(Atom::SetEq(..))));
    }

    #[test]
    fn shadowing_is_renamed_apart() {
        let f = parse_formula("(and (< x 1) (exists x (exists x (< x 2))))", Language::OrderA).unwrap();
        let mut names = Vec::new();
        f.visit_binders(&mut |_, _, v| names.push(v.to_string()));
        assert_eq!(names.len(), 2);
        assert!(!names.contains(&"x".to_string()));
        assert_ne!(names[0], names[1]);
        assert_eq!(parse_formula(&f.to_string(), Language::OrderA).unwrap(), f);
    }
}
