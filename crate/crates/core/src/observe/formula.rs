use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::ObserveError;
use crate::syntax::Action;

/// Modal observations. `Cannot(a)` is the refusal of `a`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Cannot(Action),
    Prefix(Action, Box<Formula>),
    Conj(Vec<Formula>),
    Neg(Box<Formula>),
}

impl Formula {
    pub fn prefix(a: impl Into<Action>, f: Formula) -> Formula {
        Formula::Prefix(a.into(), Box::new(f))
    }

    pub fn cannot(a: impl Into<Action>) -> Formula {
        Formula::Cannot(a.into())
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    /// A trace formula `a1 a2 ... an tt`.
    pub fn trace<'a>(actions: impl IntoIterator<Item = &'a Action>, end: Formula) -> Formula {
        let actions: Vec<&Action> = actions.into_iter().collect();
        actions.into_iter().rev().fold(end, |f, a| Formula::prefix(a.clone(), f))
    }

    /// Conjunction of the given formulas, normalized.
    pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::Conj(items.into_iter().collect()).normalize()
    }

    /// Flattens conjunctions, drops `tt` units, and sorts and dedups conjuncts.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::Top | Formula::Cannot(_) => self.clone(),
            Formula::Prefix(a, f) => Formula::Prefix(a.clone(), Box::new(f.normalize())),
            Formula::Neg(f) => Formula::Neg(Box::new(f.normalize())),
            Formula::Conj(items) => {
                let mut flat = Vec::new();
                for f in items {
                    match f.normalize() {
                        Formula::Top => {}
                        Formula::Conj(inner) => flat.extend(inner),
                        g => flat.push(g),
                    }
                }
                flat.sort();
                flat.dedup();
                match flat.len() {
                    0 => Formula::Top,
                    1 => flat.pop().expect("one conjunct"),
                    _ => Formula::Conj(flat),
                }
            }
        }
    }

    /// Conjuncts of a normalized formula; `tt` has none.
    pub fn conjuncts(&self) -> &[Formula] {
        match self {
            Formula::Top => &[],
            Formula::Conj(items) => items,
            f => std::slice::from_ref(f),
        }
    }

    /// Nesting depth of action prefixes.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Cannot(_) => 0,
            Formula::Prefix(_, f) => 1 + f.depth(),
            Formula::Neg(f) => f.depth(),
            Formula::Conj(items) => items.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Cannot(_) => 1,
            Formula::Prefix(_, f) | Formula::Neg(f) => 1 + f.size(),
            Formula::Conj(items) => 1 + items.iter().map(Formula::size).sum::<usize>(),
        }
    }

    pub fn has_negation(&self) -> bool {
        match self {
            Formula::Top | Formula::Cannot(_) => false,
            Formula::Neg(_) => true,
            Formula::Prefix(_, f) => f.has_negation(),
            Formula::Conj(items) => items.iter().any(Formula::has_negation),
        }
    }

    fn fmt_unary(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Conj(items) if !items.is_empty() => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("tt"),
            Formula::Cannot(a) => write!(f, "no {a}"),
            Formula::Prefix(a, g) => {
                write!(f, "<{a}>")?;
                g.fmt_unary(f)
            }
            Formula::Neg(g) => {
                f.write_str("not ")?;
                g.fmt_unary(f)
            }
            Formula::Conj(items) if items.is_empty() => f.write_str("tt"),
            Formula::Conj(items) => {
                for (i, g) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    g.fmt_unary(f)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Lt,
    Gt,
    And,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<Tok>, ObserveError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '<' | '>' | '&' | '(' | ')' => {
                chars.next();
                out.push(match c {
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '&' => Tok::And,
                    '(' => Tok::Open,
                    _ => Tok::Close,
                });
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Word(src[i..end].to_string()));
            }
            _ => return Err(ObserveError::Parse(format!("unexpected `{c}` at offset {i}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ObserveError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(ObserveError::Parse(format!("expected {want:?}, found {other:?}"))),
        }
    }

    fn action(&mut self) -> Result<Action, ObserveError> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(Action::new(w)),
            other => Err(ObserveError::Parse(format!("expected an action, found {other:?}"))),
        }
    }

    fn conj(&mut self) -> Result<Formula, ObserveError> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one item") } else { Formula::Conj(items) })
    }

    fn unary(&mut self) -> Result<Formula, ObserveError> {
        match self.next() {
            Some(Tok::Word(w)) if w == "tt" => Ok(Formula::Top),
            Some(Tok::Word(w)) if w == "no" => Ok(Formula::Cannot(self.action()?)),
            Some(Tok::Word(w)) if w == "not" => Ok(Formula::neg(self.unary()?)),
            Some(Tok::Lt) => {
                let a = self.action()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::Prefix(a, Box::new(self.unary()?)))
            }
            Some(Tok::Open) => {
                let f = self.conj()?;
                self.expect(Tok::Close)?;
                Ok(f)
            }
            other => Err(ObserveError::Parse(format!("expected a formula, found {other:?}"))),
        }
    }
}

impl FromStr for Formula {
    type Err = ObserveError;

    /// Concrete syntax: `tt`, `<a> phi`, `no a`, `phi & phi`, `not phi`, parentheses.
    fn from_str(src: &str) -> Result<Formula, ObserveError> {
        let mut p = Parser { toks: lex(src)?, pos: 0 };
        let f = p.conj()?;
        match p.peek() {
            None => Ok(f),
            Some(t) => Err(ObserveError::Parse(format!("trailing input at {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn unit_and_flattening() {
        assert_eq!(f("tt & <a>tt").normalize(), f("<a>tt"));
        assert_eq!(Formula::Conj(vec![]).normalize(), Formula::Top);
        let g = f("(<b>tt & tt) & (no a)").normalize();
        assert_eq!(g, Formula::Conj(vec![Formula::cannot("a"), f("<b>tt")]));
        assert_eq!(g.to_string(), "no a & <b>tt");
    }

    #[test]
    fn parse_print_round_trip() {
        for s in ["tt", "<a><b><d>tt", "no a & <b>tt", "not (<a>tt & no b)", "<a>(no b & <c>tt)"] {
            let g = f(s);
            assert_eq!(g.to_string(), s);
            assert_eq!(f(&g.to_string()), g);
        }
        assert!("<a tt".parse::<Formula>().is_err());
        assert!("tt tt".parse::<Formula>().is_err());
    }

    #[test]
    fn prefix_binds_tighter_than_and() {
        assert_eq!(f("<a>tt & no b"), Formula::Conj(vec![f("<a>tt"), Formula::cannot("b")]));
        assert_eq!(f("<a>tt & no b").depth(), 1);
    }
}
