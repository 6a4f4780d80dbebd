use std::collections::BTreeMap;

use super::rule::{Literal, Rule};
use super::term::{Term, Var};

/// A finite map from variables to terms; unmapped variables stay put.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst(BTreeMap<Var, Term>);

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn insert(&mut self, v: Var, t: Term) -> Option<Term> {
        self.0.insert(v, t)
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        l.map_terms(|t| self.apply(t))
    }

    pub fn apply_rule(&self, r: &Rule) -> Rule {
        r.map_terms(|t| self.apply(t))
    }

    /// Extends `self` so that `pattern` instantiates to `term`, if possible.
    pub fn match_term(&mut self, pattern: &Term, term: &Term) -> bool {
        match (pattern, term) {
            (Term::Var(v), _) => match self.0.get(v) {
                Some(bound) => bound == term,
                None => {
                    self.0.insert(v.clone(), term.clone());
                    true
                }
            },
            (Term::App(f, ps), Term::App(g, ts)) => {
                f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| self.match_term(p, t))
            }
            (Term::App(..), Term::Var(_)) => false,
        }
    }
}

impl FromIterator<(Var, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Subst {
        Subst(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_and_match() {
        let pat = Term::app("f", vec![Term::var("x"), Term::var("x")]);
        let mut s = Subst::new();
        assert!(s.match_term(&pat, &Term::app("f", vec![Term::constant("a"), Term::constant("a")])));
        assert_eq!(s.apply(&Term::var("x")), Term::constant("a"));
        let mut s = Subst::new();
        assert!(!s.match_term(&pat, &Term::app("f", vec![Term::constant("a"), Term::constant("b")])));
    }
}
