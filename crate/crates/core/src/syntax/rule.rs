use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::term::{Action, Term, Var};

/// A positive literal `t -a-> u` or a negative literal `t -/a->`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Pos { source: Term, action: Action, target: Term },
    Neg { source: Term, action: Action },
}

impl Literal {
    pub fn pos(source: Term, action: impl Into<Action>, target: Term) -> Literal {
        Literal::Pos { source, action: action.into(), target }
    }

    pub fn neg(source: Term, action: impl Into<Action>) -> Literal {
        Literal::Neg { source, action: action.into() }
    }

    pub fn source(&self) -> &Term {
        match self {
            Literal::Pos { source, .. } | Literal::Neg { source, .. } => source,
        }
    }

    pub fn action(&self) -> &Action {
        match self {
            Literal::Pos { action, .. } | Literal::Neg { action, .. } => action,
        }
    }

    pub fn target(&self) -> Option<&Term> {
        match self {
            Literal::Pos { target, .. } => Some(target),
            Literal::Neg { .. } => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Literal::Pos { .. })
    }

    /// `t -a-> u` and `t -/a->` deny each other.
    pub fn denies(&self, other: &Literal) -> bool {
        self.is_positive() != other.is_positive()
            && self.source() == other.source()
            && self.action() == other.action()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.source().collect_vars(&mut out);
        if let Some(t) = self.target() {
            t.collect_vars(&mut out);
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.source().is_closed() && self.target().is_none_or(Term::is_closed)
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Literal {
        match self {
            Literal::Pos { source, action, target } => Literal::Pos {
                source: f(source),
                action: action.clone(),
                target: f(target),
            },
            Literal::Neg { source, action } => Literal::Neg { source: f(source), action: action.clone() },
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos { source, action, target } => write!(f, "{source} -{action}-> {target}"),
            Literal::Neg { source, action } => write!(f, "{source} -/{action}->"),
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Records which template a rule was expanded from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instantiation {
    pub template: String,
    pub bindings: Vec<(String, Action)>,
}

/// A transition rule. Equality ignores provenance.
#[derive(Clone)]
pub struct Rule {
    pub name: String,
    pub premises: BTreeSet<Literal>,
    pub conclusion: Literal,
    pub origin: Option<Instantiation>,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Rule) -> bool {
        self.name == other.name && self.premises == other.premises && self.conclusion == other.conclusion
    }
}

impl Eq for Rule {}

impl Rule {
    pub fn new(name: impl Into<String>, premises: impl IntoIterator<Item = Literal>, conclusion: Literal) -> Rule {
        Rule {
            name: name.into(),
            premises: premises.into_iter().collect(),
            conclusion,
            origin: None,
        }
    }

    pub fn source(&self) -> &Term {
        self.conclusion.source()
    }

    pub fn action(&self) -> &Action {
        self.conclusion.action()
    }

    pub fn target(&self) -> Option<&Term> {
        self.conclusion.target()
    }

    pub fn is_standard(&self) -> bool {
        self.conclusion.is_positive()
    }

    pub fn is_positive(&self) -> bool {
        self.is_standard() && self.premises.iter().all(Literal::is_positive)
    }

    pub fn positive_premises(&self) -> impl Iterator<Item = &Literal> {
        self.premises.iter().filter(|p| p.is_positive())
    }

    pub fn negative_premises(&self) -> impl Iterator<Item = &Literal> {
        self.premises.iter().filter(|p| !p.is_positive())
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = self.conclusion.vars();
        for p in &self.premises {
            out.extend(p.vars());
        }
        out
    }

    pub fn source_vars(&self) -> BTreeSet<Var> {
        self.source().vars()
    }

    /// Variables of premise targets, `rhs(H)`.
    pub fn rhs_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for p in self.positive_premises() {
            if let Some(t) = p.target() {
                t.collect_vars(&mut out);
            }
        }
        out
    }

    /// Variables of premise sources, `lvar(H)`.
    pub fn lhs_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for p in &self.premises {
            p.source().collect_vars(&mut out);
        }
        out
    }

    /// Variables occurring neither in the source nor as premise targets.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let bound: BTreeSet<Var> = self.source_vars().union(&self.rhs_vars()).cloned().collect();
        self.vars().difference(&bound).cloned().collect()
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Rule {
        Rule {
            name: self.name.clone(),
            premises: self.premises.iter().map(|p| p.map_terms(&mut f)).collect(),
            conclusion: self.conclusion.map_terms(&mut f),
            origin: self.origin.clone(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Rule {
        self.name = name.into();
        self
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}:", self.name)?;
        for (i, p) in self.premises.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{p}")?;
        }
        write!(f, " |- {}", self.conclusion)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deny_is_symmetric_and_irreflexive() {
        let x = Term::var("x");
        let p = Literal::pos(x.clone(), "a", Term::var("y"));
        let n = Literal::neg(x.clone(), "a");
        let m = Literal::neg(x, "b");
        assert!(p.denies(&n) && n.denies(&p));
        assert!(!p.denies(&p) && !n.denies(&n));
        assert!(!p.denies(&m));
    }

    #[test]
    fn variable_classes() {
        // x -a-> y, z -/b-> |- f(x) -a-> g(y, w)
        let r = Rule::new(
            "r",
            [
                Literal::pos(Term::var("x"), "a", Term::var("y")),
                Literal::neg(Term::var("z"), "b"),
            ],
            Literal::pos(
                Term::app("f", vec![Term::var("x")]),
                "a",
                Term::app("g", vec![Term::var("y"), Term::var("w")]),
            ),
        );
        let names = |s: BTreeSet<Var>| s.into_iter().map(|v| v.to_string()).collect::<Vec<_>>();
        assert_eq!(names(r.source_vars()), ["x"]);
        assert_eq!(names(r.rhs_vars()), ["y"]);
        assert_eq!(names(r.lhs_vars()), ["x", "z"]);
        assert_eq!(names(r.free_vars()), ["w", "z"]);
    }
}
