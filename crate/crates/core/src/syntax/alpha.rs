//! Canonical variable naming, used for equality up to bijective renaming.

use std::collections::{BTreeMap, BTreeSet};

use super::rule::{Literal, Rule};
use super::term::{Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Tok<'a> {
    Open(&'a str, usize),
    Bound(usize),
    Hole,
    Act(&'a str),
    Neg,
}

#[derive(Clone)]
struct Naming {
    map: BTreeMap<Var, Var>,
    rank: BTreeMap<Var, usize>,
    reserved: BTreeSet<Var>,
    next_name: usize,
    prefix: &'static str,
}

impl Naming {
    fn new(prefix: &'static str) -> Naming {
        Naming { map: BTreeMap::new(), rank: BTreeMap::new(), reserved: BTreeSet::new(), next_name: 0, prefix }
    }

    fn fix(&mut self, from: Var, to: Var) {
        self.rank.insert(from.clone(), self.rank.len());
        self.reserved.insert(to.clone());
        self.map.insert(from, to);
    }

    fn bind(&mut self, v: &Var) {
        if self.map.contains_key(v) {
            return;
        }
        let name = loop {
            let candidate = Var::new(format!("{}{}", self.prefix, self.next_name));
            self.next_name += 1;
            if !self.reserved.contains(&candidate) {
                break candidate;
            }
        };
        self.rank.insert(v.clone(), self.rank.len());
        self.map.insert(v.clone(), name);
    }

    fn bind_term(&mut self, t: &Term) {
        match t {
            Term::Var(v) => self.bind(v),
            Term::App(_, args) => args.iter().for_each(|a| self.bind_term(a)),
        }
    }

    fn bind_literal(&mut self, l: &Literal) {
        self.bind_term(l.source());
        if let Some(t) = l.target() {
            self.bind_term(t);
        }
    }

    fn key_term<'a>(&self, t: &'a Term, out: &mut Vec<Tok<'a>>) {
        match t {
            Term::Var(v) => out.push(self.rank.get(v).map_or(Tok::Hole, |&n| Tok::Bound(n))),
            Term::App(f, args) => {
                out.push(Tok::Open(f.as_str(), args.len()));
                args.iter().for_each(|a| self.key_term(a, out));
            }
        }
    }

    fn key<'a>(&self, l: &'a Literal) -> Vec<Tok<'a>> {
        let mut out = Vec::new();
        if !l.is_positive() {
            out.push(Tok::Neg);
        }
        out.push(Tok::Act(l.action().as_str()));
        self.key_term(l.source(), &mut out);
        if let Some(t) = l.target() {
            self.key_term(t, &mut out);
        }
        out
    }

    fn rename(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(self.map[v].clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.rename(a)).collect()),
        }
    }

    fn rename_literal(&self, l: &Literal) -> Literal {
        l.map_terms(|t| self.rename(t))
    }
}

/// Orders premises so that the naming does not depend on the input names.
/// Ties between premises that differ only in unnamed variables are broken by search.
fn order_premises(naming: Naming, rest: Vec<&Literal>) -> (Naming, Vec<Literal>) {
    if rest.is_empty() {
        return (naming, Vec::new());
    }
    let keys: Vec<_> = rest.iter().map(|l| naming.key(l)).collect();
    let best = keys.iter().min().cloned().unwrap_or_default();
    let candidates: Vec<usize> = (0..rest.len()).filter(|&i| keys[i] == best).collect();
    let mut result: Option<(Naming, Vec<Literal>)> = None;
    for &i in &candidates {
        let mut n = naming.clone();
        n.bind_literal(rest[i]);
        let head = n.rename_literal(rest[i]);
        let others: Vec<&Literal> = rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, l)| *l).collect();
        let (n, mut tail) = order_premises(n, others);
        tail.insert(0, head);
        if result.as_ref().is_none_or(|(_, r)| tail < *r) {
            result = Some((n, tail));
        }
        if !best.contains(&Tok::Hole) {
            break;
        }
    }
    result.expect("at least one candidate")
}

fn canonical_with(rule: &Rule, naming: Naming) -> Rule {
    let mut naming = naming;
    naming.bind_literal(&rule.conclusion);
    let conclusion = naming.rename_literal(&rule.conclusion);
    let (_, premises) = order_premises(naming, rule.premises.iter().collect());
    Rule {
        name: rule.name.clone(),
        premises: premises.into_iter().collect(),
        conclusion,
        origin: rule.origin.clone(),
    }
}

/// Renames variables to `_v0, _v1, ...` in a traversal order that depends only on the rule's shape.
pub fn alpha_canonical(rule: &Rule) -> Rule {
    canonical_with(rule, Naming::new("_v"))
}

/// Like [`alpha_canonical`], but the variables in `fixed` keep their names.
pub fn alpha_canonical_fixing(rule: &Rule, fixed: &BTreeSet<Var>) -> Rule {
    canonical_fixing_as(rule, fixed.iter().map(|v| (v.clone(), v.clone())), "_v")
}

/// Canonical form where the listed variables are renamed as given and the rest get `prefix0, prefix1, ...`.
pub(crate) fn canonical_fixing_as(rule: &Rule, fixed: impl IntoIterator<Item = (Var, Var)>, prefix: &'static str) -> Rule {
    let mut naming = Naming::new(prefix);
    for (from, to) in fixed {
        naming.fix(from, to);
    }
    canonical_with(rule, naming)
}

/// Equality up to bijective renaming of variables; rule names are ignored.
pub fn alpha_equal(a: &Rule, b: &Rule) -> bool {
    if a.premises.len() != b.premises.len() || a.conclusion.is_positive() != b.conclusion.is_positive() {
        return false;
    }
    let ca = alpha_canonical(a);
    let cb = alpha_canonical(b);
    ca.premises == cb.premises && ca.conclusion == cb.conclusion
}

/// Shape of a rule modulo renaming, usable as a map key.
pub fn alpha_key(rule: &Rule) -> (Vec<Literal>, Literal) {
    let c = alpha_canonical(rule);
    (c.premises.into_iter().collect(), c.conclusion)
}

/// Removes rules that are α-equal to an earlier one.
pub fn dedup_alpha(rules: Vec<Rule>) -> Vec<Rule> {
    let mut seen = BTreeSet::new();
    rules.into_iter().filter(|r| seen.insert(alpha_key(r))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(s: Term, a: &str, t: Term) -> Literal {
        Literal::pos(s, a, t)
    }

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn symmetric_premises_are_canonical() {
        let src = Term::app("f", vec![v("x")]);
        let tgt = |a: Term, b: Term| Term::app("g", vec![a, b]);
        let r1 = Rule::new("r", [pos(v("x"), "b", v("y1")), pos(v("x"), "b", v("y2"))], pos(src.clone(), "b", tgt(v("y1"), v("y2"))));
        let r2 = Rule::new("s", [pos(v("x"), "b", v("q")), pos(v("x"), "b", v("p"))], pos(src.clone(), "b", tgt(v("p"), v("q"))));
        assert!(alpha_equal(&r1, &r2));
        let r3 = Rule::new("t", [pos(v("x"), "b", v("y1")), pos(v("x"), "b", v("y2"))], pos(src, "b", tgt(v("y1"), v("y1"))));
        assert!(!alpha_equal(&r1, &r3));
    }

    #[test]
    fn canonical_is_idempotent() {
        let r = Rule::new(
            "r",
            [pos(v("z"), "a", v("w")), Literal::neg(v("x"), "b")],
            pos(Term::app("f", vec![v("x"), v("z")]), "a", v("w")),
        );
        let c = alpha_canonical(&r);
        assert_eq!(alpha_canonical(&c), c);
    }

    #[test]
    fn fixing_keeps_source_names() {
        let src = Term::app("g", vec![v("x"), v("y")]);
        let r1 = Rule::new("r", [pos(v("x"), "a", v("z"))], pos(src.clone(), "a", v("z")));
        let r1b = Rule::new("r", [pos(v("x"), "a", v("w"))], pos(src.clone(), "a", v("w")));
        let r2 = Rule::new("r", [pos(v("y"), "a", v("z"))], pos(src, "a", v("z")));
        let fixed: BTreeSet<Var> = [Var::new("x"), Var::new("y")].into();
        assert!(!alpha_equal(&r1, &r2));
        assert!(alpha_equal(&r1, &r1b));
        let c = alpha_canonical_fixing(&r1, &fixed);
        assert_eq!(c, alpha_canonical_fixing(&r1b, &fixed));
        assert_eq!(c.source(), r1.source());
    }
}
