use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::rule::{Literal, Rule};
use super::term::{Action, Symbol, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionDecl {
    pub name: Symbol,
    pub arity: usize,
    /// Declared liquidity per argument, `true` for liquid.
    pub liquidity: Option<Vec<bool>>,
}

/// Function symbols in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    decls: Vec<FunctionDecl>,
    #[serde(skip)]
    index: BTreeMap<Symbol, usize>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// Adds a declaration; returns the old one if the name was taken.
    pub fn declare(&mut self, decl: FunctionDecl) -> Option<FunctionDecl> {
        if let Some(&i) = self.index.get(&decl.name) {
            return Some(std::mem::replace(&mut self.decls[i], decl));
        }
        self.index.insert(decl.name.clone(), self.decls.len());
        self.decls.push(decl);
        None
    }

    pub fn add(&mut self, name: &str, arity: usize) {
        self.declare(FunctionDecl { name: Symbol::new(name), arity, liquidity: None });
    }

    pub fn get(&self, name: &Symbol) -> Option<&FunctionDecl> {
        self.index.get(name).map(|&i| &self.decls[i])
    }

    pub fn arity(&self, name: &Symbol) -> Option<usize> {
        self.get(name).map(|d| d.arity)
    }

    pub fn contains(&self, name: &Symbol) -> bool {
        self.index.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FunctionDecl> {
        self.decls.iter()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn constants(&self) -> impl Iterator<Item = &Symbol> {
        self.decls.iter().filter(|d| d.arity == 0).map(|d| &d.name)
    }

    /// True if every declaration of `self` also appears in `other` with the same arity.
    pub fn is_subset_of(&self, other: &Signature) -> bool {
        self.decls.iter().all(|d| other.arity(&d.name) == Some(d.arity))
    }

    /// Checks that `t` only uses declared symbols at their arity.
    pub fn well_formed(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => self.arity(f) == Some(args.len()) && args.iter().all(|a| self.well_formed(a)),
        }
    }
}

/// A strict partial order on actions; `(lo, hi)` means `lo < hi`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ActionOrder {
    declared: Vec<(Action, Action)>,
    #[serde(skip)]
    closure: BTreeSet<(Action, Action)>,
}

impl ActionOrder {
    /// Builds the transitive closure; `None` if the declared pairs contain a cycle.
    pub fn new(declared: Vec<(Action, Action)>) -> Option<ActionOrder> {
        let mut closure: BTreeSet<(Action, Action)> = declared.iter().cloned().collect();
        loop {
            let extra: Vec<_> = closure
                .iter()
                .flat_map(|(a, b)| {
                    closure
                        .iter()
                        .filter(move |(c, _)| c == b)
                        .map(move |(_, d)| (a.clone(), d.clone()))
                })
                .filter(|p| !closure.contains(p))
                .collect();
            if extra.is_empty() {
                break;
            }
            closure.extend(extra);
        }
        if closure.iter().any(|(a, b)| a == b) {
            return None;
        }
        Some(ActionOrder { declared, closure })
    }

    pub fn less(&self, lo: &Action, hi: &Action) -> bool {
        self.closure.contains(&(lo.clone(), hi.clone()))
    }

    pub fn declared(&self) -> &[(Action, Action)] {
        &self.declared
    }

    pub fn is_empty(&self) -> bool {
        self.declared.is_empty()
    }
}

/// A transition system specification.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tss {
    pub signature: Signature,
    pub actions: Vec<Action>,
    pub order: ActionOrder,
    pub rules: Vec<Rule>,
    /// Set when free variables were instantiated over a finite universe.
    pub universe_relative: bool,
}

impl Tss {
    pub fn is_standard(&self) -> bool {
        self.rules.iter().all(Rule::is_standard)
    }

    pub fn is_positive(&self) -> bool {
        self.rules.iter().all(Rule::is_positive)
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn has_action(&self, a: &Action) -> bool {
        self.actions.contains(a)
    }

    /// Rules whose source has head `f` and whose conclusion carries `a`.
    pub fn rules_for<'a>(&'a self, f: &'a Symbol, a: &'a Action) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules
            .iter()
            .filter(move |r| r.source().head() == Some(f) && r.action() == a)
    }

    pub fn with_rules(&self, rules: Vec<Rule>) -> Tss {
        Tss { rules, ..self.clone() }
    }

    /// Union with another specification over a compatible signature; rules of `other` are appended.
    pub fn extend(&self, other: &Tss) -> Tss {
        let mut out = self.clone();
        for d in other.signature.iter() {
            if !out.signature.contains(&d.name) {
                out.signature.declare(d.clone());
            }
        }
        for a in &other.actions {
            if !out.actions.contains(a) {
                out.actions.push(a.clone());
            }
        }
        let mut pairs = out.order.declared().to_vec();
        pairs.extend(other.order.declared().iter().cloned());
        out.order = ActionOrder::new(pairs).unwrap_or_default();
        out.rules.extend(other.rules.iter().cloned());
        out.universe_relative |= other.universe_relative;
        out
    }
}

/// Supplies variables `_g0, _g1, ...` not already in use.
#[derive(Clone, Debug)]
pub struct Fresh {
    next: usize,
}

impl Fresh {
    pub fn avoiding<'a>(used: impl IntoIterator<Item = &'a Var>) -> Fresh {
        let next = used
            .into_iter()
            .filter_map(|v| v.as_str().strip_prefix("_g")?.parse::<usize>().ok())
            .map(|n| n + 1)
            .max()
            .unwrap_or(0);
        Fresh { next }
    }

    pub fn for_tss(tss: &Tss) -> Fresh {
        let vars: BTreeSet<Var> = tss.rules.iter().flat_map(Rule::vars).collect();
        Fresh::avoiding(&vars)
    }

    pub fn for_terms<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Fresh {
        let vars: BTreeSet<Var> = terms.into_iter().flat_map(Term::vars).collect();
        Fresh::avoiding(&vars)
    }

    pub fn var(&mut self) -> Var {
        let v = Var::new(format!("_g{}", self.next));
        self.next += 1;
        v
    }

    pub fn term(&mut self) -> Term {
        Term::Var(self.var())
    }

    /// Renames every variable of `rule` outside `keep` to a fresh one.
    pub fn rename_apart(&mut self, rule: &Rule, keep: &BTreeSet<Var>) -> Rule {
        let s = rule
            .vars()
            .into_iter()
            .filter(|v| !keep.contains(v))
            .map(|v| (v, self.term()))
            .collect::<super::Subst>();
        s.apply_rule(rule)
    }

    /// Renames all variables of a premise set and target apart from everything used so far.
    pub fn rename_literals(&mut self, lits: &BTreeSet<Literal>, target: Option<&Term>, keep: &BTreeSet<Var>) -> (BTreeSet<Literal>, Option<Term>) {
        let mut vars = BTreeSet::new();
        for l in lits {
            vars.extend(l.vars());
        }
        if let Some(t) = target {
            vars.extend(t.vars());
        }
        let s: super::Subst = vars
            .into_iter()
            .filter(|v| !keep.contains(v))
            .map(|v| (v, self.term()))
            .collect();
        (lits.iter().map(|l| s.apply_literal(l)).collect(), target.map(|t| s.apply(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_closure_and_cycles() {
        let a = Action::new("a");
        let b = Action::new("b");
        let c = Action::new("c");
        let o = ActionOrder::new(vec![(a.clone(), b.clone()), (b.clone(), c.clone())]).unwrap();
        assert!(o.less(&a, &c));
        assert!(!o.less(&c, &a));
        assert!(ActionOrder::new(vec![(a.clone(), b.clone()), (b, a)]).is_none());
    }

    #[test]
    fn fresh_skips_used_names() {
        let used = [Var::new("_g3"), Var::new("x")];
        let mut f = Fresh::avoiding(&used);
        assert_eq!(f.var().as_str(), "_g4");
        assert_eq!(f.var().as_str(), "_g5");
    }
}
