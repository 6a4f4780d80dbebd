use std::collections::{BTreeMap, BTreeSet};

use super::ground::Instance;
use super::Pair;
use crate::syntax::{Action, Literal, Subst, Term};

pub(crate) type Rel = BTreeMap<Pair, BTreeSet<Term>>;

/// What an unevaluable premise (one whose left-hand side leaves the universe) does.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Outside {
    Fail,
    Maybe,
}

pub(crate) trait View {
    /// Known targets of `s -b->`, and whether further unknown targets may exist.
    fn targets(&self, s: &Term, b: &Action) -> (Option<&BTreeSet<Term>>, bool);
    /// Whether the premise `s -/b->` counts as holding.
    fn refused(&self, s: &Term, b: &Action) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Firing {
    Target(Term),
    Wildcard,
    Negative,
}

pub(crate) struct Eval<'a> {
    pub universe: &'a BTreeSet<Term>,
    pub view: &'a dyn View,
    pub outside: Outside,
    pub touched: Vec<Pair>,
    pub hit_outside: bool,
    /// Closed premise sources met outside the universe.
    pub missing: Vec<Term>,
}

impl<'a> Eval<'a> {
    pub fn new(universe: &'a BTreeSet<Term>, view: &'a dyn View, outside: Outside) -> Eval<'a> {
        Eval { universe, view, outside, touched: Vec::new(), hit_outside: false, missing: Vec::new() }
    }

    pub fn fire(&mut self, inst: &Instance, out: &mut Vec<Firing>) {
        self.step(inst, 0, Subst::new(), out);
    }

    fn step(&mut self, inst: &Instance, i: usize, sigma: Subst, out: &mut Vec<Firing>) {
        let Some(p) = inst.premises.get(i) else {
            out.push(match &inst.conclusion {
                Literal::Neg { .. } => Firing::Negative,
                Literal::Pos { target, .. } => {
                    let u = sigma.apply(target);
                    if u.is_closed() {
                        Firing::Target(u)
                    } else {
                        Firing::Wildcard
                    }
                }
            });
            return;
        };
        let lhs = sigma.apply(p.source());
        let b = p.action();
        if !lhs.is_closed() || !self.universe.contains(&lhs) {
            self.hit_outside = true;
            if lhs.is_closed() {
                self.missing.push(lhs.clone());
            }
            if self.outside == Outside::Fail {
                return;
            }
            match p {
                Literal::Pos { target, .. } if !sigma.apply(target).is_closed() => out.push(Firing::Wildcard),
                _ => self.step(inst, i + 1, sigma, out),
            }
            return;
        }
        self.touched.push((lhs.clone(), b.clone()));
        match p {
            Literal::Neg { .. } => {
                if self.view.refused(&lhs, b) {
                    self.step(inst, i + 1, sigma, out);
                }
            }
            Literal::Pos { target, .. } => {
                let (known, wild) = self.view.targets(&lhs, b);
                let pattern = sigma.apply(target);
                for u in known.into_iter().flatten() {
                    let mut s = sigma.clone();
                    if s.match_term(&pattern, u) {
                        self.step(inst, i + 1, s, out);
                    }
                }
                if wild {
                    if pattern.is_closed() {
                        self.step(inst, i + 1, sigma, out);
                    } else {
                        out.push(Firing::Wildcard);
                    }
                }
            }
        }
    }
}

/// Least fixpoint of the positive instances under a fixed reading of negative premises.
pub(crate) struct Lfp {
    pub rel: Rel,
    pub wild: BTreeSet<Pair>,
    pub missing: BTreeSet<Term>,
}

pub(crate) fn positive_lfp(
    instances: &[Instance],
    universe: &BTreeSet<Term>,
    refused: &dyn Fn(&Term, &Action) -> bool,
    outside: Outside,
    max_target: usize,
) -> Lfp {
    struct Current<'r> {
        lfp: &'r Lfp,
        refused: &'r dyn Fn(&Term, &Action) -> bool,
    }
    impl View for Current<'_> {
        fn targets(&self, s: &Term, b: &Action) -> (Option<&BTreeSet<Term>>, bool) {
            let key = (s.clone(), b.clone());
            (self.lfp.rel.get(&key), self.lfp.wild.contains(&key))
        }
        fn refused(&self, s: &Term, b: &Action) -> bool {
            (self.refused)(s, b)
        }
    }
    let mut lfp = Lfp { rel: Rel::new(), wild: BTreeSet::new(), missing: BTreeSet::new() };
    loop {
        let mut found: Vec<(Pair, Firing)> = Vec::new();
        let mut missing = Vec::new();
        {
            let view = Current { lfp: &lfp, refused };
            let mut ev = Eval::new(universe, &view, outside);
            let mut out = Vec::new();
            for inst in instances.iter().filter(|i| i.conclusion.is_positive()) {
                out.clear();
                ev.fire(inst, &mut out);
                let key = inst.pair();
                found.extend(out.drain(..).map(|f| (key.clone(), f)));
            }
            missing.append(&mut ev.missing);
        }
        let mut changed = false;
        lfp.missing.extend(missing);
        for (key, f) in found {
            match f {
                Firing::Target(u) if u.size() <= max_target => {
                    changed |= lfp.rel.entry(key).or_default().insert(u);
                }
                Firing::Target(_) | Firing::Wildcard => {
                    if outside == Outside::Maybe {
                        changed |= lfp.wild.insert(key);
                    }
                }
                Firing::Negative => {}
            }
        }
        if !changed {
            return lfp;
        }
    }
}
