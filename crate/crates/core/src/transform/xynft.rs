use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::Serialize;

use super::uniform::{uniform_source, uniformize_rule};
use super::{require_decent_ntyft, require_standard, unique_names, Constructor, Provenance, TransformError};
use crate::syntax::{alpha_key, Action, Fresh, Literal, Rule, Subst, Term, Tss, Var};

pub const DEFAULT_FUEL: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XynftOutcome {
    #[serde(skip)]
    pub tss: Tss,
    /// Some derivation was cut off by the depth bound.
    pub fuel_exhausted: bool,
}

/// A partial derivation: premises, target, and the names of the rules used.
#[derive(Clone)]
struct Derived {
    premises: BTreeSet<Literal>,
    target: Term,
    used: Vec<String>,
}

struct Composer<'a> {
    tss: &'a Tss,
    fresh: Fresh,
    memo: HashMap<(Term, Action, usize), Rc<Vec<Derived>>>,
    exhausted: bool,
}

impl Composer<'_> {
    /// All xyntt rules with conclusion `t -a-> _` provable within `fuel` nested rule applications.
    fn derive(&mut self, t: &Term, a: &Action, fuel: usize) -> Vec<Derived> {
        if t.is_var() {
            let y = self.fresh.term();
            return vec![Derived { premises: [Literal::pos(t.clone(), a.clone(), y.clone())].into(), target: y, used: Vec::new() }];
        }
        if fuel == 0 {
            self.exhausted = true;
            return Vec::new();
        }
        let key = (t.clone(), a.clone(), fuel);
        let found = match self.memo.get(&key) {
            Some(d) => Rc::clone(d),
            None => {
                let d = Rc::new(self.derive_uncached(t, a, fuel));
                self.memo.insert(key, Rc::clone(&d));
                d
            }
        };
        let keep = t.vars();
        found
            .iter()
            .map(|d| {
                let (premises, target) = self.fresh.rename_literals(&d.premises, Some(&d.target), &keep);
                Derived { premises, target: target.expect("target"), used: d.used.clone() }
            })
            .collect()
    }

    fn derive_uncached(&mut self, t: &Term, a: &Action, fuel: usize) -> Vec<Derived> {
        let mut out = Vec::new();
        let head = t.head().expect("non-variable term");
        for r in self.tss.rules_for(head, a) {
            let r = self.fresh.rename_apart(r, &BTreeSet::new());
            let mut rho = Subst::new();
            if !rho.match_term(r.source(), t) {
                continue;
            }
            let negatives: BTreeSet<Literal> = r.negative_premises().map(|l| rho.apply_literal(l)).collect();
            let mut partial = vec![(negatives, rho, vec![r.name.clone()])];
            for p in r.positive_premises() {
                let y = p.target().and_then(Term::as_var).expect("ntyft premise target").clone();
                let options = self.derive(&rho_apply(&partial, p.source()), p.action(), fuel - 1);
                partial = extend(partial, &options, &y);
                if partial.is_empty() {
                    break;
                }
            }
            let target = r.target().expect("standard rule");
            out.extend(partial.into_iter().map(|(premises, s, used)| Derived { premises, target: s.apply(target), used }));
        }
        out
    }
}

/// Premise sources only mention source variables, so any partial substitution applies them alike.
fn rho_apply(partial: &[(BTreeSet<Literal>, Subst, Vec<String>)], t: &Term) -> Term {
    match partial.first() {
        Some((_, s, _)) => s.apply(t),
        None => t.clone(),
    }
}

fn extend(partial: Vec<(BTreeSet<Literal>, Subst, Vec<String>)>, options: &[Derived], y: &Var) -> Vec<(BTreeSet<Literal>, Subst, Vec<String>)> {
    let mut next = Vec::new();
    for (prem, s, used) in &partial {
        for d in options {
            let mut prem = prem.clone();
            let mut s = s.clone();
            let mut used = used.clone();
            prem.extend(d.premises.iter().cloned());
            s.insert(y.clone(), d.target.clone());
            used.extend(d.used.iter().cloned());
            next.push((prem, s, used));
        }
    }
    next
}

/// Computes the decent xynft rules provable from a standard decent ntyft
/// specification by composing rules through non-variable premise sources.
pub fn to_decent_xynft(tss: &Tss, fuel: usize) -> Result<XynftOutcome, TransformError> {
    to_decent_xynft_traced(tss, fuel).map(|(o, _)| o)
}

pub(crate) fn to_decent_xynft_traced(tss: &Tss, fuel: usize) -> Result<(XynftOutcome, Vec<Provenance>), TransformError> {
    require_standard(tss)?;
    require_decent_ntyft(tss)?;
    let mut composer = Composer { tss, fresh: Fresh::for_tss(tss), memo: HashMap::new(), exhausted: false };
    let mut rules = Vec::new();
    let mut used_by = Vec::new();
    for d in tss.signature.iter() {
        let src = uniform_source(&d.name, d.arity);
        for a in &tss.actions {
            for derived in composer.derive(&src, a, fuel) {
                let name = derived.used.join("+");
                let rule = Rule::new(name, derived.premises, Literal::pos(src.clone(), a.clone(), derived.target));
                rules.push(uniformize_rule(&rule)?);
                used_by.push(derived.used);
            }
        }
    }
    let mut kept = Vec::new();
    let mut prov = Vec::new();
    let mut seen = BTreeSet::new();
    for (r, used) in rules.into_iter().zip(used_by) {
        if seen.insert(alpha_key(&r)) {
            kept.push(r);
            prov.push(used);
        }
    }
    unique_names(&mut kept);
    let provenance = kept
        .iter()
        .zip(prov)
        .filter(|(_, used)| used.len() > 1)
        .map(|(r, used)| Provenance { rule: r.name.clone(), constructor: Constructor::Compose, origins: used })
        .collect();
    Ok((XynftOutcome { tss: tss.with_rules(kept), fuel_exhausted: composer.exhausted }, provenance))
}
