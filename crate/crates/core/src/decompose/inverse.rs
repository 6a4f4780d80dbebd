use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::ruloids::{Decomposer, Polarity};
use super::DecomposeError;
use crate::observe::{Formula, Sublanguage};
use crate::syntax::{Literal, Term, Tss, Var};

pub const MAX_DECOMPOSITIONS: usize = 100_000;

/// A formula per variable; variables without an entry carry `tt`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decomposition(BTreeMap<Var, Formula>);

impl Decomposition {
    pub fn top() -> Decomposition {
        Decomposition::default()
    }

    pub fn get(&self, x: &Var) -> Formula {
        self.0.get(x).cloned().unwrap_or(Formula::Top)
    }

    /// Entries other than `tt`.
    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Formula)> {
        self.0.iter()
    }

    pub fn set(&mut self, x: Var, f: Formula) {
        let f = f.normalize();
        if f == Formula::Top {
            self.0.remove(&x);
        } else {
            self.0.insert(x, f);
        }
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    /// Pointwise conjunction.
    pub fn and(&self, other: &Decomposition) -> Decomposition {
        let mut out = self.clone();
        for (x, f) in &other.0 {
            out.set(x.clone(), Formula::and([out.get(x), f.clone()]));
        }
        out
    }

    /// Some entry asks both for an action and for its refusal at top level.
    pub fn is_manifestly_unsatisfiable(&self) -> bool {
        self.0.values().any(|f| {
            let refused: BTreeSet<_> = f
                .conjuncts()
                .iter()
                .filter_map(|g| match g {
                    Formula::Cannot(a) => Some(a),
                    _ => None,
                })
                .collect();
            f.conjuncts().iter().any(|g| matches!(g, Formula::Prefix(a, _) if refused.contains(a)))
        })
    }

    /// One `x := formula` line per variable of `t`, in order of first occurrence.
    pub fn lines(&self, t: &Term) -> Vec<String> {
        let mut seen = BTreeSet::new();
        t.var_occurrences()
            .into_iter()
            .filter(|(_, v)| seen.insert(v.clone()))
            .map(|(_, v)| format!("{v} := {}", self.get(&v)))
            .collect()
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.0.iter().map(|(x, g)| format!("{x} := {g}")).collect();
        write!(f, "{{{}}}", parts.join("; "))
    }
}

impl fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(x, f)| (x.as_str(), f.to_string())))
    }
}

impl Decomposer {
    /// The decompositions of `f` through `t`.
    pub fn inverse(&mut self, t: &Term, f: &Formula) -> Result<Vec<Decomposition>, DecomposeError> {
        let f = f.normalize();
        if !Sublanguage::RS.contains(&f, &self.plus().actions) {
            return Err(DecomposeError::OutsideRs(f));
        }
        Ok(self.inv(t, &f)?.into_iter().collect())
    }

    fn inv(&mut self, t: &Term, f: &Formula) -> Result<BTreeSet<Decomposition>, DecomposeError> {
        let mut out = BTreeSet::new();
        match f {
            Formula::Top => {
                out.insert(Decomposition::top());
            }
            Formula::Cannot(a) => {
                for r in self.ruloids(t, a, Polarity::Negative)? {
                    let d = premise_part(t, &r.rule.premises, &Decomposition::top());
                    self.keep(&mut out, d)?;
                }
            }
            Formula::Prefix(a, g) => {
                for r in self.ruloids(t, a, Polarity::Positive)? {
                    let u = r.target().expect("positive ruloid").clone();
                    for chi in self.inv(&u, g)? {
                        let mut d = premise_part(t, &r.rule.premises, &chi);
                        for x in t.vars() {
                            d.set(x.clone(), Formula::and([chi.get(&x), d.get(&x)]));
                        }
                        self.keep(&mut out, d)?;
                    }
                }
            }
            Formula::Conj(items) => {
                out.insert(Decomposition::top());
                for g in items {
                    let part = self.inv(t, g)?;
                    let mut next = BTreeSet::new();
                    for l in &out {
                        for r in &part {
                            self.keep(&mut next, l.and(r))?;
                        }
                    }
                    out = next;
                }
            }
            Formula::Neg(_) => return Err(DecomposeError::OutsideRs(f.clone())),
        }
        Ok(out)
    }

    fn keep(&self, out: &mut BTreeSet<Decomposition>, d: Decomposition) -> Result<(), DecomposeError> {
        if !d.is_manifestly_unsatisfiable() {
            out.insert(d);
            if out.len() > self.max_decompositions {
                return Err(DecomposeError::Explosion { what: "decomposition set", cap: self.max_decompositions });
            }
        }
        Ok(())
    }
}

/// The refusals and the guarded continuations a ruloid's premises impose on each variable of `t`.
fn premise_part(t: &Term, premises: &BTreeSet<Literal>, chi: &Decomposition) -> Decomposition {
    let mut d = Decomposition::top();
    for x in t.vars() {
        let parts: Vec<Formula> = premises.iter().filter(|l| l.source().as_var() == Some(&x)).map(|l| match l {
            Literal::Neg { action, .. } => Formula::Cannot(action.clone()),
            Literal::Pos { action, target, .. } => {
                let y = target.as_var().expect("premise target is a variable");
                Formula::prefix(action.clone(), chi.get(y))
            }
        }).collect();
        d.set(x, Formula::and(parts));
    }
    d
}

/// The decompositions of `f` through `t` under the specification `p`.
pub fn inverse(p: &Tss, t: &Term, f: &Formula) -> Result<Vec<Decomposition>, DecomposeError> {
    Decomposer::new(p)?.inverse(t, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::syntax::parse_term;

    fn formula(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn inverse_example() {
        let p = load("inverse");
        let t = parse_term("f(f(x))", &p.signature).unwrap();
        let got = inverse(&p, &t, &formula("<b><a>tt")).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].get(&Var::new("x")), formula("<b><b>tt"));
        assert_eq!(got[0].lines(&t), vec!["x := <b><b>tt".to_string()]);
    }

    #[test]
    fn top_decomposes_to_top() {
        for name in ["inverse", "bpa", "priority"] {
            let p = load(name);
            let t = Term::app("f", vec![Term::var("x")]);
            let t = if p.signature.contains(&"f".into()) { t } else { Term::app("+", vec![Term::var("x"), Term::var("y")]) };
            let got = inverse(&p, &t, &Formula::Top).unwrap();
            assert_eq!(got, vec![Decomposition::top()], "{name}");
        }
    }

    #[test]
    fn variable_term_decomposes_to_the_formula() {
        let p = load("bpa");
        let x = Term::var("x");
        let got = inverse(&p, &x, &formula("<a>tt")).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].get(&Var::new("x")), formula("<a>tt"));
        let got = inverse(&p, &x, &formula("<a>(no b & <c>tt)")).unwrap();
        assert_eq!(got[0].get(&Var::new("x")), formula("<a>(no b & <c>tt)"));
    }

    #[test]
    fn refusal_through_a_sum_refuses_both_sides() {
        let p = load("bpa");
        let t = parse_term("x+y", &p.signature).unwrap();
        let got = inverse(&p, &t, &formula("no a")).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].get(&Var::new("x")), formula("no a"));
        assert_eq!(got[0].get(&Var::new("y")), formula("no a"));
    }

    #[test]
    fn prefix_through_a_sum_offers_either_side() {
        let p = load("bpa");
        let t = parse_term("x+y", &p.signature).unwrap();
        let got: BTreeSet<String> = inverse(&p, &t, &formula("<a><b>tt")).unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(got, BTreeSet::from(["{x := <a><b>tt}".to_string(), "{y := <a><b>tt}".to_string()]));
    }

    #[test]
    fn conjunction_is_the_pointwise_product() {
        let p = load("bpa");
        let t = parse_term("x+y", &p.signature).unwrap();
        let f1 = formula("<a>tt");
        let f2 = formula("no b");
        let both = inverse(&p, &t, &Formula::and([f1.clone(), f2.clone()])).unwrap();
        let l = inverse(&p, &t, &f1).unwrap();
        let r = inverse(&p, &t, &f2).unwrap();
        let product: BTreeSet<Decomposition> = l.iter().flat_map(|a| r.iter().map(move |b| a.and(b))).filter(|d| !d.is_manifestly_unsatisfiable()).collect();
        assert_eq!(both.into_iter().collect::<BTreeSet<_>>(), product);
    }

    #[test]
    fn manifest_contradictions_are_pruned() {
        let p = load("bpa");
        let x = Term::var("x");
        assert!(inverse(&p, &x, &formula("<a>tt & no a")).unwrap().is_empty());
    }

    #[test]
    fn negation_is_rejected() {
        let p = load("bpa");
        let x = Term::var("x");
        assert!(matches!(inverse(&p, &x, &formula("not <a>tt")), Err(DecomposeError::OutsideRs(_))));
    }
}
