use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use super::DecomposeError;
use crate::format::classify;
use crate::syntax::{alpha_key, Action, Fresh, Literal, Rule, Subst, Term, Tss, Var};
use crate::transform::{digest, plus_pipeline, PipelineOptions};

/// Upper bound on the ruloids kept for one (term, action, polarity) query.
pub const MAX_RULOIDS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

/// Which rules of the closed specification built a ruloid, mirroring its proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub rule: String,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn default_rule() -> Derivation {
        Derivation { rule: "default".into(), premises: Vec::new() }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rule)?;
        if !self.premises.is_empty() {
            f.write_str("[")?;
            for (i, p) in self.premises.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Ruloid {
    pub rule: Rule,
    pub source_term: Term,
    pub polarity: Polarity,
    pub provenance: Derivation,
}

impl Ruloid {
    pub fn premises(&self) -> &BTreeSet<Literal> {
        &self.rule.premises
    }

    pub fn target(&self) -> Option<&Term> {
        self.rule.target()
    }

    /// Premises are about variables of the source, with no lookahead and no free variables.
    pub fn is_well_formed(&self) -> bool {
        let src = self.source_term.vars();
        let rhs = self.rule.rhs_vars();
        let class = classify(&self.rule);
        self.rule.source() == &self.source_term
            && self.rule.premises.iter().all(|l| l.source().as_var().is_some_and(|v| src.contains(v)))
            && rhs.is_disjoint(&src)
            && class.decent
            && class.ntytt
    }

    fn rename(&self, s: &Subst) -> Ruloid {
        Ruloid {
            rule: s.apply_rule(&self.rule),
            source_term: s.apply(&self.source_term),
            polarity: self.polarity,
            provenance: self.provenance.clone(),
        }
    }
}

impl fmt::Display for Ruloid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prem: Vec<String> = self.rule.premises.iter().map(ToString::to_string).collect();
        write!(f, "{} |- {}", prem.join(", "), self.rule.conclusion)
    }
}

type Key = (Term, Action, Polarity);

/// Ruloid derivation over a closed specification, with memoization keyed on
/// the source term up to variable renaming.
pub struct Decomposer {
    plus: Arc<Tss>,
    memo: HashMap<Key, Arc<Vec<Ruloid>>>,
    pub(crate) max_ruloids: usize,
    pub(crate) max_decompositions: usize,
}

fn plus_cache() -> &'static Mutex<HashMap<String, Arc<Tss>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Tss>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl Decomposer {
    /// Runs the plus pipeline on `p`, reusing an earlier result for the same digest.
    pub fn new(p: &Tss) -> Result<Decomposer, DecomposeError> {
        let key = digest(p);
        let cached = plus_cache().lock().map(|c| c.get(&key).cloned()).ok().flatten();
        let plus = match cached {
            Some(plus) => plus,
            None => {
                let (plus, _) = plus_pipeline(p, &PipelineOptions::default())?;
                let plus = Arc::new(plus);
                if let Ok(mut c) = plus_cache().lock() {
                    c.insert(key, plus.clone());
                }
                plus
            }
        };
        Decomposer::from_arc(plus)
    }

    /// Uses `plus` as is; it must already consist of decent nxyft rules.
    pub fn from_plus(plus: Tss) -> Result<Decomposer, DecomposeError> {
        Decomposer::from_arc(Arc::new(plus))
    }

    fn from_arc(plus: Arc<Tss>) -> Result<Decomposer, DecomposeError> {
        if let Some(r) = plus.rules.iter().find(|r| {
            let c = classify(r);
            !(c.nxyft && c.decent)
        }) {
            return Err(DecomposeError::NotPrepared(r.name.clone()));
        }
        Ok(Decomposer { plus, memo: HashMap::new(), max_ruloids: MAX_RULOIDS, max_decompositions: super::inverse::MAX_DECOMPOSITIONS })
    }

    pub fn plus(&self) -> &Tss {
        &self.plus
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Ruloids with source `t` and a conclusion of the given action and polarity.
    pub fn ruloids(&mut self, t: &Term, a: &Action, polarity: Polarity) -> Result<Vec<Ruloid>, DecomposeError> {
        let mut fresh = Fresh::for_terms([t]);
        self.ruloids_with(t, a, polarity, &mut fresh)
    }

    /// Like [`Decomposer::ruloids`] but without the memo table.
    pub fn ruloids_unmemoized(&mut self, t: &Term, a: &Action, polarity: Polarity) -> Result<Vec<Ruloid>, DecomposeError> {
        let mut fresh = Fresh::for_terms([t]);
        let mut scratch = Decomposer { plus: self.plus.clone(), memo: HashMap::new(), max_ruloids: self.max_ruloids, max_decompositions: self.max_decompositions };
        let out = scratch.compute(t, a, polarity, &mut fresh, false)?;
        Ok(out)
    }

    pub(crate) fn ruloids_with(&mut self, t: &Term, a: &Action, polarity: Polarity, fresh: &mut Fresh) -> Result<Vec<Ruloid>, DecomposeError> {
        let (canon, names) = canonical_term(t);
        let key = (canon.clone(), a.clone(), polarity);
        let stored = match self.memo.get(&key) {
            Some(found) => found.clone(),
            None => {
                let mut local = Fresh::for_terms([&canon]);
                let found = Arc::new(self.compute(&canon, a, polarity, &mut local, true)?);
                self.memo.insert(key, found.clone());
                found
            }
        };
        Ok(stored
            .iter()
            .map(|r| {
                let mut s: Subst = names.iter().map(|(c, v)| (c.clone(), Term::Var(v.clone()))).collect();
                for v in r.rule.rhs_vars() {
                    s.insert(v, fresh.term());
                }
                r.rename(&s)
            })
            .collect())
    }

    fn recurse(&mut self, t: &Term, a: &Action, polarity: Polarity, fresh: &mut Fresh, memo: bool) -> Result<Vec<Ruloid>, DecomposeError> {
        if memo {
            self.ruloids_with(t, a, polarity, fresh)
        } else {
            self.compute(t, a, polarity, fresh, false)
        }
    }

    fn compute(&mut self, t: &Term, a: &Action, polarity: Polarity, fresh: &mut Fresh, memo: bool) -> Result<Vec<Ruloid>, DecomposeError> {
        let f = match t {
            Term::Var(_) => return Ok(vec![default_ruloid(t, a, polarity, fresh)]),
            Term::App(f, _) => f.clone(),
        };
        let rules: Vec<Rule> = self
            .plus
            .rules_for(&f, a)
            .filter(|r| r.conclusion.is_positive() == (polarity == Polarity::Positive))
            .cloned()
            .collect();
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for rule in rules {
            let r = fresh.rename_apart(&rule, &BTreeSet::new());
            let mut rho0 = Subst::new();
            if !rho0.match_term(r.source(), t) {
                continue;
            }
            let mut choices = Vec::with_capacity(r.premises.len());
            for p in &r.premises {
                let pol = if p.is_positive() { Polarity::Positive } else { Polarity::Negative };
                let sub = self.recurse(&rho0.apply(p.source()), p.action(), pol, fresh, memo)?;
                if sub.is_empty() {
                    break;
                }
                choices.push((p, sub));
            }
            if choices.len() < r.premises.len() {
                continue;
            }
            let mut pick = vec![0usize; choices.len()];
            loop {
                let mut rho1 = rho0.clone();
                let mut premises = BTreeSet::new();
                let mut children = Vec::with_capacity(choices.len());
                for ((p, sub), &i) in choices.iter().zip(&pick) {
                    let chosen = &sub[i];
                    premises.extend(chosen.rule.premises.iter().cloned());
                    if let (Some(y), Some(u)) = (p.target().and_then(Term::as_var), chosen.target()) {
                        rho1.insert(y.clone(), u.clone());
                    }
                    children.push(chosen.provenance.clone());
                }
                let conclusion = match r.target() {
                    Some(u) => Literal::pos(t.clone(), a.clone(), rho1.apply(u)),
                    None => Literal::neg(t.clone(), a.clone()),
                };
                let ruloid = Ruloid {
                    rule: Rule::new(rule.name.clone(), premises, conclusion),
                    source_term: t.clone(),
                    polarity,
                    provenance: Derivation { rule: rule.name.clone(), premises: children },
                };
                if seen.insert(alpha_key(&ruloid.rule)) {
                    out.push(ruloid);
                    if out.len() > self.max_ruloids {
                        return Err(DecomposeError::Explosion { what: "ruloid set", cap: self.max_ruloids });
                    }
                }
                if !super::odometer(&mut pick, |k| choices[k].1.len()) {
                    break;
                }
            }
        }
        Ok(out)
    }
}

fn default_ruloid(t: &Term, a: &Action, polarity: Polarity, fresh: &mut Fresh) -> Ruloid {
    let lit = match polarity {
        Polarity::Positive => Literal::pos(t.clone(), a.clone(), fresh.term()),
        Polarity::Negative => Literal::neg(t.clone(), a.clone()),
    };
    Ruloid { rule: Rule::new("default", [lit.clone()], lit), source_term: t.clone(), polarity, provenance: Derivation::default_rule() }
}

/// Renames the variables of `t` to `_v0, _v1, ...` by first occurrence; returns the renaming back.
fn canonical_term(t: &Term) -> (Term, Vec<(Var, Var)>) {
    let mut order: Vec<Var> = Vec::new();
    for (_, v) in t.var_occurrences() {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let names: Vec<(Var, Var)> = order.into_iter().enumerate().map(|(i, v)| (Var::new(format!("_v{i}")), v)).collect();
    let s: Subst = names.iter().map(|(c, v)| (v.clone(), Term::Var(c.clone()))).collect();
    (s.apply(t), names)
}

/// Ruloids of `t` derived from a closed specification `plus`.
pub fn derive_ruloids(plus: &Tss, t: &Term, a: &Action, polarity: Polarity) -> Result<Vec<Ruloid>, DecomposeError> {
    Decomposer::from_plus(plus.clone())?.ruloids(t, a, polarity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::syntax::{alpha_equal, parse_term};

    fn term(tss: &Tss, s: &str) -> Term {
        parse_term(s, &tss.signature).unwrap()
    }

    fn rule_of(tss: &Tss, premises: &[(&str, &str, &str)], source: &str, a: &str, target: &str) -> Rule {
        let lits = premises.iter().map(|(s, b, u)| Literal::pos(term(tss, s), *b, term(tss, u)));
        Rule::new("expected", lits, Literal::pos(term(tss, source), a, term(tss, target)))
    }

    #[test]
    fn inverse_example_ruloids() {
        let p = load("inverse");
        let mut d = Decomposer::new(&p).unwrap();
        let got = d.ruloids(&term(&p, "f(f(x))"), &Action::new("b"), Polarity::Positive).unwrap();
        assert_eq!(got.len(), 1);
        assert!(alpha_equal(&got[0].rule, &rule_of(&p, &[("x", "b", "y")], "f(f(x))", "b", "f(y)")), "{}", got[0]);
        assert_eq!(got[0].provenance.to_string(), "fb[fa[default]]");

        let got = d.ruloids(&term(&p, "f(y)"), &Action::new("a"), Polarity::Positive).unwrap();
        assert_eq!(got.len(), 1);
        assert!(alpha_equal(&got[0].rule, &rule_of(&p, &[("y", "b", "z")], "f(y)", "a", "f(z)")));
    }

    #[test]
    fn variable_source_gives_the_default_ruloid() {
        let p = load("inverse");
        let mut d = Decomposer::new(&p).unwrap();
        let x = Term::var("x");
        let got = d.ruloids(&x, &Action::new("a"), Polarity::Positive).unwrap();
        assert_eq!(got.len(), 1);
        assert!(alpha_equal(&got[0].rule, &rule_of(&p, &[("x", "a", "y")], "x", "a", "y")));
        let got = d.ruloids(&x, &Action::new("a"), Polarity::Negative).unwrap();
        assert_eq!(got[0].rule.conclusion, Literal::neg(x.clone(), "a"));
        assert_eq!(got[0].premises(), &BTreeSet::from([Literal::neg(x, "a")]));
    }

    #[test]
    fn closed_constants_have_premise_free_ruloids() {
        let p = load("inverse");
        let mut d = Decomposer::new(&p).unwrap();
        let c = term(&p, "c");
        let pos = d.ruloids(&c, &Action::new("a"), Polarity::Positive).unwrap();
        assert_eq!(pos.len(), 1);
        assert!(pos[0].premises().is_empty());
        assert!(d.ruloids(&c, &Action::new("a"), Polarity::Negative).unwrap().is_empty());
        let neg = d.ruloids(&c, &Action::new("b"), Polarity::Negative).unwrap();
        assert_eq!(neg.len(), 1);
        assert!(neg[0].premises().is_empty());
    }

    #[test]
    fn memo_shares_alpha_variants_and_keeps_results() {
        let p = load("bpa");
        let mut d = Decomposer::new(&p).unwrap();
        let a = Action::new("a");
        let t1 = term(&p, "x.y+z");
        let t2 = term(&p, "u.v+w");
        let r1 = d.ruloids(&t1, &a, Polarity::Positive).unwrap();
        let n = d.memo_len();
        let r2 = d.ruloids(&t2, &a, Polarity::Positive).unwrap();
        assert_eq!(d.memo_len(), n);
        assert_eq!(r1.len(), r2.len());
        let plain = d.ruloids_unmemoized(&t1, &a, Polarity::Positive).unwrap();
        let keys = |rs: &[Ruloid]| rs.iter().map(|r| alpha_key(&r.rule)).collect::<BTreeSet<_>>();
        assert_eq!(keys(&r1), keys(&plain));
        for r in r1.iter().chain(&r2) {
            assert!(r.is_well_formed(), "{r}");
        }
    }

    #[test]
    fn negative_premises_keep_a_positive_conclusion() {
        let p = Decomposer::new(&load("priority")).unwrap().plus().clone();
        let got = derive_ruloids(&p, &term(&p, "th(x)"), &Action::new("c"), Polarity::Positive).unwrap();
        assert!(!got.is_empty());
        assert!(got.iter().all(|r| r.rule.conclusion.is_positive()));
        assert!(got.iter().any(|r| r.premises().iter().any(|l| !l.is_positive())));
    }

    #[test]
    fn bpa_sequence_ruloids() {
        let p = load("bpa");
        let mut d = Decomposer::new(&p).unwrap();
        let t = term(&p, "x.y");
        let got = d.ruloids(&t, &Action::new("a"), Polarity::Positive).unwrap();
        assert_eq!(got.len(), 2, "{got:?}");
        let seq1 = rule_of(&p, &[("x", "a", "x1")], "x.y", "a", "x1.y");
        let seq2 = rule_of(&p, &[("x", "sqrt", "x1"), ("y", "a", "y1")], "x.y", "a", "y1");
        assert!(got.iter().any(|r| alpha_equal(&r.rule, &seq1)));
        assert!(got.iter().any(|r| alpha_equal(&r.rule, &seq2)));
        let neg = d.ruloids(&t, &Action::new("a"), Polarity::Negative).unwrap();
        assert!(!neg.is_empty());
        assert!(neg.iter().all(Ruloid::is_well_formed));
    }
}
