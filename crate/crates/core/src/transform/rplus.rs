use std::collections::BTreeSet;

use super::uniform::{require_uniform, uniform_source};
use super::{require_decent_ntyft, require_standard, unique_names, Constructor, Provenance, TransformError};
use crate::format::classify;
use crate::syntax::{alpha_key, Fresh, Literal, Rule, Term, Tss};

pub const DEFAULT_PICK_CAP: u64 = 10_000;

/// Adds, for every symbol and action, the negative-conclusion rules obtained
/// by picking one premise from each applicable rule and denying it.
///
/// The input must be standard, decent, uniform and xynft.
pub fn rplus(tss: &Tss, cap: u64) -> Result<Tss, TransformError> {
    rplus_traced(tss, cap).map(|(t, _)| t)
}

/// [`rplus`] without the precondition checks. Only sources need to be function-headed.
pub fn rplus_unchecked(tss: &Tss, cap: u64) -> Result<Tss, TransformError> {
    build(tss, cap).map(|(t, _)| t)
}

pub(crate) fn rplus_traced(tss: &Tss, cap: u64) -> Result<(Tss, Vec<Provenance>), TransformError> {
    require_standard(tss)?;
    require_decent_ntyft(tss)?;
    if let Some(r) = tss.rules.iter().find(|r| !classify(r).xynft) {
        return Err(TransformError::NotXynft(r.name.clone()));
    }
    require_uniform(tss)?;
    build(tss, cap)
}

fn build(tss: &Tss, cap: u64) -> Result<(Tss, Vec<Provenance>), TransformError> {
    let mut fresh = Fresh::for_tss(tss);
    let mut added = Vec::new();
    let mut prov = Vec::new();
    for d in tss.signature.iter() {
        for a in &tss.actions {
            let applicable: Vec<&Rule> = tss.rules_for(&d.name, a).filter(|r| r.is_standard()).collect();
            let source: Term = applicable.first().map_or_else(|| uniform_source(&d.name, d.arity), |r| r.source().clone());
            if let Some(r) = applicable.iter().find(|r| r.source() != &source) {
                return Err(TransformError::NotUniform(r.source().head().cloned().unwrap_or_else(|| d.name.clone())));
            }
            let size = applicable.iter().fold(1u64, |n, r| n.saturating_mul(r.premises.len() as u64));
            if size > cap {
                return Err(TransformError::PickExplosion { symbol: d.name.clone(), action: a.to_string(), size, cap });
            }
            let choices: Vec<Vec<&Literal>> = applicable.iter().map(|r| r.premises.iter().collect()).collect();
            let origins: Vec<String> = applicable.iter().map(|r| r.name.clone()).collect();
            let mut seen = BTreeSet::new();
            let mut index = 0;
            for pick in product(&choices) {
                let premises: BTreeSet<Literal> = pick.into_iter().map(|l| deny(l, &mut fresh)).collect();
                let mut rule = Rule::new(format!("not-{}-{}", d.name, a), premises, Literal::neg(source.clone(), a.clone()));
                if !seen.insert(alpha_key(&rule)) {
                    continue;
                }
                index += 1;
                if index > 1 {
                    rule.name = format!("{}.{index}", rule.name);
                }
                prov.push(Provenance { rule: rule.name.clone(), constructor: Constructor::PickDeny, origins: origins.clone() });
                added.push(rule);
            }
        }
    }
    let mut rules = tss.rules.clone();
    let mut seen: BTreeSet<_> = rules.iter().map(alpha_key).collect();
    rules.extend(added.into_iter().filter(|r| seen.insert(alpha_key(r))));
    unique_names(&mut rules);
    Ok((tss.with_rules(rules), prov))
}

fn deny(l: &Literal, fresh: &mut Fresh) -> Literal {
    match l {
        Literal::Pos { source, action, .. } => Literal::neg(source.clone(), action.clone()),
        Literal::Neg { source, action } => Literal::pos(source.clone(), action.clone(), fresh.term()),
    }
}

/// Cartesian product; the product of no factors is the single empty choice.
fn product<'a, T>(factors: &[Vec<&'a T>]) -> Vec<Vec<&'a T>> {
    factors.iter().fold(vec![Vec::new()], |acc, f| {
        acc.iter()
            .flat_map(|prefix| {
                f.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(*x);
                    v
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::parse_tss;

    fn keys(rules: &[Rule]) -> BTreeSet<(Vec<Literal>, Literal)> {
        rules.iter().map(alpha_key).collect()
    }

    #[test]
    fn closure_example_adds_exactly_four_rules() {
        let tss = load("closure");
        let out = rplus(&tss, DEFAULT_PICK_CAP).unwrap();
        let want = parse_tss(
            "sig c/0 f/2\nact a b\n\
             rule n1: |- c -/b->\n\
             rule n2: |- f(x1,x2) -/a->\n\
             rule n3: x1 -/a->, x2 -/a-> |- f(x1,x2) -/b->\n\
             rule n4: x1 -/a->, x1 -b-> z |- f(x1,x2) -/b->\n",
        )
        .unwrap();
        let added: Vec<Rule> = out.rules.iter().filter(|r| !r.is_standard()).cloned().collect();
        assert_eq!(keys(&added), keys(&want.rules));
        let kept: Vec<Rule> = out.rules.iter().filter(|r| r.is_standard()).cloned().collect();
        assert_eq!(keys(&kept), keys(&tss.rules));
    }

    #[test]
    fn empty_specification_gets_one_axiom() {
        let tss = parse_tss("sig c/0\nact a\n").unwrap();
        let out = rplus(&tss, DEFAULT_PICK_CAP).unwrap();
        assert_eq!(out.rules.len(), 1);
        assert_eq!(out.rules[0].conclusion.to_string(), "c -/a->");
    }

    #[test]
    fn free_variables_are_rejected() {
        let e = rplus(&load("decency-needed"), DEFAULT_PICK_CAP).unwrap_err();
        assert!(matches!(e, TransformError::FreeVariables { .. }));
        let naive = rplus_unchecked(&load("decency-needed"), DEFAULT_PICK_CAP).unwrap();
        assert_eq!(naive.rules.iter().filter(|r| !r.is_standard()).count(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let e = rplus(&load("closure"), 1).unwrap_err();
        assert!(matches!(e, TransformError::PickExplosion { size: 2, .. }));
    }
}
