use super::{Constructor, Provenance, TransformError};
use crate::format::classify;
use crate::syntax::{Subst, Term, Tss};

/// Instantiates the free variables of every rule over `universe`.
///
/// Rules without free variables pass through. When anything is instantiated the
/// result is marked universe-relative.
pub fn ground_free_vars(tss: &Tss, universe: &[Term]) -> Result<Tss, TransformError> {
    ground_traced(tss, Some(universe)).map(|(t, _)| t)
}

pub(crate) fn ground_traced(tss: &Tss, universe: Option<&[Term]>) -> Result<(Tss, Vec<Provenance>), TransformError> {
    for u in universe.unwrap_or_default() {
        if !u.is_closed() || !tss.signature.well_formed(u) {
            return Err(TransformError::BadUniverseTerm(u.clone()));
        }
    }
    let mut rules = Vec::new();
    let mut prov = Vec::new();
    let mut grounded = false;
    for r in &tss.rules {
        let c = classify(r);
        if !c.ntyft {
            return Err(TransformError::NotNtytt(r.name.clone()));
        }
        if !c.no_lookahead {
            return Err(TransformError::Lookahead(r.name.clone()));
        }
        let free: Vec<_> = r.free_vars().into_iter().collect();
        if free.is_empty() {
            rules.push(r.clone());
            continue;
        }
        let universe = universe.ok_or_else(|| TransformError::NoUniverse(r.name.clone()))?;
        if universe.is_empty() {
            return Err(TransformError::EmptyUniverse(r.name.clone()));
        }
        grounded = true;
        let mut choice = vec![0usize; free.len()];
        loop {
            let s: Subst = free.iter().cloned().zip(choice.iter().map(|&i| universe[i].clone())).collect();
            let tag: Vec<String> = free.iter().zip(&choice).map(|(v, &i)| format!("{v}={}", universe[i])).collect();
            let name = format!("{}{{{}}}", r.name, tag.join(",")).replace(' ', "");
            prov.push(Provenance { rule: name.clone(), constructor: Constructor::Instantiate, origins: vec![r.name.clone()] });
            rules.push(s.apply_rule(r).with_name(name));
            if !advance(&mut choice, universe.len()) {
                break;
            }
        }
    }
    let mut out = tss.with_rules(rules);
    out.universe_relative |= grounded;
    Ok((out, prov))
}

/// Odometer step over `len`-ary digits; false once every combination was produced.
pub(crate) fn advance(digits: &mut [usize], len: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < len {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::{parse_term, parse_tss};

    #[test]
    fn decent_specifications_are_unchanged() {
        let bpa = load("bpa");
        let out = ground_free_vars(&bpa, &[]).unwrap();
        assert_eq!(out, bpa);
    }

    #[test]
    fn free_premise_source_is_instantiated() {
        let tss = load("no-free-variables-free");
        let c = parse_term("c", &tss.signature).unwrap();
        let out = ground_free_vars(&tss, &[c]).unwrap();
        assert!(out.universe_relative);
        assert_eq!(out.rules.len(), 1);
        let r = &out.rules[0];
        assert_eq!(format!("{} |- {}", r.premises.iter().next().unwrap(), r.conclusion), "c -a-> y |- c -a-> c");
    }

    #[test]
    fn two_free_variables_over_three_terms() {
        let tss = parse_tss("sig c/0 d/0 e/0\nact a\nrule r: x -/a->, z -/a-> |- c -a-> c\n").unwrap();
        let u: Vec<Term> = ["c", "d", "e"].iter().map(|s| parse_term(s, &tss.signature).unwrap()).collect();
        assert_eq!(ground_free_vars(&tss, &u).unwrap().rules.len(), 9);
        assert_eq!(ground_free_vars(&tss, &[]), Err(TransformError::EmptyUniverse("r".into())));
    }
}
