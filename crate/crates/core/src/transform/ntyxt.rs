use super::{flat_source, Constructor, Provenance, TransformError};
use crate::format::classify;
use crate::syntax::{Fresh, Subst, Tss};

/// Replaces every rule with a variable source by one instance per function symbol.
pub fn remove_ntyxt(tss: &Tss) -> Result<Tss, TransformError> {
    remove_ntyxt_traced(tss).map(|(t, _)| t)
}

pub(crate) fn remove_ntyxt_traced(tss: &Tss) -> Result<(Tss, Vec<Provenance>), TransformError> {
    let mut rules = Vec::new();
    let mut prov = Vec::new();
    for r in &tss.rules {
        let c = classify(r);
        if !(c.ntyxt || c.ntyft) {
            return Err(TransformError::NotNtytt(r.name.clone()));
        }
        if !c.no_lookahead {
            return Err(TransformError::Lookahead(r.name.clone()));
        }
        let Some(x) = r.source().as_var() else {
            rules.push(r.clone());
            continue;
        };
        let mut fresh = Fresh::avoiding(&r.vars());
        for d in tss.signature.iter() {
            let args: Vec<_> = (0..d.arity).map(|_| fresh.var()).collect();
            let s: Subst = [(x.clone(), flat_source(&d.name, args))].into_iter().collect();
            let inst = s.apply_rule(r).with_name(format!("{}@{}", r.name, d.name));
            prov.push(Provenance { rule: inst.name.clone(), constructor: Constructor::Instantiate, origins: vec![r.name.clone()] });
            rules.push(inst);
        }
    }
    Ok((tss.with_rules(rules), prov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::format::classify;
    use crate::parse_tss;

    #[test]
    fn identity_rule_over_a_constant() {
        let out = remove_ntyxt(&load("no-free-variables")).unwrap();
        assert_eq!(out.rules.len(), 1);
        assert_eq!(out.rules[0].to_string(), "rule id@c: c -a-> y |- c -a-> y");
    }

    #[test]
    fn one_instance_per_symbol() {
        let tss = parse_tss("sig c/0 f/1\nact a\nrule id: x -a-> y |- x -a-> y\n").unwrap();
        let out = remove_ntyxt(&tss).unwrap();
        assert_eq!(out.rules.len(), 2);
        assert!(out.rules.iter().all(|r| classify(r).ntyft));
        assert_eq!(out.rules[1].source().head().unwrap().as_str(), "f");
    }

    #[test]
    fn ntyft_rules_pass_through_and_lookahead_is_rejected() {
        let bpa = load("bpa");
        assert_eq!(remove_ntyxt(&bpa).unwrap(), bpa);
        assert_eq!(remove_ntyxt(&load("no-lookahead")), Err(TransformError::Lookahead("f".into())));
    }
}
