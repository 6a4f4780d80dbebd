use super::{flat_source, TransformError};
use crate::syntax::{canonical_fixing_as, Rule, Symbol, Term, Tss, Var};

/// The shared source `f(x1, ..., xn)` used for `f` after uniformization.
pub fn uniform_source(f: &Symbol, arity: usize) -> Term {
    flat_source(f, (1..=arity).map(|i| Var::new(format!("x{i}"))))
}

/// Renames each rule so that its source is [`uniform_source`] of its head and
/// the remaining variables are `y0, y1, ...` in canonical order.
pub fn uniformize(tss: &Tss) -> Result<Tss, TransformError> {
    let rules = tss.rules.iter().map(uniformize_rule).collect::<Result<Vec<_>, _>>()?;
    Ok(tss.with_rules(rules))
}

pub(crate) fn uniformize_rule(r: &Rule) -> Result<Rule, TransformError> {
    if !r.source().is_flat_pattern() {
        return Err(TransformError::NotNtytt(r.name.clone()));
    }
    let fixed = r
        .source()
        .args()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| Some((a.as_var()?.clone(), Var::new(format!("x{}", i + 1)))));
    Ok(canonical_fixing_as(r, fixed, "y"))
}

/// Checks that all rules headed by the same symbol share one source.
pub(crate) fn require_uniform(tss: &Tss) -> Result<(), TransformError> {
    let mut seen: Vec<(&Symbol, &Term)> = Vec::new();
    for r in &tss.rules {
        let Some(f) = r.source().head() else {
            return Err(TransformError::NotNtytt(r.name.clone()));
        };
        match seen.iter().find(|(g, _)| *g == f) {
            Some((_, src)) if *src != r.source() => return Err(TransformError::NotUniform(f.clone())),
            Some(_) => {}
            None => seen.push((f, r.source())),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::parse_tss;
    use crate::syntax::alpha_equal;

    #[test]
    fn sources_coincide_after_renaming() {
        let tss = parse_tss("sig c/0 f/2\nact a\nrule r1: x -a-> z |- f(x,y) -a-> z\nrule r2: w -a-> v |- f(u,w) -a-> v\n").unwrap();
        assert!(require_uniform(&tss).is_err());
        let u = uniformize(&tss).unwrap();
        require_uniform(&u).unwrap();
        assert_eq!(u.rules[0].source().to_string(), "f(x1,x2)");
        assert!(u.rules.iter().zip(&tss.rules).all(|(a, b)| alpha_equal(a, b)));
    }

    #[test]
    fn idempotent_on_fixtures() {
        for (name, _) in crate::fixtures::FIXTURES {
            let tss = load(name);
            if let Ok(u) = uniformize(&tss) {
                assert_eq!(uniformize(&u).unwrap(), u, "{name}");
            }
        }
    }
}
