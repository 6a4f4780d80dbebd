use std::collections::BTreeSet;

use serde::Serialize;

use crate::syntax::{Rule, Term, Var};

/// Syntactic shape of a single rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RuleClass {
    pub ntytt: bool,
    pub ntyxt: bool,
    pub ntyft: bool,
    pub nxytt: bool,
    pub nxyft: bool,
    pub xyntt: bool,
    pub xynft: bool,
    pub no_lookahead: bool,
    pub no_free_vars: bool,
    pub decent: bool,
    pub standard: bool,
}

/// Premise targets are distinct variables not occurring in the source.
pub fn is_ntytt(r: &Rule) -> bool {
    let source = r.source_vars();
    let mut seen = BTreeSet::new();
    r.positive_premises().all(|p| match p.target().and_then(Term::as_var) {
        Some(v) => !source.contains(v) && seen.insert(v.clone()),
        None => false,
    })
}

/// No variable of a premise target occurs in a premise source.
pub fn has_no_lookahead(r: &Rule) -> bool {
    r.rhs_vars().is_disjoint(&r.lhs_vars())
}

pub fn classify(r: &Rule) -> RuleClass {
    let ntytt = is_ntytt(r);
    let src = r.source();
    let ntyxt = ntytt && src.is_var();
    let ntyft = ntytt && src.is_flat_pattern();
    let all_lhs_vars = r.premises.iter().all(|p| p.source().is_var());
    let pos_lhs_vars = r.positive_premises().all(|p| p.source().is_var());
    let no_lookahead = has_no_lookahead(r);
    let no_free_vars = r.free_vars().is_empty();
    RuleClass {
        ntytt,
        ntyxt,
        ntyft,
        nxytt: ntytt && all_lhs_vars,
        nxyft: ntyft && all_lhs_vars,
        xyntt: ntytt && pos_lhs_vars,
        xynft: ntyft && pos_lhs_vars,
        no_lookahead,
        no_free_vars,
        decent: no_lookahead && no_free_vars,
        standard: r.is_standard(),
    }
}

/// Decency in its direct form: premise sources only use source variables, and
/// for positive rules the target only uses source and premise-target variables.
pub fn decent_direct(r: &Rule) -> bool {
    let src = r.source_vars();
    if !r.lhs_vars().is_subset(&src) {
        return false;
    }
    match r.target() {
        None => true,
        Some(t) => {
            let allowed: BTreeSet<Var> = src.union(&r.rhs_vars()).cloned().collect();
            t.vars().is_subset(&allowed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Literal;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn identity_rule_is_ntyxt_and_nxytt() {
        let r = Rule::new("r", [Literal::pos(v("x"), "a", v("y"))], Literal::pos(v("x"), "a", v("y")));
        let c = classify(&r);
        assert!(c.ntyxt && c.nxytt && c.decent && !c.ntyft);
    }

    #[test]
    fn lookahead_rule() {
        let r = Rule::new(
            "r",
            [Literal::pos(v("x"), "b", v("y1")), Literal::pos(v("y1"), "c", v("y2"))],
            Literal::pos(Term::app("f", vec![v("x")]), "a", Term::constant("delta")),
        );
        let c = classify(&r);
        assert!(c.ntyft && c.xynft && c.nxyft && !c.no_lookahead && !c.decent);
    }

    #[test]
    fn repeated_source_variable_is_not_ntyft() {
        let r = Rule::new("r", [], Literal::pos(Term::app("g", vec![v("x"), v("x")]), "a", v("x")));
        let c = classify(&r);
        assert!(c.ntytt && !c.ntyft);
    }
}
