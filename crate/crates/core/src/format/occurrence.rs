use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::lambda::{liquid_occurrence, positions_along, ArgPos, Lambda};
use crate::syntax::{Path, Rule, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Site {
    Source,
    Target,
    /// Occurrence inside the source of premise number `premise` (in set order).
    Premise { premise: usize, positive: bool, feeds_target: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Occurrence {
    pub var: Var,
    pub site: Site,
    pub path: Path,
    pub liquid: bool,
    /// Argument positions crossed from the root of the enclosing term.
    #[serde(skip)]
    pub positions: Vec<ArgPos>,
}

impl Occurrence {
    pub fn is_propagated(&self) -> bool {
        match self.site {
            Site::Target => true,
            Site::Premise { positive, feeds_target, .. } => positive && feeds_target,
            Site::Source => false,
        }
    }

    pub fn is_polled(&self) -> bool {
        matches!(self.site, Site::Premise { .. }) && !self.is_propagated()
    }

    pub fn in_negative_premise(&self) -> bool {
        matches!(self.site, Site::Premise { positive: false, .. })
    }
}

/// Where each variable of a rule occurs, relative to a choice of liquid positions.
#[derive(Clone, Debug, Serialize)]
pub struct OccurrenceReport {
    pub floating: BTreeSet<Var>,
    pub occurrences: Vec<Occurrence>,
}

impl OccurrenceReport {
    pub fn new(rule: &Rule, lambda: &Lambda) -> OccurrenceReport {
        let mut occurrences = Vec::new();
        let push = |term: &Term, site: Site, out: &mut Vec<Occurrence>| {
            for (path, var) in term.var_occurrences() {
                out.push(Occurrence {
                    var,
                    site: site.clone(),
                    liquid: liquid_occurrence(term, &path, lambda),
                    positions: positions_along(term, &path),
                    path,
                });
            }
        };
        push(rule.source(), Site::Source, &mut occurrences);
        let target_vars = rule.target().map(Term::vars).unwrap_or_default();
        if let Some(t) = rule.target() {
            push(t, Site::Target, &mut occurrences);
        }
        for (i, p) in rule.premises.iter().enumerate() {
            let feeds_target = p.target().is_some_and(|t| !t.vars().is_disjoint(&target_vars));
            push(p.source(), Site::Premise { premise: i, positive: p.is_positive(), feeds_target }, &mut occurrences);
        }

        let rhs = rule.rhs_vars();
        let mut source_counts: BTreeMap<&Var, (usize, bool)> = BTreeMap::new();
        for o in occurrences.iter().filter(|o| o.site == Site::Source) {
            let e = source_counts.entry(&o.var).or_insert((0, true));
            e.0 += 1;
            e.1 &= o.liquid;
        }
        let mut floating: BTreeSet<Var> = rhs;
        for (v, (n, liquid)) in source_counts {
            if n == 1 && liquid {
                floating.insert(v.clone());
            }
        }
        OccurrenceReport { floating, occurrences }
    }

    pub fn propagated<'a>(&'a self, v: &'a Var) -> impl Iterator<Item = &'a Occurrence> + 'a {
        self.occurrences.iter().filter(move |o| &o.var == v && o.is_propagated())
    }

    pub fn polled<'a>(&'a self, v: &'a Var) -> impl Iterator<Item = &'a Occurrence> + 'a {
        self.occurrences.iter().filter(move |o| &o.var == v && o.is_polled())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Literal;

    #[test]
    fn propagation_through_premises() {
        // x -a-> y, x -/b-> |- th(x) -a-> th(y)
        let x = Term::var("x");
        let r = Rule::new(
            "r",
            [Literal::pos(x.clone(), "a", Term::var("y")), Literal::neg(x.clone(), "b")],
            Literal::pos(Term::app("th", vec![x.clone()]), "a", Term::app("th", vec![Term::var("y")])),
        );
        let lambda: Lambda = [ArgPos::new("th", 0)].into_iter().collect();
        let rep = OccurrenceReport::new(&r, &lambda);
        let xv = Var::new("x");
        assert!(rep.floating.contains(&xv) && rep.floating.contains(&Var::new("y")));
        assert_eq!(rep.propagated(&xv).count(), 1);
        assert_eq!(rep.polled(&xv).count(), 1);
        assert!(rep.polled(&xv).all(Occurrence::in_negative_premise));
        let frozen = OccurrenceReport::new(&r, &Lambda::empty());
        assert!(!frozen.floating.contains(&xv));
    }
}
