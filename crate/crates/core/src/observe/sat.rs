use std::fmt;

use serde::Serialize;

use super::{Formula, ObserveError};
use crate::semantics::{LtsFragment, PairStatus};
use crate::syntax::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Indeterminate,
}

impl Truth {
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Indeterminate,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Indeterminate,
        }
    }

    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Indeterminate => Truth::Indeterminate,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Indeterminate => "indeterminate",
        })
    }
}

/// Satisfaction over a 3-valued fragment. A literal that is not
/// well-supported provable counts as not observed; only truncation by the
/// fragment bound makes the answer indeterminate.
pub fn satisfies(lts: &LtsFragment, p: &Term, f: &Formula) -> Result<Truth, ObserveError> {
    if f.has_negation() && !lts.relation.unknown.is_empty() {
        return Err(ObserveError::NegationOnThreeValued);
    }
    Ok(eval(lts, p, f))
}

fn eval(lts: &LtsFragment, p: &Term, f: &Formula) -> Truth {
    match f {
        Formula::Top => Truth::True,
        Formula::Cannot(a) => match lts.status(p, a) {
            PairStatus::Refused => Truth::True,
            PairStatus::Enabled | PairStatus::Unknown | PairStatus::Conflict => Truth::False,
            PairStatus::Truncated => Truth::Indeterminate,
        },
        Formula::Prefix(a, g) => {
            let found = lts.successors(p, a).fold(Truth::False, |acc, q| acc.or(eval(lts, q, g)));
            match (found, lts.status(p, a)) {
                (Truth::True, _) => Truth::True,
                (_, PairStatus::Truncated) => Truth::Indeterminate,
                (t, _) if lts.is_frontier(p) => t.or(Truth::Indeterminate),
                (t, _) => t,
            }
        }
        Formula::Conj(items) => items.iter().fold(Truth::True, |acc, g| acc.and(eval(lts, p, g))),
        Formula::Neg(g) => eval(lts, p, g).not(),
    }
}

/// Two-valued satisfaction; indeterminate answers become errors.
pub fn holds(lts: &LtsFragment, p: &Term, f: &Formula) -> Result<bool, ObserveError> {
    match satisfies(lts, p, f)? {
        Truth::Indeterminate => Err(ObserveError::Truncated(p.clone())),
        t => Ok(t == Truth::True),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::parse_term;
    use crate::semantics::build_lts;

    #[test]
    fn bpa_observations() {
        let tss = load("bpa");
        let p = parse_term("(a+b).c", &tss.signature).unwrap();
        let lts = build_lts(&tss, &[p.clone()], 4).unwrap();
        let f = |s: &str| s.parse::<Formula>().unwrap();
        assert_eq!(satisfies(&lts, &p, &f("<a>tt")).unwrap(), Truth::True);
        assert_eq!(satisfies(&lts, &p, &Formula::Top).unwrap(), Truth::True);
        assert_eq!(satisfies(&lts, &p, &f("<c>tt")).unwrap(), Truth::False);
        assert_eq!(satisfies(&lts, &p, &f("<a><c><sqrt>tt & no d")).unwrap(), Truth::True);
        assert_eq!(satisfies(&lts, &p, &f("not <b><c>no sqrt")).unwrap(), Truth::True);
    }

    #[test]
    fn truncation_is_indeterminate() {
        let tss = load("bpa");
        let p = parse_term("a.b.c", &tss.signature).unwrap();
        let lts = build_lts(&tss, &[p.clone()], 1).unwrap();
        let f = "<a><b><c>tt".parse::<Formula>().unwrap();
        assert_eq!(satisfies(&lts, &p, &f).unwrap(), Truth::Indeterminate);
        let lts = build_lts(&tss, &[p.clone()], 3).unwrap();
        assert_eq!(satisfies(&lts, &p, &f).unwrap(), Truth::True);
    }

    #[test]
    fn negation_needs_two_values() {
        let tss = crate::parse_tss("sig c/0\nact a\nrule r: c -/a-> |- c -a-> c").unwrap();
        let c = parse_term("c", &tss.signature).unwrap();
        let lts = build_lts(&tss, &[c.clone()], 1).unwrap();
        assert_eq!(satisfies(&lts, &c, &"no a".parse().unwrap()).unwrap(), Truth::False);
        assert_eq!(satisfies(&lts, &c, &"<a>tt".parse().unwrap()).unwrap(), Truth::False);
        assert_eq!(satisfies(&lts, &c, &"not <a>tt".parse().unwrap()), Err(ObserveError::NegationOnThreeValued));
    }
}
