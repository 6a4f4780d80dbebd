use std::collections::BTreeSet;

use serde::Serialize;

use super::inverse::Decomposition;
use super::ruloids::Decomposer;
use super::DecomposeError;
use crate::format::Format;
use crate::observe::{satisfies, Formula, Sublanguage, Truth};
use crate::semantics::build_lts;
use crate::syntax::{Subst, Term, Tss, Var};

/// Cap on the number of substitutions tried by [`check_inverse_images`].
pub const MAX_SUBSTITUTIONS: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InverseMismatch {
    pub sigma: Vec<(Var, Term)>,
    /// Whether the instance of `t` satisfies the formula.
    pub direct: bool,
    /// Whether some decomposition is satisfied variable by variable.
    pub decomposed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InverseCheck {
    pub decompositions: usize,
    pub checked: usize,
    pub inconclusive: usize,
    pub mismatch: Option<InverseMismatch>,
}

impl InverseCheck {
    pub fn agrees(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares `σ(t) ⊨ f` with the decomposition side for every `σ` from the
/// variables of `t` into `universe`, over a fragment grown to `depth`.
pub fn check_inverse_images(p: &Tss, t: &Term, f: &Formula, universe: &[Term], depth: usize) -> Result<InverseCheck, DecomposeError> {
    let decomps = Decomposer::new(p)?.inverse(t, f)?;
    let vars: Vec<Var> = t.vars().into_iter().collect();
    let total = universe.len().checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
    if total > MAX_SUBSTITUTIONS {
        return Err(DecomposeError::Explosion { what: "substitution space", cap: MAX_SUBSTITUTIONS });
    }
    let mut sigmas = Vec::with_capacity(total);
    if universe.is_empty() && !vars.is_empty() {
        return Ok(InverseCheck { decompositions: decomps.len(), checked: 0, inconclusive: 0, mismatch: None });
    }
    let mut pick = vec![0usize; vars.len()];
    loop {
        let s: Subst = vars.iter().cloned().zip(pick.iter().map(|&i| universe[i].clone())).collect();
        sigmas.push(s);
        if !super::odometer(&mut pick, |_| universe.len()) {
            break;
        }
    }
    let mut roots: BTreeSet<Term> = universe.iter().cloned().collect();
    roots.extend(sigmas.iter().map(|s| s.apply(t)));
    let roots: Vec<Term> = roots.into_iter().collect();
    let lts = build_lts(p, &roots, depth)?;
    let f = f.normalize();
    let mut out = InverseCheck { decompositions: decomps.len(), checked: 0, inconclusive: 0, mismatch: None };
    for s in sigmas {
        let direct = satisfies(&lts, &s.apply(t), &f)?;
        let decomposed = decomposed_truth(&lts, &decomps, &vars, &s)?;
        match (direct, decomposed) {
            (Truth::Indeterminate, _) | (_, Truth::Indeterminate) => out.inconclusive += 1,
            (l, r) => {
                out.checked += 1;
                if l != r {
                    out.mismatch = Some(InverseMismatch {
                        sigma: vars.iter().map(|v| (v.clone(), s.apply(&Term::Var(v.clone())))).collect(),
                        direct: l == Truth::True,
                        decomposed: r == Truth::True,
                    });
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

fn decomposed_truth(lts: &crate::semantics::LtsFragment, decomps: &[Decomposition], vars: &[Var], s: &Subst) -> Result<Truth, DecomposeError> {
    let mut any = Truth::False;
    for d in decomps {
        let mut all = Truth::True;
        for x in vars {
            all = all.and(satisfies(lts, &s.apply(&Term::Var(x.clone())), &d.get(x))?);
            if all == Truth::False {
                break;
            }
        }
        any = any.or(all);
        if any == Truth::True {
            break;
        }
    }
    Ok(any)
}

/// The conjunctive languages a format is expected to preserve under decomposition.
pub fn format_tags(fmt: Format) -> Vec<Sublanguage> {
    use Sublanguage::*;
    let chain = [RS, RT.conjunctive(), R.conjunctive(), FT.conjunctive(), F.conjunctive()];
    let n = match fmt {
        Format::ReadySimulation => 1,
        Format::ReadyTrace => 2,
        Format::Readiness => 3,
        Format::FailureTrace => 5,
        Format::PartialTrace => return vec![T.conjunctive()],
        _ => 0,
    };
    chain.into_iter().take(n).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreservationEntry {
    pub decomposition: usize,
    pub var: Var,
    pub formula: Formula,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub tag: Sublanguage,
    /// Whether the decomposed formula itself lies in the language.
    pub formula_in_tag: bool,
    pub decompositions: usize,
    pub entries: Vec<PreservationEntry>,
}

impl PreservationReport {
    pub fn violations(&self) -> impl Iterator<Item = &PreservationEntry> {
        self.entries.iter().filter(|e| !e.ok)
    }

    pub fn preserved(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }
}

/// Decomposes `f` through `t` and checks every resulting formula against `tag`.
pub fn preservation_report(p: &Tss, tag: &Sublanguage, t: &Term, f: &Formula) -> Result<PreservationReport, DecomposeError> {
    let mut d = Decomposer::new(p)?;
    let actions = d.plus().actions.clone();
    let decomps = d.inverse(t, f)?;
    let mut entries = Vec::new();
    for (i, psi) in decomps.iter().enumerate() {
        for x in t.vars() {
            let formula = psi.get(&x);
            let ok = tag.contains(&formula, &actions);
            entries.push(PreservationEntry { decomposition: i, var: x, formula, ok });
        }
    }
    Ok(PreservationReport { tag: tag.clone(), formula_in_tag: tag.contains(&f.normalize(), &actions), decompositions: decomps.len(), entries })
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
    fn inverse_images_on_the_inverse_example() {
        let p = load("inverse");
        let t = parse_term("f(f(x))", &p.signature).unwrap();
        let universe: Vec<Term> = ["c", "f(c)", "f(f(c))"].iter().map(|s| parse_term(s, &p.signature).unwrap()).collect();
        for f in ["<b><a>tt", "tt", "<a>tt", "no a", "<b>tt & no a", "<a><b>(no a & no b)"] {
            let got = check_inverse_images(&p, &t, &formula(f), &universe, 6).unwrap();
            assert!(got.agrees(), "{f}: {got:?}");
            assert_eq!(got.checked, 3, "{f}");
        }
    }

    #[test]
    fn inverse_images_on_bpa_sums_and_sequences() {
        let p = load("bpa");
        let universe: Vec<Term> = ["a", "b.c", "a+b", "eps", "delta", "a.b+a"].iter().map(|s| parse_term(s, &p.signature).unwrap()).collect();
        for (t, f) in [("x+y", "<a>no b"), ("x.y", "<a><b>tt"), ("x.y", "<b><c>no c"), ("x.(y+x)", "<a>(<b>tt & no c)"), ("x.y", "no a & <sqrt>tt")] {
            let t = parse_term(t, &p.signature).unwrap();
            let got = check_inverse_images(&p, &t, &formula(f), &universe, 8).unwrap();
            assert!(got.agrees(), "{t} {f}: {got:?}");
            assert!(got.checked > 0);
        }
    }

    #[test]
    fn preservation_on_priority_through_theta() {
        let p = load("priority");
        let t = parse_term("th(x)", &p.signature).unwrap();
        let tag = Sublanguage::RT.conjunctive();
        for f in ["<a>(no b & <c>tt)", "<b>tt & no c & <a>tt", "<c><a>no b"] {
            let rep = preservation_report(&p, &tag, &t, &formula(f)).unwrap();
            assert!(rep.formula_in_tag);
            assert!(rep.preserved(), "{f}: {:?}", rep.violations().collect::<Vec<_>>());
        }
        let rep = preservation_report(&p, &tag, &t, &Formula::Top).unwrap();
        assert_eq!(rep.entries.len(), 1);
        assert_eq!(rep.entries[0].formula, Formula::Top);
    }

    #[test]
    fn readiness_is_not_preserved_by_ex3() {
        let p = load("ex3");
        let t = Term::app("f", vec![Term::var("x")]);
        let tag = Sublanguage::R.conjunctive();
        let found = ["<a><b><c><d>tt", "<a><b>(<c>tt & no d)", "<a><b><c>tt", "<a><b><d>tt", "<a>(<b>tt & no c)"].iter().any(|f| {
            let rep = preservation_report(&p, &tag, &t, &formula(f)).unwrap();
            rep.formula_in_tag && !rep.preserved()
        });
        assert!(found);
    }

    #[test]
    fn format_tags_nest() {
        assert_eq!(format_tags(Format::ReadySimulation), vec![Sublanguage::RS]);
        assert_eq!(format_tags(Format::FailureTrace).len(), 5);
        assert!(format_tags(Format::Gsos).is_empty());
    }
}
