use std::collections::BTreeSet;

use super::sat::holds;
use super::sim::{sim_holds, SimKind};
use super::traces::{decorated_traces, included, DecoratedKind};
use super::{Formula, ObserveError, Sublanguage};
use crate::semantics::{LtsFragment, PairStatus};
use crate::syntax::{Action, Term};

/// Cap on the total size of generated observations.
pub const MAX_OBSERVATION_SIZE: usize = 2_000_000;

/// Decides `p ⊑ q` for the preorder belonging to `n`, from decorated traces
/// up to `depth` actions or from the largest simulation of the right kind.
pub fn preorder_holds(lts: &LtsFragment, p: &Term, q: &Term, n: &Sublanguage, depth: usize) -> Result<bool, ObserveError> {
    let traces = |kind| -> Result<bool, ObserveError> {
        Ok(included(kind, &decorated_traces(lts, p, kind, depth)?, &decorated_traces(lts, q, kind, depth)?))
    };
    match n {
        Sublanguage::T => traces(DecoratedKind::Trace),
        Sublanguage::CT => Ok(traces(DecoratedKind::Trace)? && traces(DecoratedKind::Completed)?),
        Sublanguage::F => traces(DecoratedKind::FailurePair),
        Sublanguage::R => traces(DecoratedKind::ReadyPair),
        Sublanguage::FT => traces(DecoratedKind::FailureTrace),
        Sublanguage::RT => traces(DecoratedKind::ReadyTrace),
        Sublanguage::Nested(k) => sim_holds(lts, p, q, SimKind::Nested(*k)),
        Sublanguage::RS => sim_holds(lts, p, q, SimKind::Ready),
        Sublanguage::B => sim_holds(lts, p, q, SimKind::Bisimulation),
        Sublanguage::Conjunctive(inner) => preorder_holds(lts, p, q, inner, depth),
        Sublanguage::TracesWithRefusals => {
            let refused = |s: &Term| -> Result<BTreeSet<Action>, ObserveError> { Ok(decided(lts, s)?.1) };
            Ok(traces(DecoratedKind::Trace)? && refused(p)?.is_subset(&refused(q)?))
        }
    }
}

/// Decides `p ⊑ q` by checking that `q` satisfies every observation of `p`.
pub fn preorder_modal(lts: &LtsFragment, p: &Term, q: &Term, n: &Sublanguage, depth: usize) -> Result<bool, ObserveError> {
    for f in observations(lts, p, n, depth)? {
        if !holds(lts, q, &f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// As [`preorder_modal`], with the observations of `p` conjoined into one formula.
pub fn preorder_modal_conjunctive(lts: &LtsFragment, p: &Term, q: &Term, n: &Sublanguage, depth: usize) -> Result<bool, ObserveError> {
    holds(lts, q, &Formula::and(observations(lts, p, n, depth)?))
}

/// Ready and refused actions of `q`; undecided pairs fall in neither.
fn decided(lts: &LtsFragment, q: &Term) -> Result<(BTreeSet<Action>, BTreeSet<Action>), ObserveError> {
    if lts.is_frontier(q) {
        return Err(ObserveError::Truncated(q.clone()));
    }
    let mut ready = BTreeSet::new();
    let mut refused = BTreeSet::new();
    for a in &lts.actions {
        match lts.status(q, a) {
            PairStatus::Enabled => {
                ready.insert(a.clone());
            }
            PairStatus::Refused => {
                refused.insert(a.clone());
            }
            PairStatus::Unknown => {}
            PairStatus::Truncated => return Err(ObserveError::Truncated(q.clone())),
            PairStatus::Conflict => return Err(ObserveError::Incomplete(q.clone(), a.clone())),
        }
    }
    Ok((ready, refused))
}

fn refusals(set: &BTreeSet<Action>) -> impl Iterator<Item = Formula> + '_ {
    set.iter().map(|a| Formula::Cannot(a.clone()))
}

fn readies(set: &BTreeSet<Action>) -> impl Iterator<Item = Formula> + '_ {
    set.iter().map(|a| Formula::prefix(a.clone(), Formula::Top))
}

struct Gen<'a> {
    lts: &'a LtsFragment,
    budget: usize,
}

impl Gen<'_> {
    fn spend(&mut self, f: Formula) -> Result<Formula, ObserveError> {
        let size = f.size();
        if size > self.budget {
            return Err(ObserveError::Blowup { cap: MAX_OBSERVATION_SIZE });
        }
        self.budget -= size;
        Ok(f)
    }

    fn steps(&self, q: &Term, ready: &BTreeSet<Action>) -> Vec<(Action, Term)> {
        ready.iter().flat_map(|a| self.lts.successors(q, a).map(move |r| (a.clone(), r.clone()))).collect()
    }

    /// Observations along paths: `here` is what a state shows on its own,
    /// `carry` whether that stays conjoined to the continuation.
    fn along(&mut self, q: &Term, d: usize, n: &Sublanguage) -> Result<Vec<Formula>, ObserveError> {
        if d == 0 && *n == Sublanguage::T {
            return Ok(vec![Formula::Top]);
        }
        let (ready, refused) = decided(self.lts, q)?;
        let here: Option<Formula> = match n {
            Sublanguage::T => None,
            Sublanguage::CT => (ready.is_empty() && refused.len() == self.lts.actions.len()).then(|| Formula::and(refusals(&refused))),
            Sublanguage::F | Sublanguage::FT => Some(Formula::and(refusals(&refused))),
            _ => Some(Formula::and(refusals(&refused).chain(readies(&ready)))),
        };
        let carry = matches!(n, Sublanguage::FT | Sublanguage::RT);
        let mut out = vec![Formula::Top];
        out.extend(here.clone());
        if d > 0 {
            for (a, r) in self.steps(q, &ready) {
                for phi in self.along(&r, d - 1, n)? {
                    let step = Formula::prefix(a.clone(), phi);
                    let f = match (&here, carry) {
                        (Some(h), true) => Formula::and([h.clone(), step]),
                        _ => step,
                    };
                    out.push(self.spend(f)?);
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn chi(&mut self, q: &Term, d: usize, kind: SimKind) -> Result<Formula, ObserveError> {
        if d == 0 && kind != SimKind::Ready {
            return Ok(Formula::Top);
        }
        let (ready, refused) = decided(self.lts, q)?;
        let mut parts = Vec::new();
        if kind == SimKind::Ready {
            parts.extend(refusals(&refused));
        }
        if d > 0 {
            for (a, r) in self.steps(q, &ready) {
                parts.push(Formula::prefix(a, self.chi(&r, d - 1, kind)?));
            }
        }
        match kind {
            SimKind::Nested(n) if n >= 2 => {
                for psi in self.weakest_failing(q, d, n - 1)? {
                    parts.push(Formula::neg(psi));
                }
            }
            SimKind::Bisimulation => {
                for a in self.lts.actions.clone() {
                    let mut none = Vec::new();
                    for r in self.lts.successors(q, &a).cloned().collect::<Vec<_>>() {
                        none.push(Formula::neg(self.chi(&r, d - 1, kind)?));
                    }
                    parts.push(Formula::neg(Formula::prefix(a, Formula::and(none))));
                }
            }
            _ => {}
        }
        let f = Formula::and(parts);
        self.spend(f)
    }

    /// The weakest n-nested simulation formulas of depth at most `d` that `q` fails.
    fn weakest_failing(&mut self, q: &Term, d: usize, n: u32) -> Result<Vec<Formula>, ObserveError> {
        let mut out = Vec::new();
        if n >= 2 {
            out.push(Formula::neg(self.chi(q, d, SimKind::Nested(n - 1))?));
        }
        if d == 0 {
            return Ok(out);
        }
        decided(self.lts, q)?;
        for a in self.lts.actions.clone() {
            let succ: Vec<Term> = self.lts.successors(q, &a).cloned().collect();
            let mut combos: Vec<Vec<Formula>> = vec![Vec::new()];
            for r in &succ {
                let options = self.weakest_failing(r, d - 1, n)?;
                let mut next = Vec::new();
                for c in &combos {
                    for o in &options {
                        let mut c = c.clone();
                        c.push(o.clone());
                        next.push(c);
                    }
                }
                combos = next;
                if combos.len() > MAX_OBSERVATION_SIZE {
                    return Err(ObserveError::Blowup { cap: MAX_OBSERVATION_SIZE });
                }
            }
            for c in combos {
                let f = Formula::prefix(a.clone(), Formula::and(c));
                out.push(self.spend(f)?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// A finite set of observations of `p` in the language of `n` with at most
/// `depth` nested actions, such that every observation of `p` of that
/// depth follows from one of them.
pub fn observations(lts: &LtsFragment, p: &Term, n: &Sublanguage, depth: usize) -> Result<Vec<Formula>, ObserveError> {
    let mut g = Gen { lts, budget: MAX_OBSERVATION_SIZE };
    let out = match n {
        Sublanguage::Conjunctive(inner) => return observations(lts, p, inner, depth),
        Sublanguage::TracesWithRefusals => {
            let mut out = g.along(p, depth, &Sublanguage::T)?;
            out.push(Formula::and(refusals(&decided(lts, p)?.1)));
            out
        }
        Sublanguage::CT => {
            let mut out = g.along(p, depth, &Sublanguage::T)?;
            out.extend(g.along(p, depth, n)?);
            out
        }
        Sublanguage::T | Sublanguage::F | Sublanguage::R | Sublanguage::FT | Sublanguage::RT => g.along(p, depth, n)?,
        Sublanguage::Nested(k) => vec![g.chi(p, depth, SimKind::Nested(*k))?],
        Sublanguage::RS => vec![g.chi(p, depth, SimKind::Ready)?],
        Sublanguage::B => vec![g.chi(p, depth, SimKind::Bisimulation)?],
    };
    let mut out: Vec<Formula> = out.into_iter().map(|f| f.normalize()).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::parse_term;
    use crate::semantics::build_lts;

    fn setup(srcs: &[&str], depth: usize) -> (LtsFragment, Vec<Term>) {
        let tss = load("bpa");
        let roots: Vec<Term> = srcs.iter().map(|s| parse_term(s, &tss.signature).unwrap()).collect();
        (build_lts(&tss, &roots, depth).unwrap(), roots)
    }

    fn lang(s: &str) -> Sublanguage {
        s.parse().unwrap()
    }

    const ALL: [&str; 12] = ["T", "CT", "F", "R", "FT", "RT", "1S", "2S", "3S", "RS", "B", "T^~"];

    #[test]
    fn readiness_equal_pair() {
        let (lts, r) = setup(&["a.(b+c.d)+a.c", "a.(b+c)+a.c.d"], 8);
        for n in ["R", "F"] {
            assert!(preorder_holds(&lts, &r[0], &r[1], &lang(n), 5).unwrap(), "{n}");
            assert!(preorder_holds(&lts, &r[1], &r[0], &lang(n), 5).unwrap(), "{n}");
        }
        assert!(!preorder_holds(&lts, &r[1], &r[0], &lang("RT"), 5).unwrap());
    }

    #[test]
    fn failure_trace_equal_pair() {
        let (lts, r) = setup(&["a.(b+c)+a.b+a.c", "a.b+a.c"], 8);
        for n in ["FT", "F"] {
            assert!(preorder_holds(&lts, &r[0], &r[1], &lang(n), 5).unwrap(), "{n}");
            assert!(preorder_holds(&lts, &r[1], &r[0], &lang(n), 5).unwrap(), "{n}");
        }
        assert!(!preorder_holds(&lts, &r[0], &r[1], &lang("R"), 5).unwrap());
    }

    #[test]
    fn reflexive_and_modal_agreement() {
        let srcs = ["a.(b+c.d)+a.c", "a.(b+c)+a.c.d", "a.(b+c)+a.b+a.c", "a.b+a.c", "a.(b.c+b.d)", "a.b.c+a.b.d", "delta", "a+a.b"];
        let (lts, r) = setup(&srcs, 8);
        for n in ALL {
            for p in &r {
                assert!(preorder_holds(&lts, p, p, &lang(n), 5).unwrap(), "{n} {p}");
                for q in &r {
                    let by_def = preorder_holds(&lts, p, q, &lang(n), 5).unwrap();
                    let modal = preorder_modal(&lts, p, q, &lang(n), 5).unwrap();
                    assert_eq!(by_def, modal, "{n}: {p} vs {q}");
                    assert_eq!(modal, preorder_modal_conjunctive(&lts, p, q, &lang(n), 5).unwrap(), "{n}");
                }
            }
        }
    }

    #[test]
    fn observations_belong_to_their_language() {
        let (lts, r) = setup(&["a.(b+c.d)+a.c", "a+a.b"], 8);
        for n in ALL {
            for p in &r {
                for f in observations(&lts, p, &lang(n), 4).unwrap() {
                    assert!(lang(n).contains(&f, &lts.actions), "{n}: {f}");
                    assert!(holds(&lts, p, &f).unwrap(), "{n}: {f}");
                }
            }
        }
    }

    #[test]
    fn depth_zero_sees_only_tt() {
        let (lts, r) = setup(&["a", "b"], 3);
        assert_eq!(observations(&lts, &r[0], &lang("T"), 0).unwrap(), vec![Formula::Top]);
        assert!(preorder_modal(&lts, &r[0], &r[1], &lang("T"), 0).unwrap());
    }
}
