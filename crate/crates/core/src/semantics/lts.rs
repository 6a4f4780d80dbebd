use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::eval::Rel;
use super::ground::{ground_program, GroundOptions, GroundProgram};
use super::provable::{relation, ws_provable, Notion};
use super::{Pair, SemanticsError};
use crate::syntax::{Action, Literal, Term, Tss};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairStatus {
    Enabled,
    Refused,
    Unknown,
    /// Undetermined because the fragment was cut off.
    Truncated,
    /// Both enabled and refused; only standard provability over a bad rule set gets here.
    Conflict,
}

/// A 3-valued transition relation over a bounded universe.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TransitionRelation3 {
    pub positive: BTreeSet<(Term, Action, Term)>,
    pub negative: BTreeSet<Pair>,
    pub unknown: BTreeSet<Pair>,
    pub truncated: BTreeSet<Pair>,
    #[serde(skip)]
    succ: BTreeMap<Pair, BTreeSet<Term>>,
}

impl TransitionRelation3 {
    pub(crate) fn assemble(g: &GroundProgram, pos: &Rel, negative: BTreeSet<Pair>) -> TransitionRelation3 {
        let succ: BTreeMap<Pair, BTreeSet<Term>> = pos.iter().filter(|(_, us)| !us.is_empty()).map(|(k, us)| (k.clone(), us.clone())).collect();
        let positive = succ.iter().flat_map(|((t, a), us)| us.iter().map(move |u| (t.clone(), a.clone(), u.clone()))).collect();
        let (truncated, unknown) = g
            .pairs()
            .filter(|p| !succ.contains_key(p) && !negative.contains(p))
            .partition(|p| g.tainted.contains(p));
        TransitionRelation3 { positive, negative, unknown, truncated, succ }
    }

    pub fn targets(&self, t: &Term, a: &Action) -> impl Iterator<Item = &Term> {
        self.succ.get(&(t.clone(), a.clone())).into_iter().flatten()
    }

    pub fn status(&self, t: &Term, a: &Action) -> PairStatus {
        let key = (t.clone(), a.clone());
        match (self.succ.contains_key(&key), self.negative.contains(&key)) {
            (true, true) => PairStatus::Conflict,
            (true, false) => PairStatus::Enabled,
            (false, true) => PairStatus::Refused,
            (false, false) if self.unknown.contains(&key) => PairStatus::Unknown,
            (false, false) => PairStatus::Truncated,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.negative.iter().all(|p| !self.succ.contains_key(p))
    }

    pub fn is_two_valued(&self) -> bool {
        self.unknown.is_empty() && self.truncated.is_empty()
    }

    pub fn literals(&self) -> BTreeSet<Literal> {
        let pos = self.positive.iter().map(|(t, a, u)| Literal::pos(t.clone(), a.clone(), u.clone()));
        pos.chain(self.negative.iter().map(|(t, a)| Literal::neg(t.clone(), a.clone()))).collect()
    }
}

/// A bounded piece of the transition system generated by some roots.
#[derive(Clone, Debug, Serialize)]
pub struct LtsFragment {
    pub roots: Vec<Term>,
    pub actions: Vec<Action>,
    pub states: BTreeSet<Term>,
    pub relation: TransitionRelation3,
    /// States whose outgoing behaviour may be incomplete.
    pub frontier: BTreeSet<Term>,
    pub notion: Notion,
    pub closure_note: String,
}

impl LtsFragment {
    pub fn successors<'a>(&'a self, t: &Term, a: &Action) -> impl Iterator<Item = &'a Term> {
        self.relation.targets(t, a)
    }

    pub fn status(&self, t: &Term, a: &Action) -> PairStatus {
        self.relation.status(t, a)
    }

    pub fn is_frontier(&self, t: &Term) -> bool {
        self.frontier.contains(t)
    }
}

pub fn build_lts(tss: &Tss, roots: &[Term], depth: usize) -> Result<LtsFragment, SemanticsError> {
    build_lts_with(tss, roots, &GroundOptions::depth(depth), Notion::WellSupported)
}

pub fn build_lts_with(tss: &Tss, roots: &[Term], opts: &GroundOptions, notion: Notion) -> Result<LtsFragment, SemanticsError> {
    if notion != Notion::Standard && !tss.is_standard() {
        return Err(SemanticsError::NotStandard);
    }
    let g = ground_program(tss, roots, opts)?;
    let relation = relation(&g, notion);
    debug_assert!(notion == Notion::Standard || relation.is_consistent());
    let mut states = g.universe.clone();
    let mut frontier: BTreeSet<Term> = g.tainted.iter().map(|(t, _)| t.clone()).collect();
    for (_, _, u) in &relation.positive {
        if !g.universe.contains(u) {
            frontier.insert(u.clone());
            states.insert(u.clone());
        }
    }
    Ok(LtsFragment {
        roots: roots.to_vec(),
        actions: g.actions.clone(),
        states,
        relation,
        frontier,
        notion,
        closure_note: g.closure_note.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Completeness {
    pub complete: bool,
    pub witness: Vec<Pair>,
}

/// Complete iff every pair away from the truncation frontier is decided.
pub fn check_complete(g: &GroundProgram) -> Completeness {
    let rel = ws_provable(g);
    let witness: Vec<Pair> = rel.unknown.into_iter().collect();
    Completeness { complete: witness.is_empty(), witness }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConservativeVerdict {
    pub agrees: bool,
    pub counterexample: Option<Literal>,
    pub compared: usize,
}

/// Compares the well-supported relations of `p1` and `p2` on sources over
/// the smaller signature, within both bounded fragments.
pub fn check_conservative_semantic(p1: &Tss, p2: &Tss, roots: &[Term], depth: usize) -> Result<ConservativeVerdict, SemanticsError> {
    if !p1.signature.is_subset_of(&p2.signature) {
        return Err(SemanticsError::SignatureMismatch);
    }
    let mut p1 = p1.clone();
    for a in &p2.actions {
        if !p1.actions.contains(a) {
            p1.actions.push(a.clone());
        }
    }
    let opts = GroundOptions::depth(depth);
    let g1 = ground_program(&p1, roots, &opts)?;
    let g2 = ground_program(p2, roots, &opts)?;
    let (r1, r2) = (ws_provable(&g1), ws_provable(&g2));
    let mut shared: Vec<&Term> = g1.universe.intersection(&g2.universe).collect();
    shared.sort_by_key(|t| t.size());
    let mut compared = 0;
    for t in shared {
        for a in &p1.actions {
            let key = (t.clone(), a.clone());
            if g1.tainted.contains(&key) || g2.tainted.contains(&key) {
                continue;
            }
            compared += 1;
            let s1: BTreeSet<&Term> = r1.targets(t, a).collect();
            let s2: BTreeSet<&Term> = r2.targets(t, a).collect();
            let differ = s1.symmetric_difference(&s2).next().map(|u| Literal::pos(t.clone(), a.clone(), (*u).clone()));
            let neg_differ = (r1.negative.contains(&key) != r2.negative.contains(&key)).then(|| Literal::neg(t.clone(), a.clone()));
            if let Some(lit) = differ.or(neg_differ) {
                return Ok(ConservativeVerdict { agrees: false, counterexample: Some(lit), compared });
            }
        }
    }
    Ok(ConservativeVerdict { agrees: true, counterexample: None, compared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::{parse_term, parse_tss};

    fn t(tss: &Tss, s: &str) -> Term {
        parse_term(s, &tss.signature).unwrap()
    }

    fn steps(lts: &LtsFragment, from: &Term, a: &str) -> Vec<String> {
        lts.successors(from, &Action::new(a)).map(Term::to_string).collect()
    }

    #[test]
    fn bpa_fragment() {
        let tss = load("bpa");
        let root = t(&tss, "(a+b).c");
        let lts = build_lts(&tss, &[root.clone()], 4).unwrap();
        assert_eq!(steps(&lts, &root, "a"), ["eps.c"]);
        assert_eq!(steps(&lts, &root, "b"), ["eps.c"]);
        assert_eq!(steps(&lts, &t(&tss, "eps.c"), "c"), ["eps"]);
        assert_eq!(lts.status(&t(&tss, "eps.c"), &Action::new("sqrt")), PairStatus::Refused);
        assert_eq!(steps(&lts, &t(&tss, "eps"), "sqrt"), ["delta"]);
        assert!(lts.frontier.is_empty());
    }

    #[test]
    fn deadlock_refuses_everything() {
        let tss = load("bpa");
        let delta = t(&tss, "delta");
        let lts = build_lts(&tss, &[delta.clone()], 2).unwrap();
        assert!(lts.relation.positive.is_empty());
        assert!(tss.actions.iter().all(|a| lts.status(&delta, a) == PairStatus::Refused));
    }

    #[test]
    fn priority_realises_acd() {
        let tss = load("priority");
        let root = t(&tss, "th(a.(b+c)+a.c.d)");
        let lts = build_lts(&tss, &[root.clone()], 5).unwrap();
        let mut layer = BTreeSet::from([root]);
        for a in ["a", "c", "d"] {
            layer = layer.iter().flat_map(|s| lts.successors(s, &Action::new(a)).cloned().collect::<Vec<_>>()).collect();
            assert!(!layer.is_empty(), "{a}");
        }
        let blocked = t(&tss, "th(eps.(b+c))");
        assert_eq!(lts.status(&blocked, &Action::new("c")), PairStatus::Refused);
        assert_eq!(lts.status(&blocked, &Action::new("b")), PairStatus::Enabled);
    }

    #[test]
    fn completeness() {
        let tss = load("bpa");
        let g = ground_program(&tss, &[t(&tss, "(a+b).c")], &GroundOptions::depth(4)).unwrap();
        assert!(check_complete(&g).complete);
        let bad = parse_tss("sig c/0\nact a\nrule r: c -/a-> |- c -a-> c").unwrap();
        let g = ground_program(&bad, &[t(&bad, "c")], &GroundOptions::depth(1)).unwrap();
        let c = check_complete(&g);
        assert!(!c.complete);
        assert_eq!(c.witness, vec![(t(&bad, "c"), Action::new("a"))]);
        let empty = parse_tss("sig c/0\nact a").unwrap();
        let g = ground_program(&empty, &[t(&empty, "c")], &GroundOptions::depth(1)).unwrap();
        assert!(check_complete(&g).complete);
    }

    #[test]
    fn semantic_conservativity() {
        let bpa = load("bpa");
        let roots = [t(&bpa, "(a+b).c"), t(&bpa, "a.(b+c)+a.c.d")];
        let v = check_conservative_semantic(&bpa, &load("priority"), &roots, 4).unwrap();
        assert!(v.agrees && v.compared > 0, "{v:?}");
        assert!(check_conservative_semantic(&bpa, &bpa, &roots, 4).unwrap().agrees);
        let mut more = bpa.clone();
        more.rules.push(crate::syntax::parse_tss("sig eps/0\nact a\nrule e: |- eps -a-> eps").unwrap().rules[0].clone());
        let v = check_conservative_semantic(&bpa, &more, &roots, 4).unwrap();
        assert!(!v.agrees);
        assert_eq!(v.counterexample.unwrap().to_string(), "eps -a-> eps");
        assert_eq!(check_conservative_semantic(&load("priority"), &bpa, &roots, 2).unwrap_err(), SemanticsError::SignatureMismatch);
    }
}
