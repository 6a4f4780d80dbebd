use std::collections::BTreeMap;

use serde::Serialize;

use super::traces::initials;
use super::ObserveError;
use crate::semantics::LtsFragment;
use crate::syntax::{Action, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SimKind {
    /// n-nested simulation, n ≥ 1.
    Nested(u32),
    Ready,
    Bisimulation,
}

/// A preorder on the fully determined states of a fragment.
#[derive(Clone, Debug)]
pub struct SimRelation {
    pub states: Vec<Term>,
    index: BTreeMap<Term, usize>,
    rel: Vec<Vec<bool>>,
}

impl SimRelation {
    /// `None` when either state is undetermined in the fragment.
    pub fn holds(&self, p: &Term, q: &Term) -> Option<bool> {
        Some(self.rel[*self.index.get(p)?][*self.index.get(q)?])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Term, &Term)> {
        self.rel.iter().enumerate().flat_map(move |(i, row)| {
            row.iter().enumerate().filter(|(_, &b)| b).map(move |(j, _)| (&self.states[i], &self.states[j]))
        })
    }
}

struct Graph {
    states: Vec<Term>,
    index: BTreeMap<Term, usize>,
    succ: Vec<Vec<(usize, Vec<usize>)>>,
    init: Vec<Vec<usize>>,
}

/// States whose behaviour is decided, closed under successors.
fn determined(lts: &LtsFragment) -> Graph {
    let actions: Vec<&Action> = lts.actions.iter().collect();
    let mut ok: BTreeMap<&Term, bool> = lts.states.iter().map(|s| (s, initials(lts, s).is_ok())).collect();
    loop {
        let mut changed = false;
        for s in &lts.states {
            if ok[s] && actions.iter().any(|a| lts.successors(s, a).any(|t| !ok.get(t).copied().unwrap_or(false))) {
                ok.insert(s, false);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let states: Vec<Term> = lts.states.iter().filter(|s| ok[*s]).cloned().collect();
    let index: BTreeMap<Term, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let succ = states
        .iter()
        .map(|s| {
            actions
                .iter()
                .enumerate()
                .map(|(k, a)| (k, lts.successors(s, a).map(|t| index[t]).collect::<Vec<_>>()))
                .filter(|(_, ts)| !ts.is_empty())
                .collect()
        })
        .collect::<Vec<Vec<(usize, Vec<usize>)>>>();
    let init = succ.iter().map(|row| row.iter().map(|(k, _)| *k).collect()).collect();
    Graph { states, index, succ, init }
}

fn successors(g: &Graph, i: usize, k: usize) -> &[usize] {
    g.succ[i].iter().find(|(a, _)| *a == k).map(|(_, ts)| ts.as_slice()).unwrap_or(&[])
}

/// Greatest simulation inside `rel`; with `both`, also the inverse must simulate.
fn refine(g: &Graph, mut rel: Vec<Vec<bool>>, both: bool) -> Vec<Vec<bool>> {
    let n = g.states.len();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if !rel[i][j] {
                    continue;
                }
                let forth = g.succ[i].iter().all(|(k, ts)| ts.iter().all(|&i2| successors(g, j, *k).iter().any(|&j2| rel[i2][j2])));
                let back = !both || g.succ[j].iter().all(|(k, ts)| ts.iter().all(|&j2| successors(g, i, *k).iter().any(|&i2| rel[i2][j2])));
                if !(forth && back) {
                    rel[i][j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

fn greatest(g: &Graph, kind: SimKind) -> Vec<Vec<bool>> {
    let n = g.states.len();
    match kind {
        SimKind::Nested(0) | SimKind::Nested(1) => refine(g, vec![vec![true; n]; n], false),
        SimKind::Nested(k) => {
            let below = greatest(g, SimKind::Nested(k - 1));
            let init = (0..n).map(|i| (0..n).map(|j| below[j][i]).collect()).collect();
            refine(g, init, false)
        }
        SimKind::Ready => {
            let init = (0..n).map(|i| (0..n).map(|j| g.init[i] == g.init[j]).collect()).collect();
            refine(g, init, false)
        }
        SimKind::Bisimulation => refine(g, vec![vec![true; n]; n], true),
    }
}

/// The largest relation of the given kind on the determined part of the fragment.
pub fn simulation_preorder(lts: &LtsFragment, kind: SimKind) -> SimRelation {
    let g = determined(lts);
    let rel = greatest(&g, kind);
    SimRelation { states: g.states, index: g.index, rel }
}

pub(crate) fn sim_holds(lts: &LtsFragment, p: &Term, q: &Term, kind: SimKind) -> Result<bool, ObserveError> {
    let rel = simulation_preorder(lts, kind);
    for s in [p, q] {
        if !rel.index.contains_key(s) {
            initials(lts, s)?;
            return Err(ObserveError::Truncated(s.clone()));
        }
    }
    Ok(rel.holds(p, q).expect("both states are determined"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::parse_term;
    use crate::semantics::build_lts;

    fn setup(srcs: &[&str]) -> (LtsFragment, Vec<Term>) {
        let tss = load("bpa");
        let roots: Vec<Term> = srcs.iter().map(|s| parse_term(s, &tss.signature).unwrap()).collect();
        (build_lts(&tss, &roots, 6).unwrap(), roots)
    }

    #[test]
    fn simulation_is_one_sided_for_branching() {
        let (lts, r) = setup(&["a.(b+c)", "a.b+a.c"]);
        let s = simulation_preorder(&lts, SimKind::Nested(1));
        assert_eq!(s.holds(&r[0], &r[1]), Some(false));
        assert_eq!(s.holds(&r[1], &r[0]), Some(true));
        let rs = simulation_preorder(&lts, SimKind::Ready);
        assert_eq!(rs.holds(&r[1], &r[0]), Some(false));
    }

    #[test]
    fn reflexive_for_every_kind() {
        let (lts, r) = setup(&["a.(b+c)", "a.b+a.c", "a.b.c+a.(b.c+b.d)"]);
        for kind in [SimKind::Nested(1), SimKind::Nested(2), SimKind::Nested(3), SimKind::Ready, SimKind::Bisimulation] {
            let s = simulation_preorder(&lts, kind);
            for p in &r {
                assert_eq!(s.holds(p, p), Some(true), "{kind:?} {p}");
            }
        }
    }

    #[test]
    fn bisimilar_sums_and_nested_hierarchy() {
        let (lts, r) = setup(&["a+a", "a", "a.b+a.delta", "a.b"]);
        let b = simulation_preorder(&lts, SimKind::Bisimulation);
        assert_eq!(b.holds(&r[0], &r[1]), Some(true));
        assert_eq!(b.holds(&r[1], &r[0]), Some(true));
        let s1 = simulation_preorder(&lts, SimKind::Nested(1));
        assert_eq!(s1.holds(&r[3], &r[2]), Some(true));
        assert_eq!(s1.holds(&r[2], &r[3]), Some(true));
        let s2 = simulation_preorder(&lts, SimKind::Nested(2));
        assert_eq!(s2.holds(&r[2], &r[3]), Some(false));
        assert_eq!(s2.holds(&r[3], &r[2]), Some(true));
        assert_eq!(b.holds(&r[3], &r[2]), Some(false));
    }
}
