use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::ObserveError;
use crate::semantics::{LtsFragment, PairStatus};
use crate::syntax::{Action, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoratedKind {
    Trace,
    Completed,
    ReadyPair,
    FailurePair,
    ReadyTrace,
    FailureTrace,
}

/// A trace with the action sets observed along it. Pairs carry one set for
/// the final state; ready and failure traces carry one per visited state.
/// Failure sets are stored maximal: the complement of the initials.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Decorated {
    pub actions: Vec<Action>,
    pub sets: Vec<BTreeSet<Action>>,
}

fn fmt_set(set: &BTreeSet<Action>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("{")?;
    for (i, a) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str("}")
}

impl fmt::Display for Decorated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sets.len() > 1 {
            for (i, x) in self.sets.iter().enumerate() {
                fmt_set(x, f)?;
                if let Some(a) = self.actions.get(i) {
                    write!(f, "{a}")?;
                }
            }
            return Ok(());
        }
        let word = if self.actions.is_empty() { "ε".to_string() } else { self.actions.iter().map(Action::as_str).collect::<Vec<_>>().join(" ") };
        match self.sets.first() {
            None => f.write_str(&word),
            Some(x) => {
                write!(f, "({word}, ")?;
                fmt_set(x, f)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Decorated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Enabled actions of `q`, failing unless every action is decided.
pub(crate) fn initials(lts: &LtsFragment, q: &Term) -> Result<BTreeSet<Action>, ObserveError> {
    if lts.is_frontier(q) {
        return Err(ObserveError::Truncated(q.clone()));
    }
    let mut out = BTreeSet::new();
    for a in &lts.actions {
        match lts.status(q, a) {
            PairStatus::Enabled => {
                out.insert(a.clone());
            }
            PairStatus::Refused => {}
            PairStatus::Truncated => return Err(ObserveError::Truncated(q.clone())),
            PairStatus::Unknown | PairStatus::Conflict => return Err(ObserveError::Incomplete(q.clone(), a.clone())),
        }
    }
    Ok(out)
}

/// Decorated traces of `p` with at most `depth` actions.
pub fn decorated_traces(lts: &LtsFragment, p: &Term, kind: DecoratedKind, depth: usize) -> Result<BTreeSet<Decorated>, ObserveError> {
    let mut out = BTreeSet::new();
    let mut path = Vec::new();
    let mut sets = Vec::new();
    walk(lts, p, kind, depth, &mut path, &mut sets, &mut out)?;
    Ok(out)
}

fn walk(
    lts: &LtsFragment,
    q: &Term,
    kind: DecoratedKind,
    left: usize,
    path: &mut Vec<Action>,
    sets: &mut Vec<BTreeSet<Action>>,
    out: &mut BTreeSet<Decorated>,
) -> Result<(), ObserveError> {
    use DecoratedKind::*;
    if kind == Trace && left == 0 {
        out.insert(Decorated { actions: path.clone(), sets: Vec::new() });
        return Ok(());
    }
    let init = initials(lts, q)?;
    let refusals: BTreeSet<Action> = lts.actions.iter().filter(|a| !init.contains(*a)).cloned().collect();
    let mut pushed = false;
    match kind {
        Trace => {
            out.insert(Decorated { actions: path.clone(), sets: Vec::new() });
        }
        Completed => {
            if init.is_empty() {
                out.insert(Decorated { actions: path.clone(), sets: Vec::new() });
            }
        }
        ReadyPair => {
            out.insert(Decorated { actions: path.clone(), sets: vec![init.clone()] });
        }
        FailurePair => {
            out.insert(Decorated { actions: path.clone(), sets: vec![refusals] });
        }
        ReadyTrace | FailureTrace => {
            sets.push(if kind == ReadyTrace { init.clone() } else { refusals });
            pushed = true;
            out.insert(Decorated { actions: path.clone(), sets: sets.clone() });
        }
    }
    if left > 0 {
        for a in &init {
            let next: Vec<Term> = lts.successors(q, a).cloned().collect();
            for r in &next {
                path.push(a.clone());
                walk(lts, r, kind, left - 1, path, sets, out)?;
                path.pop();
            }
        }
    }
    if pushed {
        sets.pop();
    }
    Ok(())
}

/// Inclusion of decorated trace sets; failure sets are compared up to
/// subsets, which stands for the subset closure of the stored maximal sets.
pub fn included(kind: DecoratedKind, left: &BTreeSet<Decorated>, right: &BTreeSet<Decorated>) -> bool {
    match kind {
        DecoratedKind::FailurePair | DecoratedKind::FailureTrace => left.iter().all(|l| {
            right.iter().any(|r| r.actions == l.actions && l.sets.len() == r.sets.len() && l.sets.iter().zip(&r.sets).all(|(x, y)| x.is_subset(y)))
        }),
        _ => left.is_subset(right),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::parse_term;
    use crate::semantics::build_lts;

    fn run(src: &str, kind: DecoratedKind, depth: usize) -> Vec<String> {
        let tss = load("bpa");
        let p = parse_term(src, &tss.signature).unwrap();
        let lts = build_lts(&tss, &[p.clone()], depth + 2).unwrap();
        decorated_traces(&lts, &p, kind, depth).unwrap().iter().map(Decorated::to_string).collect()
    }

    #[test]
    fn traces_of_branching_process() {
        let mut got = run("a.(b.c+b.d)", DecoratedKind::Trace, 3);
        got.sort();
        assert_eq!(got, ["a", "a b", "a b c", "a b d", "ε"]);
    }

    #[test]
    fn ready_pairs_at_depth_one() {
        let got = run("a.b+a.c", DecoratedKind::ReadyPair, 1);
        let want: BTreeSet<String> = ["(ε, {a})", "(a, {b})", "(a, {c})"].into_iter().map(String::from).collect();
        assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), want);
    }

    #[test]
    fn deadlock_completes_empty_trace() {
        assert_eq!(run("delta", DecoratedKind::Completed, 2), ["ε"]);
    }

    #[test]
    fn failure_traces_store_maximal_refusals() {
        let got = run("a", DecoratedKind::FailureTrace, 1);
        assert!(got.contains(&"{b,c,d,sqrt}a{a,b,c,d}".to_string()), "{got:?}");
    }

    #[test]
    fn truncated_fragment_is_an_error() {
        let tss = load("bpa");
        let p = parse_term("a.b.c", &tss.signature).unwrap();
        let lts = build_lts(&tss, &[p.clone()], 1).unwrap();
        assert!(matches!(decorated_traces(&lts, &p, DecoratedKind::Trace, 3), Err(ObserveError::Truncated(_))));
    }
}
