use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::eval::{positive_lfp, Eval, Firing, Lfp, Outside, Rel, View};
use super::ground::{GroundProgram, Instance};
use super::lts::TransitionRelation3;
use super::Pair;
use crate::syntax::{Action, Literal, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Standard,
    #[serde(rename = "s")]
    Supported,
    #[default]
    #[serde(rename = "ws")]
    WellSupported,
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::Standard => "standard",
            Notion::Supported => "s",
            Notion::WellSupported => "ws",
        })
    }
}

impl FromStr for Notion {
    type Err = String;

    fn from_str(s: &str) -> Result<Notion, String> {
        match s {
            "standard" => Ok(Notion::Standard),
            "s" | "supported" => Ok(Notion::Supported),
            "ws" | "well-supported" => Ok(Notion::WellSupported),
            _ => Err(format!("unknown notion `{s}`, expected ws, s or standard")),
        }
    }
}

struct Literals<'a> {
    rel: &'a Rel,
    neg: &'a BTreeSet<Pair>,
}

impl View for Literals<'_> {
    fn targets(&self, s: &Term, b: &Action) -> (Option<&BTreeSet<Term>>, bool) {
        (self.rel.get(&(s.clone(), b.clone())), false)
    }

    fn refused(&self, s: &Term, b: &Action) -> bool {
        self.neg.contains(&(s.clone(), b.clone()))
    }
}

/// Least fixpoint with negative literals treated as atoms of their own.
pub fn standard_provable(g: &GroundProgram) -> BTreeSet<Literal> {
    let mut rel = Rel::new();
    let mut neg: BTreeSet<Pair> = BTreeSet::new();
    loop {
        let mut found = Vec::new();
        {
            let view = Literals { rel: &rel, neg: &neg };
            let mut ev = Eval::new(&g.universe, &view, Outside::Fail);
            let mut out = Vec::new();
            for inst in &g.instances {
                out.clear();
                ev.fire(inst, &mut out);
                found.extend(out.drain(..).map(|f| (inst.pair(), f)));
            }
        }
        let mut changed = false;
        for (key, f) in found {
            match f {
                Firing::Target(u) if u.size() <= g.max_target_size => changed |= rel.entry(key).or_default().insert(u),
                Firing::Negative => changed |= neg.insert(key),
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let pos = rel.into_iter().flat_map(|((t, a), us)| us.into_iter().map(move |u| Literal::pos(t.clone(), a.clone(), u)));
    pos.chain(neg.into_iter().map(|(t, a)| Literal::neg(t, a))).collect()
}

fn positive_instances(g: &GroundProgram) -> Vec<Instance> {
    g.instances.iter().filter(|i| i.conclusion.is_positive()).cloned().collect()
}

/// Some closed instance of `inst` has no premise denied by the established literals.
fn may_fire(inst: &Instance, g: &GroundProgram, pos: &Rel, neg: &BTreeSet<Pair>) -> bool {
    inst.premises.iter().all(|p| {
        let lhs = p.source();
        if !lhs.is_closed() || !g.universe.contains(lhs) {
            return true;
        }
        let key = (lhs.clone(), p.action().clone());
        if p.is_positive() {
            !neg.contains(&key)
        } else {
            pos.get(&key).is_none_or(BTreeSet::is_empty)
        }
    })
}

/// Stage iteration of supported provability until nothing changes.
pub fn supported_provable(g: &GroundProgram) -> TransitionRelation3 {
    let instances = positive_instances(g);
    let mut neg: BTreeSet<Pair> = BTreeSet::new();
    let mut pos = Rel::new();
    loop {
        let next_pos = positive_lfp(&instances, &g.universe, &|s, b| neg.contains(&(s.clone(), b.clone())), Outside::Fail, g.max_target_size).rel;
        let fresh: Vec<Pair> = g
            .pairs()
            .filter(|p| !neg.contains(p))
            .filter(|p| g.instances_for(p).filter(|i| i.conclusion.is_positive()).all(|i| !may_fire(i, g, &pos, &neg)))
            .collect();
        if next_pos == pos && fresh.is_empty() {
            break;
        }
        pos = next_pos;
        neg.extend(fresh);
    }
    TransitionRelation3::assemble(g, &pos, neg)
}

/// Well-founded model by the alternating fixpoint: an underestimate of true
/// transitions computed against an overestimate of possible ones, and back.
pub fn ws_provable(g: &GroundProgram) -> TransitionRelation3 {
    let instances = positive_instances(g);
    let over = |under: &Lfp| {
        positive_lfp(&instances, &g.universe, &|s, b| under.rel.get(&(s.clone(), b.clone())).is_none_or(BTreeSet::is_empty), Outside::Maybe, g.max_target_size)
    };
    let mut under = Lfp { rel: Rel::new(), wild: BTreeSet::new(), missing: BTreeSet::new() };
    loop {
        let o = over(&under);
        let next = positive_lfp(
            &instances,
            &g.universe,
            &|s, b| {
                let key = (s.clone(), b.clone());
                o.rel.get(&key).is_none_or(BTreeSet::is_empty) && !o.wild.contains(&key)
            },
            Outside::Fail,
            g.max_target_size,
        );
        if next.rel == under.rel {
            let neg = g.pairs().filter(|p| o.rel.get(p).is_none_or(BTreeSet::is_empty) && !o.wild.contains(p)).collect();
            return TransitionRelation3::assemble(g, &next.rel, neg);
        }
        under = next;
    }
}

/// The relation under the chosen notion. Standard provability reads negative
/// literals only from rules that conclude them.
pub fn relation(g: &GroundProgram, notion: Notion) -> TransitionRelation3 {
    match notion {
        Notion::WellSupported => ws_provable(g),
        Notion::Supported => supported_provable(g),
        Notion::Standard => {
            let lits = standard_provable(g);
            let mut pos = Rel::new();
            let mut neg = BTreeSet::new();
            for l in lits {
                match l {
                    Literal::Pos { source, action, target } => {
                        pos.entry((source, action)).or_default().insert(target);
                    }
                    Literal::Neg { source, action } => {
                        neg.insert((source, action));
                    }
                }
            }
            TransitionRelation3::assemble(g, &pos, neg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::semantics::{ground_program, GroundOptions};
    use crate::syntax::{Rule, Tss};
    use crate::transform::{remove_ntyxt, rplus, DEFAULT_PICK_CAP};
    use crate::{parse_term, parse_tss};

    fn ground(tss: &Tss, roots: &[&str], depth: usize) -> GroundProgram {
        let roots: Vec<Term> = roots.iter().map(|r| parse_term(r, &tss.signature).unwrap()).collect();
        ground_program(tss, &roots, &GroundOptions::depth(depth)).unwrap()
    }

    fn lit(tss: &Tss, s: &str) -> Literal {
        crate::syntax::parse_literal(s, tss).unwrap()
    }

    fn neg(tss: &Tss, t: &str, a: &str) -> Pair {
        (parse_term(t, &tss.signature).unwrap(), Action::new(a))
    }

    /// Alternating fixpoint over fully closed rules, one atom per literal.
    fn oracle_ws(g: &GroundProgram) -> (BTreeSet<Literal>, BTreeSet<Pair>) {
        let rules: Vec<Rule> = g.closed_instances(1_000_000).unwrap().into_iter().filter(|r| r.conclusion.is_positive()).collect();
        let lfp = |refused: &dyn Fn(&Pair) -> bool| {
            let mut facts: BTreeSet<Literal> = BTreeSet::new();
            loop {
                let before = facts.len();
                for r in &rules {
                    let ok = r.premises.iter().all(|p| match p {
                        Literal::Pos { .. } => facts.contains(p),
                        Literal::Neg { source, action } => refused(&(source.clone(), action.clone())),
                    });
                    if ok {
                        facts.insert(r.conclusion.clone());
                    }
                }
                if facts.len() == before {
                    return facts;
                }
            }
        };
        let enabled = |facts: &BTreeSet<Literal>, p: &Pair| facts.iter().any(|l| l.source() == &p.0 && l.action() == &p.1);
        let mut under = BTreeSet::new();
        loop {
            let over = lfp(&|p| !enabled(&under, p));
            let next = lfp(&|p| !enabled(&over, p));
            if next == under {
                let negs = g.pairs().filter(|p| !enabled(&over, p)).collect();
                return (next, negs);
            }
            under = next;
        }
    }

    #[test]
    fn standard_on_closure_plus() {
        let tss = rplus(&load("closure"), DEFAULT_PICK_CAP).unwrap();
        let g = ground(&tss, &["c", "f(c,c)"], 1);
        let got = standard_provable(&g);
        for l in ["c -a-> c", "c -/b->", "f(c,c) -/a->", "f(c,c) -b-> c"] {
            assert!(got.contains(&lit(&tss, l)), "{l}");
        }
        assert!(!got.contains(&lit(&tss, "f(c,c) -/b->")));
    }

    #[test]
    fn standard_on_empty_and_decency_example() {
        let empty = parse_tss("sig c/0\nact a").unwrap();
        assert!(standard_provable(&ground(&empty, &["c"], 2)).is_empty());
        let tss = load("decency-needed");
        let got = standard_provable(&ground(&tss, &["a", "c"], 2));
        assert!(got.contains(&lit(&tss, "c -a-> eps")));
    }

    #[test]
    fn variable_source_separates_supported_from_ws() {
        for tss in [load("no-free-variables"), remove_ntyxt(&load("no-free-variables")).unwrap()] {
            let g = ground(&tss, &["c"], 2);
            let ca = neg(&tss, "c", "a");
            assert!(!supported_provable(&g).negative.contains(&ca));
            assert!(ws_provable(&g).negative.contains(&ca));
        }
    }

    #[test]
    fn other_variants_separate_too() {
        for (name, root) in [("no-free-variables-free", "c"), ("no-free-variables-ntyft", "c"), ("no-free-variables-lookahead", "f(c)")] {
            let tss = load(name);
            let g = ground(&tss, &[root], 3);
            let p = neg(&tss, root, "a");
            assert!(!supported_provable(&g).negative.contains(&p), "{name}");
            assert!(ws_provable(&g).negative.contains(&p), "{name}");
        }
    }

    #[test]
    fn vacuous_refusal_on_empty_program() {
        let empty = parse_tss("sig c/0\nact a").unwrap();
        let g = ground(&empty, &["c"], 0);
        assert!(supported_provable(&g).negative.contains(&neg(&empty, "c", "a")));
        assert!(ws_provable(&g).negative.contains(&neg(&empty, "c", "a")));
    }

    #[test]
    fn negative_lookahead_agrees_on_positives() {
        let tss = load("no-lookahead");
        let g = ground(&tss, &["a", "eps", "f(a)"], 2);
        let target = lit(&tss, "f(a) -a-> eps");
        assert!(supported_provable(&g).literals().contains(&target));
        let ws = ws_provable(&g);
        assert!(ws.literals().contains(&target));
        assert!(ws.negative.contains(&neg(&tss, "eps", "a")));
    }

    #[test]
    fn self_denying_rule_is_unknown() {
        let tss = parse_tss("sig c/0\nact a\nrule r: c -/a-> |- c -a-> c").unwrap();
        let ws = ws_provable(&ground(&tss, &["c"], 2));
        assert!(ws.positive.is_empty() && ws.negative.is_empty());
        assert_eq!(ws.unknown, BTreeSet::from([neg(&tss, "c", "a")]));
    }

    #[test]
    fn ws_matches_closed_oracle() {
        let cases = [
            ("bpa", "(a+b).c"),
            ("priority", "th(a.(b+c)+a.c.d)"),
            ("closure", "f(c,c)"),
            ("no-free-variables", "c"),
            ("no-free-variables-ntyft", "c"),
            ("no-free-variables-lookahead", "f(c)"),
            ("no-lookahead", "f(f(a))"),
            ("initial-priority", "a"),
        ];
        for (name, root) in cases {
            let tss = load(name);
            let g = ground(&tss, &[root], 12);
            assert!(g.tainted.is_empty(), "{name}");
            let ws = ws_provable(&g);
            let (pos, negs) = oracle_ws(&g);
            let got: BTreeSet<Literal> = ws.literals().into_iter().filter(Literal::is_positive).collect();
            assert_eq!(got, pos, "{name}");
            assert_eq!(ws.negative, negs, "{name}");
            assert!(ws.is_consistent());
        }
    }

    #[test]
    fn positive_specs_are_two_valued() {
        let tss = load("bpa");
        let g = ground(&tss, &["(a+b).c", "delta"], 8);
        let ws = ws_provable(&g);
        assert!(ws.is_two_valued());
        let st = standard_provable(&g);
        let pos: BTreeSet<Literal> = st.into_iter().filter(Literal::is_positive).collect();
        assert_eq!(pos, ws.literals().into_iter().filter(Literal::is_positive).collect());
        assert_eq!(supported_provable(&g), ws);
    }
}
