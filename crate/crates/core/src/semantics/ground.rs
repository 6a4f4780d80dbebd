use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::eval::{positive_lfp, Eval, Outside, Rel, View};
use super::{Pair, SemanticsError};
use crate::syntax::{Action, Literal, Rule, Subst, Symbol, Term, Tss, Var};

/// How the universe grows from the roots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    /// Targets of transitions that may fire, ignoring negative premises.
    #[default]
    Reachable,
    /// Every instance of a rule target over the current universe.
    Syntactic,
}

#[derive(Clone, Debug)]
pub struct GroundOptions {
    pub depth: usize,
    pub closure: Closure,
    pub max_universe: usize,
    pub max_instances: usize,
    pub max_target_size: usize,
}

impl GroundOptions {
    pub fn depth(depth: usize) -> GroundOptions {
        GroundOptions { depth, ..GroundOptions::default() }
    }
}

impl Default for GroundOptions {
    fn default() -> GroundOptions {
        GroundOptions { depth: 4, closure: Closure::Reachable, max_universe: 20_000, max_instances: 400_000, max_target_size: 64 }
    }
}

/// A rule instance with a closed source. Variables left open are bound by
/// the targets of earlier positive premises; premises are stored in
/// evaluation order.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub rule: String,
    pub premises: Vec<Literal>,
    pub conclusion: Literal,
}

impl Instance {
    pub fn pair(&self) -> Pair {
        (self.conclusion.source().clone(), self.conclusion.action().clone())
    }

    pub fn to_rule(&self) -> Rule {
        Rule::new(self.rule.clone(), self.premises.iter().cloned(), self.conclusion.clone())
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_rule(), f)
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct GroundProgram {
    pub actions: Vec<Action>,
    pub universe: BTreeSet<Term>,
    pub instances: Vec<Instance>,
    pub closure_note: String,
    /// Pairs whose verdict may depend on terms outside the universe.
    pub tainted: BTreeSet<Pair>,
    pub(crate) max_target_size: usize,
    pub(crate) by_pair: BTreeMap<Pair, Vec<usize>>,
}

impl GroundProgram {
    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.universe.iter().flat_map(move |t| self.actions.iter().map(move |a| (t.clone(), a.clone())))
    }

    pub fn instances_for(&self, pair: &Pair) -> impl Iterator<Item = &Instance> {
        self.by_pair.get(pair).into_iter().flatten().map(|&i| &self.instances[i])
    }

    /// Expands open variables over the universe, giving fully closed rules.
    pub fn closed_instances(&self, cap: usize) -> Result<Vec<Rule>, SemanticsError> {
        let terms: Vec<&Term> = self.universe.iter().collect();
        let mut out = Vec::new();
        for inst in &self.instances {
            let rule = inst.to_rule();
            let vars: Vec<Var> = rule.vars().into_iter().collect();
            let mut idx = vec![0usize; vars.len()];
            if terms.is_empty() && !vars.is_empty() {
                continue;
            }
            loop {
                let sigma: Subst = vars.iter().cloned().zip(idx.iter().map(|&i| terms[i].clone())).collect();
                out.push(sigma.apply_rule(&rule));
                if out.len() > cap {
                    return Err(SemanticsError::Explosion { what: "closed instances", size: out.len(), cap });
                }
                if !crate::transform::advance(&mut idx, terms.len()) {
                    break;
                }
            }
        }
        Ok(out)
    }
}

struct Plan {
    order: Vec<usize>,
    loose: Vec<Var>,
}

fn plan(rule: &Rule) -> Plan {
    let prem: Vec<&Literal> = rule.premises.iter().collect();
    let mut bound = rule.source_vars();
    let mut remaining: Vec<usize> = (0..prem.len()).collect();
    let mut order = Vec::new();
    let mut loose = BTreeSet::new();
    while !remaining.is_empty() {
        let pick = remaining.iter().position(|&i| prem[i].source().vars().is_subset(&bound)).unwrap_or(0);
        let i = remaining.remove(pick);
        for v in prem[i].source().vars() {
            if bound.insert(v.clone()) {
                loose.insert(v);
            }
        }
        if let Some(t) = prem[i].target() {
            bound.extend(t.vars());
        }
        order.push(i);
    }
    if let Some(t) = rule.target() {
        loose.extend(t.vars().into_iter().filter(|v| !bound.contains(v)));
    }
    Plan { order, loose: loose.into_iter().collect() }
}

struct Index<'u> {
    by_head: BTreeMap<&'u Symbol, Vec<&'u Term>>,
    all: Vec<&'u Term>,
}

impl<'u> Index<'u> {
    fn new(universe: &'u BTreeSet<Term>) -> Index<'u> {
        let mut by_head: BTreeMap<&Symbol, Vec<&Term>> = BTreeMap::new();
        for t in universe {
            if let Some(f) = t.head() {
                by_head.entry(f).or_default().push(t);
            }
        }
        Index { by_head, all: universe.iter().collect() }
    }

    fn candidates(&self, pattern: &Term) -> &[&'u Term] {
        match pattern.head() {
            Some(f) => self.by_head.get(f).map(Vec::as_slice).unwrap_or(&[]),
            None => &self.all,
        }
    }
}

fn instantiate(tss: &Tss, universe: &BTreeSet<Term>, cap: usize) -> Result<Vec<Instance>, SemanticsError> {
    let index = Index::new(universe);
    let mut out = Vec::new();
    for rule in &tss.rules {
        let Plan { order, loose } = plan(rule);
        let prem: Vec<&Literal> = rule.premises.iter().collect();
        for t in index.candidates(rule.source()) {
            let mut sigma = Subst::new();
            if !sigma.match_term(rule.source(), t) {
                continue;
            }
            let mut idx = vec![0usize; loose.len()];
            if !loose.is_empty() && index.all.is_empty() {
                continue;
            }
            loop {
                let mut s = sigma.clone();
                for (v, &i) in loose.iter().zip(&idx) {
                    s.insert(v.clone(), index.all[i].clone());
                }
                out.push(Instance {
                    rule: rule.name.clone(),
                    premises: order.iter().map(|&i| s.apply_literal(prem[i])).collect(),
                    conclusion: s.apply_literal(&rule.conclusion),
                });
                if out.len() > cap {
                    return Err(SemanticsError::Explosion { what: "ground instances", size: out.len(), cap });
                }
                if !crate::transform::advance(&mut idx, index.all.len()) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn add_subterms(t: &Term, into: &mut BTreeSet<Term>) {
    for s in t.subterms() {
        into.insert(s.clone());
    }
}

/// Positive over-approximation: negative premises are assumed to hold.
fn may_relation(instances: &[Instance], universe: &BTreeSet<Term>, max_target: usize) -> (Rel, BTreeSet<Pair>) {
    let lfp = positive_lfp(instances, universe, &|_, _| true, Outside::Maybe, max_target);
    (lfp.rel, lfp.wild)
}

/// Targets of the may-relation and the closed premise sources it needed outside the universe.
fn reachable_step(instances: &[Instance], universe: &BTreeSet<Term>, max_target: usize) -> BTreeSet<Term> {
    let lfp = positive_lfp(instances, universe, &|_, _| true, Outside::Maybe, max_target);
    let mut next = universe.clone();
    for u in lfp.rel.values().flatten().chain(&lfp.missing) {
        add_subterms(u, &mut next);
    }
    next
}

fn syntactic_step(tss: &Tss, universe: &BTreeSet<Term>, cap: usize) -> Result<BTreeSet<Term>, SemanticsError> {
    let terms: Vec<&Term> = universe.iter().collect();
    let mut next = universe.clone();
    for t in tss.rules.iter().filter_map(Rule::target) {
        let vars: Vec<Var> = t.vars().into_iter().collect();
        if !vars.is_empty() && terms.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; vars.len()];
        loop {
            let sigma: Subst = vars.iter().cloned().zip(idx.iter().map(|&i| terms[i].clone())).collect();
            add_subterms(&sigma.apply(t), &mut next);
            if next.len() > cap {
                return Err(SemanticsError::Explosion { what: "universe", size: next.len(), cap });
            }
            if !crate::transform::advance(&mut idx, terms.len()) {
                break;
            }
        }
    }
    Ok(next)
}

/// Grounds `tss` over the closure of `roots`.
pub fn ground_program(tss: &Tss, roots: &[Term], opts: &GroundOptions) -> Result<GroundProgram, SemanticsError> {
    let mut universe = BTreeSet::new();
    for r in roots {
        if !r.is_closed() {
            return Err(SemanticsError::NotClosed(r.clone()));
        }
        if !tss.signature.well_formed(r) {
            return Err(SemanticsError::IllFormed(r.clone()));
        }
        add_subterms(r, &mut universe);
    }
    for _ in 0..opts.depth {
        let next = match opts.closure {
            Closure::Syntactic => syntactic_step(tss, &universe, opts.max_universe)?,
            Closure::Reachable => {
                let instances = instantiate(tss, &universe, opts.max_instances)?;
                reachable_step(&instances, &universe, opts.max_target_size)
            }
        };
        if next.len() > opts.max_universe {
            return Err(SemanticsError::Explosion { what: "universe", size: next.len(), cap: opts.max_universe });
        }
        if next == universe {
            break;
        }
        universe = next;
    }
    let instances = instantiate(tss, &universe, opts.max_instances)?;
    let mut by_pair: BTreeMap<Pair, Vec<usize>> = BTreeMap::new();
    for (i, inst) in instances.iter().enumerate() {
        by_pair.entry(inst.pair()).or_default().push(i);
    }
    let tainted = taint(&instances, &universe, opts.max_target_size);
    let closure_note = format!(
        "{} closure of {} root(s) to depth {}: {} terms",
        match opts.closure {
            Closure::Reachable => "reachable",
            Closure::Syntactic => "syntactic",
        },
        roots.len(),
        opts.depth,
        universe.len()
    );
    Ok(GroundProgram {
        actions: tss.actions.clone(),
        universe,
        instances,
        closure_note,
        tainted,
        max_target_size: opts.max_target_size,
        by_pair,
    })
}

/// Pairs whose evaluation reaches outside the universe, directly or through
/// premises about other tainted pairs.
fn taint(instances: &[Instance], universe: &BTreeSet<Term>, max_target: usize) -> BTreeSet<Pair> {
    let (rel, wild) = may_relation(instances, universe, max_target);
    struct May<'r>(&'r Rel, &'r BTreeSet<Pair>);
    impl View for May<'_> {
        fn targets(&self, s: &Term, b: &Action) -> (Option<&BTreeSet<Term>>, bool) {
            let key = (s.clone(), b.clone());
            (self.0.get(&key), self.1.contains(&key))
        }
        fn refused(&self, _: &Term, _: &Action) -> bool {
            true
        }
    }
    let view = May(&rel, &wild);
    let mut deps: BTreeMap<Pair, BTreeSet<Pair>> = BTreeMap::new();
    let mut tainted: BTreeSet<Pair> = wild.clone();
    let mut out = Vec::new();
    for inst in instances {
        let mut ev = Eval::new(universe, &view, Outside::Maybe);
        out.clear();
        ev.fire(inst, &mut out);
        let key = inst.pair();
        if ev.hit_outside {
            tainted.insert(key.clone());
        }
        deps.entry(key).or_default().extend(ev.touched);
    }
    loop {
        let more: Vec<Pair> = deps
            .iter()
            .filter(|(k, ds)| !tainted.contains(*k) && ds.iter().any(|d| tainted.contains(d)))
            .map(|(k, _)| k.clone())
            .collect();
        if more.is_empty() {
            return tainted;
        }
        tainted.extend(more);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::parse_term;

    fn term(tss: &Tss, s: &str) -> Term {
        parse_term(s, &tss.signature).unwrap()
    }

    #[test]
    fn syntactic_closure_unfolds_targets() {
        let tss = load("inverse");
        let opts = GroundOptions { closure: Closure::Syntactic, ..GroundOptions::depth(3) };
        let g = ground_program(&tss, &[term(&tss, "c")], &opts).unwrap();
        for t in ["c", "f(c)", "f(f(c))"] {
            assert!(g.universe.contains(&term(&tss, t)), "{t}");
        }
    }

    #[test]
    fn depth_zero_is_subterm_closure() {
        let tss = load("bpa");
        let root = term(&tss, "(a+b).c");
        let g = ground_program(&tss, &[root], &GroundOptions::depth(0)).unwrap();
        let got: BTreeSet<String> = g.universe.iter().map(Term::to_string).collect();
        let want: BTreeSet<String> = ["(a+b).c", "a+b", "a", "b", "c"].into_iter().map(String::from).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn reachable_closure_follows_transitions() {
        let tss = load("bpa");
        let root = term(&tss, "(a+b).c");
        let g = ground_program(&tss, &[root.clone()], &GroundOptions::depth(1)).unwrap();
        assert!(g.universe.contains(&term(&tss, "eps.c")));
        let g = ground_program(&tss, &[root], &GroundOptions::depth(2)).unwrap();
        assert!(g.universe.contains(&term(&tss, "delta")));
        let inverse = load("inverse");
        let g = ground_program(&inverse, &[term(&inverse, "c")], &GroundOptions::depth(3)).unwrap();
        assert_eq!(g.universe.len(), 1);
    }

    #[test]
    fn instances_keep_slots_open() {
        let tss = load("bpa");
        let g = ground_program(&tss, &[term(&tss, "a+b")], &GroundOptions::depth(0)).unwrap();
        let alt: Vec<String> = g.instances.iter().filter(|i| i.rule.starts_with("alt1")).map(|i| i.to_string()).collect();
        assert!(alt.iter().any(|s| s.contains("a -a-> y |- a+b -a-> y")), "{alt:?}");
        assert!(g.tainted.is_empty());
    }

    #[test]
    fn lookahead_leaving_the_universe_is_tainted() {
        let tss = crate::parse_tss("sig c/0 d/0 f/1\nact a\nrule c: |- c -a-> d\nrule f: x -a-> y, y -a-> z |- f(x) -a-> z").unwrap();
        let fc = (term(&tss, "f(c)"), Action::new("a"));
        let g = ground_program(&tss, &[fc.0.clone()], &GroundOptions::depth(0)).unwrap();
        assert!(g.tainted.contains(&fc));
        assert!(!g.tainted.contains(&(term(&tss, "c"), Action::new("a"))));
        let g = ground_program(&tss, &[fc.0.clone()], &GroundOptions::depth(1)).unwrap();
        assert!(g.tainted.is_empty());
    }

    #[test]
    fn roots_must_be_closed() {
        let tss = load("bpa");
        let e = ground_program(&tss, &[Term::var("x")], &GroundOptions::depth(0)).unwrap_err();
        assert_eq!(e, SemanticsError::NotClosed(Term::var("x")));
    }
}
