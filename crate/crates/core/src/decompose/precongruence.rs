use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::DecomposeError;
use crate::observe::{preorder_holds, simulation_preorder, SimKind, SimRelation, Sublanguage};
use crate::semantics::{build_lts, LtsFragment};
use crate::syntax::{Signature, Subst, Term, Tss, Var};

#[derive(Clone, Debug)]
pub struct PrecongruenceOptions {
    /// Observation depth of the preorder checks.
    pub depth: usize,
    /// Extra unfolding of the fragment beyond `depth`.
    pub slack: usize,
    /// Check the equivalence instead of the preorder.
    pub symmetric: bool,
    /// Substitution pairs tried per context.
    pub max_instances: usize,
}

impl Default for PrecongruenceOptions {
    fn default() -> PrecongruenceOptions {
        PrecongruenceOptions { depth: 4, slack: 1, symmetric: false, max_instances: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrecongruenceViolation {
    pub context: Term,
    pub sigma: Vec<(Var, Term, Term)>,
    pub left: Term,
    pub right: Term,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PrecongruenceOutcome {
    pub related: usize,
    pub unrelated: usize,
    pub checked: usize,
    pub violation: Option<PrecongruenceViolation>,
}

impl PrecongruenceOutcome {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Answers preorder queries on one fragment; simulation relations are computed once.
struct Oracle<'a> {
    lts: &'a LtsFragment,
    n: &'a Sublanguage,
    sim: Option<SimRelation>,
    opts: &'a PrecongruenceOptions,
}

impl<'a> Oracle<'a> {
    fn new(lts: &'a LtsFragment, n: &'a Sublanguage, opts: &'a PrecongruenceOptions) -> Oracle<'a> {
        let kind = match n {
            Sublanguage::Nested(k) => Some(SimKind::Nested(*k)),
            Sublanguage::RS => Some(SimKind::Ready),
            Sublanguage::B => Some(SimKind::Bisimulation),
            _ => None,
        };
        Oracle { lts, n, sim: kind.map(|k| simulation_preorder(lts, k)), opts }
    }

    fn one_way(&self, p: &Term, q: &Term) -> Result<bool, DecomposeError> {
        match &self.sim {
            Some(rel) => rel.holds(p, q).ok_or_else(|| DecomposeError::Depth(if rel.holds(p, p).is_none() { p.clone() } else { q.clone() })),
            None => Ok(preorder_holds(self.lts, p, q, self.n, self.opts.depth)?),
        }
    }

    fn related(&self, p: &Term, q: &Term) -> Result<bool, DecomposeError> {
        Ok(self.one_way(p, q)? && (!self.opts.symmetric || self.one_way(q, p)?))
    }
}

/// For each pair `(p, q)` that is related by `n`, checks that every context
/// maps it to a related pair; contexts with several variables take one pair
/// per variable.
pub fn precongruence_test(
    p: &Tss,
    n: &Sublanguage,
    contexts: &[Term],
    pairs: &[(Term, Term)],
    opts: &PrecongruenceOptions,
) -> Result<PrecongruenceOutcome, DecomposeError> {
    let ground = opts.depth + opts.slack;
    let mut roots: BTreeSet<Term> = BTreeSet::new();
    for (l, r) in pairs {
        roots.insert(l.clone());
        roots.insert(r.clone());
    }
    let lts = build_lts(p, &roots.into_iter().collect::<Vec<_>>(), ground)?;
    let mut out = PrecongruenceOutcome::default();
    let mut good = Vec::new();
    let oracle = Oracle::new(&lts, n, opts);
    for (l, r) in pairs {
        if oracle.related(l, r)? {
            good.push((l.clone(), r.clone()));
        } else {
            out.unrelated += 1;
        }
    }
    out.related = good.len();
    if good.is_empty() {
        return Ok(out);
    }
    let mut jobs = Vec::new();
    for t in contexts {
        let vars: Vec<Var> = t.vars().into_iter().collect();
        let mut pick = vec![0usize; vars.len()];
        for _ in 0..opts.max_instances {
            let left: Subst = vars.iter().cloned().zip(pick.iter().map(|&i| good[i].0.clone())).collect();
            let right: Subst = vars.iter().cloned().zip(pick.iter().map(|&i| good[i].1.clone())).collect();
            let sigma = vars.iter().zip(&pick).map(|(v, &i)| (v.clone(), good[i].0.clone(), good[i].1.clone())).collect();
            jobs.push(PrecongruenceViolation { context: t.clone(), sigma, left: left.apply(t), right: right.apply(t) });
            if !super::odometer(&mut pick, |_| good.len()) {
                break;
            }
        }
    }
    let roots: BTreeSet<Term> = jobs.iter().flat_map(|j| [j.left.clone(), j.right.clone()]).collect();
    let lts = build_lts(p, &roots.into_iter().collect::<Vec<_>>(), ground)?;
    let oracle = Oracle::new(&lts, n, opts);
    for job in jobs {
        out.checked += 1;
        if !oracle.related(&job.left, &job.right)? {
            out.violation = Some(job);
            return Ok(out);
        }
    }
    Ok(out)
}

/// Closed terms of height at most `height`, smallest first, at most `cap` of them.
pub fn closed_terms(sig: &Signature, height: usize, cap: usize) -> Vec<Term> {
    let mut all: Vec<Term> = Vec::new();
    let mut seen = BTreeSet::new();
    for _ in 0..height {
        let prev = all.clone();
        for d in sig.iter() {
            let mut pick = vec![0usize; d.arity];
            if d.arity > 0 && prev.is_empty() {
                continue;
            }
            loop {
                let t = Term::App(d.name.clone(), pick.iter().map(|&i| prev[i].clone()).collect());
                if seen.insert(t.clone()) {
                    all.push(t);
                    if all.len() >= cap {
                        return all;
                    }
                }
                if !super::odometer(&mut pick, |_| prev.len()) {
                    break;
                }
            }
        }
    }
    all
}

#[derive(Clone, Debug)]
pub struct FuzzOptions {
    pub seed: u64,
    /// Height of the sampled closed terms.
    pub height: usize,
    /// Number of closed terms sampled; all ordered pairs of them are candidates.
    pub terms: usize,
    /// Random contexts added to the one-symbol contexts.
    pub contexts: usize,
    pub check: PrecongruenceOptions,
}

impl Default for FuzzOptions {
    fn default() -> FuzzOptions {
        FuzzOptions { seed: 0, height: 2, terms: 10, contexts: 4, check: PrecongruenceOptions::default() }
    }
}

/// Random contexts built from the signature, with leaves drawn from `x`, `y`
/// and the closed terms in `fill`.
pub fn random_context(sig: &Signature, fill: &[Term], height: usize, rng: &mut impl Rng) -> Term {
    let decls: Vec<_> = sig.iter().filter(|d| d.arity > 0).collect();
    let leaf = |rng: &mut dyn rand::RngCore| -> Term {
        match rng.gen_range(0..3) {
            0 => Term::var("x"),
            1 => Term::var("y"),
            _ if !fill.is_empty() => fill[rng.gen_range(0..fill.len())].clone(),
            _ => Term::var("x"),
        }
    };
    if height == 0 || decls.is_empty() {
        return leaf(rng);
    }
    let d = decls[rng.gen_range(0..decls.len())];
    let args = (0..d.arity)
        .map(|_| if rng.gen_bool(0.5) { random_context(sig, fill, height - 1, rng) } else { leaf(rng) })
        .collect();
    Term::App(d.name.clone(), args)
}

/// Pairs that tend to be related: summands added, swapped or duplicated, and
/// sequencing distributed over choice, when the signature has `+` and `.`.
fn shaped_pairs(sig: &Signature, pool: &[Term], n: usize, rng: &mut impl Rng) -> Vec<(Term, Term)> {
    let binary = |name: &str| sig.arity(&name.into()) == Some(2);
    if pool.is_empty() || !binary("+") {
        return Vec::new();
    }
    let plus = |a: &Term, b: &Term| Term::app("+", vec![a.clone(), b.clone()]);
    let seq = |a: &Term, b: &Term| Term::app(".", vec![a.clone(), b.clone()]);
    let mut out = Vec::new();
    for _ in 0..n {
        let [p, q, r] = [0; 3].map(|_| pool[rng.gen_range(0..pool.len())].clone());
        out.push((p.clone(), plus(&p, &q)));
        out.push((plus(&p, &q), plus(&q, &p)));
        out.push((plus(&p, &p), p.clone()));
        if binary(".") {
            out.push((seq(&p, &plus(&q, &r)), plus(&seq(&p, &q), &seq(&p, &r))));
            out.push((plus(&seq(&p, &q), &seq(&p, &r)), seq(&p, &plus(&q, &r))));
            out.push((seq(&p, &q), plus(&seq(&p, &q), &seq(&p, &r))));
        }
    }
    out
}

/// Samples closed terms and contexts with a fixed seed and runs [`precongruence_test`].
pub fn fuzz_precongruence(p: &Tss, n: &Sublanguage, opts: &FuzzOptions) -> Result<PrecongruenceOutcome, DecomposeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pool = closed_terms(&p.signature, opts.height, 2_000);
    pool.shuffle(&mut rng);
    pool.truncate(opts.terms);
    pool.sort_by_key(Term::size);
    let mut pairs: Vec<(Term, Term)> = pool
        .iter()
        .flat_map(|l| pool.iter().filter(move |r| *r != l).map(move |r| (l.clone(), r.clone())))
        .collect();
    pairs.extend(shaped_pairs(&p.signature, &pool, opts.terms, &mut rng));
    let mut contexts: Vec<Term> = p
        .signature
        .iter()
        .filter(|d| d.arity > 0)
        .map(|d| {
            let names = ["x", "y", "z"];
            Term::App(d.name.clone(), (0..d.arity).map(|i| Term::var(names.get(i).copied().unwrap_or("w"))).collect())
        })
        .collect();
    let fill: Vec<Term> = pool.iter().take(4).cloned().collect();
    for _ in 0..opts.contexts {
        let t = random_context(&p.signature, &fill, 2, &mut rng);
        if !t.vars().is_empty() && !contexts.contains(&t) {
            contexts.push(t);
        }
    }
    precongruence_test(p, n, &contexts, &pairs, &opts.check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load;
    use crate::syntax::parse_term;

    fn term(p: &Tss, s: &str) -> Term {
        parse_term(s, &p.signature).unwrap()
    }

    #[test]
    fn ex2_breaks_ready_trace_under_f() {
        let p = load("ex2");
        let pair = (term(&p, "a.(b.c+b.d)"), term(&p, "a.b.c+a.b.d"));
        let got = precongruence_test(&p, &Sublanguage::RT, &[term(&p, "f(x)")], &[pair], &PrecongruenceOptions::default()).unwrap();
        assert_eq!(got.related, 1);
        let v = got.violation.expect("violation");
        assert_eq!(v.left, term(&p, "f(a.(b.c+b.d))"));
        assert_eq!(v.right, term(&p, "f(a.b.c+a.b.d)"));
    }

    #[test]
    fn identity_context_always_passes() {
        let p = load("ex2");
        let pair = (term(&p, "a.(b.c+b.d)"), term(&p, "a.b.c+a.b.d"));
        let got = precongruence_test(&p, &Sublanguage::RT, &[Term::var("x")], &[pair], &PrecongruenceOptions::default()).unwrap();
        assert!(got.passed());
        assert_eq!(got.checked, 1);
    }

    #[test]
    fn closed_terms_by_height() {
        let p = load("inverse");
        let got: Vec<String> = closed_terms(&p.signature, 3, 100).iter().map(ToString::to_string).collect();
        assert_eq!(got, vec!["c", "f(c)", "f(f(c))"]);
        let bpa = load("bpa");
        assert_eq!(closed_terms(&bpa.signature, 1, 100).len(), 6);
        assert_eq!(closed_terms(&bpa.signature, 2, 1000).len(), 6 + 2 * 36);
    }

    #[test]
    fn initial_priority_passes_failure_fuzz() {
        let p = load("initial-priority");
        let got = fuzz_precongruence(&p, &Sublanguage::F, &FuzzOptions { seed: 7, ..FuzzOptions::default() }).unwrap();
        assert!(got.passed(), "{got:?}");
        assert!(got.related > 0);
        assert!(got.checked > 0);
    }
}
