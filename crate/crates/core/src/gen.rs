//! Seeded random specifications, terms, formulas and acyclic fragments.

use rand::Rng;

use crate::observe::Formula;
use crate::syntax::{Action, FunctionDecl, Literal, Rule, Signature, Symbol, Term, Tss, Var};

#[derive(Clone, Debug)]
pub struct TssShape {
    pub constants: usize,
    pub unary: usize,
    pub binary: usize,
    pub actions: usize,
    pub max_rules_per_symbol: usize,
    pub max_premises: usize,
    pub negative_premises: bool,
    /// Allow premise sources that are premise targets.
    pub lookahead: bool,
}

impl Default for TssShape {
    fn default() -> TssShape {
        TssShape {
            constants: 2,
            unary: 1,
            binary: 1,
            actions: 2,
            max_rules_per_symbol: 2,
            max_premises: 2,
            negative_premises: true,
            lookahead: false,
        }
    }
}

fn pick<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

fn signature(shape: &TssShape) -> Signature {
    let mut sig = Signature::new();
    let names = |prefix: &str, n: usize| (0..n).map(move |i| format!("{prefix}{i}")).collect::<Vec<_>>();
    for (arity, prefix, n) in [(0, "c", shape.constants), (1, "f", shape.unary), (2, "g", shape.binary)] {
        for name in names(prefix, n) {
            sig.declare(FunctionDecl { name: Symbol::new(name), arity, liquidity: None });
        }
    }
    sig
}

/// A random term of height at most `height` whose leaves are constants or `leaves`.
pub fn random_term(rng: &mut impl Rng, sig: &Signature, leaves: &[Term], height: usize) -> Term {
    let constants: Vec<&FunctionDecl> = sig.iter().filter(|d| d.arity == 0).collect();
    let compound: Vec<&FunctionDecl> = sig.iter().filter(|d| d.arity > 0).collect();
    if height <= 1 || compound.is_empty() || rng.gen_bool(0.5) {
        if !leaves.is_empty() && (constants.is_empty() || rng.gen_bool(0.6)) {
            return pick(rng, leaves).clone();
        }
        return Term::App(pick(rng, &constants).name.clone(), Vec::new());
    }
    let d = pick(rng, &compound);
    Term::App(d.name.clone(), (0..d.arity).map(|_| random_term(rng, sig, leaves, height - 1)).collect())
}

/// A closed term of height at most `height`.
pub fn random_closed_term(rng: &mut impl Rng, sig: &Signature, height: usize) -> Term {
    random_term(rng, sig, &[], height)
}

/// A random standard specification whose rules are ntyft; without lookahead
/// every premise is about a source argument, so the result is decent and xynft.
pub fn random_tss(rng: &mut impl Rng, shape: &TssShape) -> Tss {
    let sig = signature(shape);
    let actions: Vec<Action> = (0..shape.actions).map(|i| Action::new(["a", "b", "c", "d"][i % 4])).collect();
    let mut rules = Vec::new();
    for d in sig.iter() {
        let n = rng.gen_range(0..=shape.max_rules_per_symbol);
        for k in 0..n {
            let xs: Vec<Term> = (0..d.arity).map(|i| Term::var(format!("x{i}"))).collect();
            let source = Term::App(d.name.clone(), xs.clone());
            let mut premises = Vec::new();
            let mut ys: Vec<Term> = Vec::new();
            if d.arity > 0 {
                for j in 0..rng.gen_range(0..=shape.max_premises) {
                    let lhs = if shape.lookahead && !ys.is_empty() && rng.gen_bool(0.3) { pick(rng, &ys).clone() } else { pick(rng, &xs).clone() };
                    let a = pick(rng, &actions).clone();
                    if shape.negative_premises && rng.gen_bool(0.3) {
                        premises.push(Literal::neg(lhs, a));
                    } else {
                        let y = Term::var(format!("y{j}"));
                        premises.push(Literal::pos(lhs, a, y.clone()));
                        ys.push(y);
                    }
                }
            }
            let leaves: Vec<Term> = xs.iter().chain(&ys).cloned().collect();
            let target = random_term(rng, &sig, &leaves, 2);
            let a = pick(rng, &actions).clone();
            rules.push(Rule::new(format!("{}_{k}", d.name), premises, Literal::pos(source, a, target)));
        }
    }
    Tss { signature: sig, actions, order: Default::default(), rules, universe_relative: false }
}

/// A random formula of the ready simulation language with modal depth at most `depth`.
pub fn random_rs_formula(rng: &mut impl Rng, actions: &[Action], depth: usize) -> Formula {
    if depth == 0 {
        return Formula::Top;
    }
    let width = rng.gen_range(1..=2);
    let items: Vec<Formula> = (0..width).map(|_| {
        let a = pick(rng, actions).clone();
        if rng.gen_bool(0.35) {
            Formula::Cannot(a)
        } else {
            let d = rng.gen_range(0..depth);
            Formula::prefix(a, random_rs_formula(rng, actions, d))
        }
    }).collect();
    Formula::and(items)
}

/// A finite acyclic transition system as a specification of premise-free
/// rules between constants `s0 .. s(n-1)`; transitions only go upwards.
pub fn random_acyclic(rng: &mut impl Rng, states: usize, actions: usize, density: f64) -> Tss {
    let mut sig = Signature::new();
    let names: Vec<Term> = (0..states).map(|i| Term::constant(format!("s{i}"))).collect();
    for i in 0..states {
        sig.declare(FunctionDecl { name: Symbol::new(format!("s{i}")), arity: 0, liquidity: None });
    }
    let acts: Vec<Action> = (0..actions).map(|i| Action::new(["a", "b", "c", "d"][i % 4])).collect();
    let mut rules = Vec::new();
    for i in 0..states {
        for j in i + 1..states {
            for a in &acts {
                if rng.gen_bool(density) {
                    rules.push(Rule::new(format!("t{i}_{a}_{j}"), [], Literal::pos(names[i].clone(), a.clone(), names[j].clone())));
                }
            }
        }
    }
    Tss { signature: sig, actions: acts, order: Default::default(), rules, universe_relative: false }
}

/// Variables `x0, x1, ...` occurring in a random context over `sig`.
pub fn random_open_term(rng: &mut impl Rng, sig: &Signature, vars: usize, height: usize) -> Term {
    let leaves: Vec<Term> = (0..vars).map(|i| Term::Var(Var::new(format!("x{i}")))).collect();
    random_term(rng, sig, &leaves, height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::classify;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_specifications_are_decent_xynft() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let tss = random_tss(&mut rng, &TssShape::default());
            for r in &tss.rules {
                let c = classify(r);
                assert!(c.xynft && c.decent && c.standard, "{r}");
                assert!(tss.signature.well_formed(r.source()));
            }
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let a = random_tss(&mut ChaCha8Rng::seed_from_u64(9), &TssShape::default());
        let b = random_tss(&mut ChaCha8Rng::seed_from_u64(9), &TssShape::default());
        assert_eq!(a, b);
        let f = random_rs_formula(&mut ChaCha8Rng::seed_from_u64(1), &[Action::new("a"), Action::new("b")], 2);
        assert!(f.depth() <= 2);
    }

    #[test]
    fn acyclic_fragments_only_go_up() {
        let tss = random_acyclic(&mut ChaCha8Rng::seed_from_u64(5), 5, 2, 0.4);
        for r in &tss.rules {
            let s: usize = r.source().to_string()[1..].parse().unwrap();
            let t: usize = r.target().unwrap().to_string()[1..].parse().unwrap();
            assert!(s < t);
        }
    }
}
