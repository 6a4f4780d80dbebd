use std::cell::Cell;
use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ruleform::acceptance::props::{self, Case, CaseResult};
use ruleform::decompose::{Decomposer, Decomposition, Polarity};
use ruleform::gen::{random_open_term, random_rs_formula, random_tss, TssShape};
use ruleform::observe::Formula;
use ruleform::syntax::{alpha_canonical, alpha_key, parse_tss, print_tss, Action};

const SEED: [u8; 32] = *b"ruleform-property-suite-seed-001";

fn runner() -> TestRunner {
    let config = Config { cases: 200, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn check_seeds(case: fn(u64) -> CaseResult) {
    let skipped = Cell::new(0u32);
    runner()
        .run(&any::<u64>(), |seed| match case(seed) {
            Ok(Case::Checked) => Ok(()),
            Ok(Case::Skipped(_)) => {
                skipped.set(skipped.get() + 1);
                Ok(())
            }
            Err(e) => Err(TestCaseError::fail(e)),
        })
        .unwrap();
    assert!(skipped.get() <= 50, "{} cases skipped", skipped.get());
}

#[test]
fn decompositions_agree_with_satisfaction() {
    check_seeds(props::inverse_agreement_case);
}

#[test]
fn preorder_hierarchy() {
    check_seeds(props::hierarchy_case);
}

#[test]
fn supported_equals_ws_on_decent_xynft() {
    check_seeds(props::supported_is_ws_case);
}

#[test]
fn plus_construction_equals_supported() {
    check_seeds(props::plus_is_supported_case);
}

#[test]
fn formats_survive_the_pipeline() {
    check_seeds(props::format_preservation_case);
}

#[test]
fn ws_is_consistent() {
    check_seeds(props::ws_consistency_case);
}

#[test]
fn memo_does_not_change_ruloids() {
    runner()
        .run(&(any::<u64>(), any::<bool>()), |(seed, negative)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tss = random_tss(&mut rng, &TssShape::default());
            let t = random_open_term(&mut rng, &tss.signature, 2, 3);
            let mut d = Decomposer::new(&tss).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let pol = if negative { Polarity::Negative } else { Polarity::Positive };
            let a = Action::new(if seed % 2 == 0 { "a" } else { "b" });
            let memo = d.ruloids(&t, &a, pol).unwrap();
            let again = d.ruloids(&t, &a, pol).unwrap();
            let plain = d.ruloids_unmemoized(&t, &a, pol).unwrap();
            let keys = |rs: &[ruleform::decompose::Ruloid]| rs.iter().map(|r| alpha_key(&r.rule)).collect::<BTreeSet<_>>();
            prop_assert_eq!(keys(&memo), keys(&plain));
            prop_assert_eq!(keys(&memo), keys(&again));
            for r in &memo {
                prop_assert!(r.is_well_formed(), "{}", r);
                prop_assert_eq!(r.polarity, pol);
                prop_assert_eq!(r.rule.conclusion.is_positive(), !negative);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn conjunction_decomposes_pointwise() {
    runner()
        .run(&any::<u64>(), |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tss = random_tss(&mut rng, &TssShape::default());
            let t = random_open_term(&mut rng, &tss.signature, 2, 2);
            let f1 = random_rs_formula(&mut rng, &tss.actions, 2);
            let f2 = random_rs_formula(&mut rng, &tss.actions, 2);
            let mut d = Decomposer::new(&tss).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let both: BTreeSet<Decomposition> = d.inverse(&t, &Formula::and([f1.clone(), f2.clone()])).unwrap().into_iter().collect();
            let l = d.inverse(&t, &f1).unwrap();
            let r = d.inverse(&t, &f2).unwrap();
            let product: BTreeSet<Decomposition> =
                l.iter().flat_map(|x| r.iter().map(move |y| x.and(y))).filter(|p| !p.is_manifestly_unsatisfiable()).collect();
            let shared = f1.normalize().conjuncts().iter().any(|g| f2.normalize().conjuncts().contains(g));
            if !shared {
                prop_assert_eq!(both, product, "{} and {}", f1, f2);
            } else {
                prop_assert!(both.is_subset(&product), "{} and {}", f1, f2);
                for p in product.difference(&both) {
                    prop_assert!(both.iter().any(|b| weaker(b, p)), "{} is not subsumed", p);
                }
            }
            Ok(())
        })
        .unwrap();
}

/// Every entry of `b` is a sub-conjunction of the matching entry of `p`.
fn weaker(b: &Decomposition, p: &Decomposition) -> bool {
    b.iter().all(|(x, f)| {
        let g = p.get(x);
        f.conjuncts().iter().all(|c| g.conjuncts().contains(c))
    })
}

#[test]
fn printing_round_trips_and_canonical_forms_are_stable() {
    runner()
        .run(&any::<u64>(), |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = TssShape { max_premises: 3, ..TssShape::default() };
            let tss = random_tss(&mut rng, &shape);
            let back = parse_tss(&print_tss(&tss)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(&back, &tss);
            for r in &tss.rules {
                let c = alpha_canonical(r);
                prop_assert_eq!(alpha_canonical(&c), c.clone());
                prop_assert_eq!(alpha_key(&c), alpha_key(r));
            }
            let f = random_rs_formula(&mut rng, &tss.actions, 3);
            let n = f.normalize();
            prop_assert_eq!(n.normalize(), n.clone());
            let parsed: Formula = n.to_string().parse().map_err(|e| TestCaseError::fail(format!("{e}")))?;
            prop_assert_eq!(parsed.normalize(), n);
            Ok(())
        })
        .unwrap();
}
