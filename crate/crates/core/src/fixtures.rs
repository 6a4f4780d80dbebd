//! The fixture corpus, embedded at build time.

use crate::syntax::{parse_tss, Tss};

/// Fixture names and their source text.
pub const FIXTURES: &[(&str, &str)] = &[
    ("bpa", include_str!("../../../fixtures/bpa.tss")),
    ("bpa0-seq", include_str!("../../../fixtures/bpa0-seq.tss")),
    ("closure", include_str!("../../../fixtures/closure.tss")),
    ("decency-needed", include_str!("../../../fixtures/decency-needed.tss")),
    ("ex2-nonliquid-a", include_str!("../../../fixtures/ex2-nonliquid-a.tss")),
    ("ex2-nonliquid-b", include_str!("../../../fixtures/ex2-nonliquid-b.tss")),
    ("ex2", include_str!("../../../fixtures/ex2.tss")),
    ("ex3", include_str!("../../../fixtures/ex3.tss")),
    ("ex4", include_str!("../../../fixtures/ex4.tss")),
    ("ex5", include_str!("../../../fixtures/ex5.tss")),
    ("ex6", include_str!("../../../fixtures/ex6.tss")),
    ("ex7", include_str!("../../../fixtures/ex7.tss")),
    ("initial-priority", include_str!("../../../fixtures/initial-priority.tss")),
    ("inverse", include_str!("../../../fixtures/inverse.tss")),
    ("kleene", include_str!("../../../fixtures/kleene.tss")),
    ("lookahead", include_str!("../../../fixtures/lookahead.tss")),
    ("no-free-variables-free", include_str!("../../../fixtures/no-free-variables-free.tss")),
    ("no-free-variables-lookahead", include_str!("../../../fixtures/no-free-variables-lookahead.tss")),
    ("no-free-variables-ntyft", include_str!("../../../fixtures/no-free-variables-ntyft.tss")),
    ("no-free-variables", include_str!("../../../fixtures/no-free-variables.tss")),
    ("no-lookahead", include_str!("../../../fixtures/no-lookahead.tss")),
    ("priority", include_str!("../../../fixtures/priority.tss")),
    ("refinement", include_str!("../../../fixtures/refinement.tss")),
];

pub fn source(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a fixture by name. Panics on unknown names or parse errors, which are bugs in the corpus.
pub fn load(name: &str) -> Tss {
    let src = source(name).unwrap_or_else(|| panic!("no fixture named {name}"));
    parse_tss(src).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print_tss;

    #[test]
    fn every_fixture_parses_and_round_trips() {
        for (name, src) in FIXTURES {
            let tss = parse_tss(src).unwrap_or_else(|e| panic!("{name}: {e}"));
            let again = parse_tss(&print_tss(&tss)).unwrap_or_else(|e| panic!("{name} reprinted: {e}"));
            assert_eq!(tss, again, "{name}");
        }
    }

    #[test]
    fn priority_expands_to_one_rule_per_action() {
        let tss = load("priority");
        let prio: Vec<_> = tss.rules.iter().filter(|r| r.name.starts_with("prio[")).collect();
        assert_eq!(prio.len(), 5);
        assert_eq!(tss.rule("prio[v=c]").unwrap().premises.len(), 2);
    }
}
