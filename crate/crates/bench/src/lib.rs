//! Shared inputs for the benchmarks in `benches/`.

use ruleform::fixtures;
use ruleform::{parse_tss, Tss};

pub fn fixture(name: &str) -> Tss {
    parse_tss(fixtures::source(name).expect("known fixture")).expect("fixture parses")
}
