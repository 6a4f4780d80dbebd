use std::collections::BTreeSet;

use serde::Serialize;

use super::classify::classify;
use crate::syntax::{alpha_key, Tss};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConservativityReport {
    pub holds: bool,
    /// Why the sufficient condition fails, one entry per problem.
    pub problems: Vec<String>,
}

/// Sufficient syntactic condition for `extended` to be an operationally
/// conservative extension of `base`.
pub fn check_conservative_syntactic(base: &Tss, extended: &Tss) -> ConservativityReport {
    let mut problems = Vec::new();
    for (label, tss) in [("base", base), ("extension", extended)] {
        if !tss.is_standard() {
            problems.push(format!("{label} has rules with negative conclusions"));
        }
        for r in &tss.rules {
            let c = classify(r);
            if !(c.ntyft && c.decent) {
                problems.push(format!("{label} rule {} is not a decent ntyft rule", r.name));
            }
        }
    }
    if !base.signature.is_subset_of(&extended.signature) {
        problems.push("base signature is not contained in the extension".into());
    }
    let base_keys: BTreeSet<_> = base.rules.iter().map(alpha_key).collect();
    let ext_keys: BTreeSet<_> = extended.rules.iter().map(alpha_key).collect();
    for r in &base.rules {
        if !ext_keys.contains(&alpha_key(r)) {
            problems.push(format!("base rule {} is missing from the extension", r.name));
        }
    }
    for r in &extended.rules {
        if base_keys.contains(&alpha_key(r)) {
            continue;
        }
        let fresh_head = r.source().head().is_some_and(|f| !base.signature.contains(f));
        if !fresh_head {
            problems.push(format!("added rule {} has no new function symbol in its source", r.name));
        }
    }
    ConservativityReport { holds: problems.is_empty(), problems }
}
