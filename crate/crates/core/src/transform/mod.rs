//! Rewriting a specification into decent, uniform, negation-complete form.

mod ground;
mod ntyxt;
mod pipeline;
mod rplus;
mod uniform;
mod xynft;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::format::classify;
use crate::syntax::{Rule, Symbol, Term, Tss};

pub use ground::ground_free_vars;
pub(crate) use ground::advance;
pub use ntyxt::remove_ntyxt;
pub use pipeline::{digest, plus_pipeline, run_stages, PipelineError, PipelineOptions, PipelineTrace, Stage, StageRecord};
pub use rplus::{rplus, rplus_unchecked, DEFAULT_PICK_CAP};
pub use uniform::{uniform_source, uniformize};
pub use xynft::{to_decent_xynft, XynftOutcome, DEFAULT_FUEL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("rule {0} has a negative conclusion")]
    NotStandard(String),
    #[error("rule {0} is neither an ntyft nor an ntyxt rule")]
    NotNtytt(String),
    #[error("rule {0} has lookahead")]
    Lookahead(String),
    #[error("rule {rule} has free variables {vars}")]
    FreeVariables { rule: String, vars: String },
    #[error("rule {0} has free variables and no universe was given")]
    NoUniverse(String),
    #[error("rule {0} has free variables and the universe is empty")]
    EmptyUniverse(String),
    #[error("universe term {0} is not a closed term over the signature")]
    BadUniverseTerm(Term),
    #[error("rule {0} has a positive premise whose source is not a variable")]
    NotXynft(String),
    #[error("rules for {0} do not share one source")]
    NotUniform(Symbol),
    #[error("premise choices for {symbol} and {action} number {size}, above the cap of {cap}")]
    PickExplosion { symbol: Symbol, action: String, size: u64, cap: u64 },
}

/// How a generated rule came about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constructor {
    Instantiate,
    Compose,
    PickDeny,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub rule: String,
    pub constructor: Constructor,
    pub origins: Vec<String>,
}

pub(crate) fn require_standard(tss: &Tss) -> Result<(), TransformError> {
    match tss.rules.iter().find(|r| !r.is_standard()) {
        Some(r) => Err(TransformError::NotStandard(r.name.clone())),
        None => Ok(()),
    }
}

/// Checks that every rule is a decent ntyft rule.
pub(crate) fn require_decent_ntyft(tss: &Tss) -> Result<(), TransformError> {
    for r in &tss.rules {
        let c = classify(r);
        if !c.ntyft {
            return Err(TransformError::NotNtytt(r.name.clone()));
        }
        if !c.no_lookahead {
            return Err(TransformError::Lookahead(r.name.clone()));
        }
        if !c.no_free_vars {
            return Err(free_vars_error(r));
        }
    }
    Ok(())
}

pub(crate) fn free_vars_error(r: &Rule) -> TransformError {
    let vars: Vec<String> = r.free_vars().iter().map(|v| v.to_string()).collect();
    TransformError::FreeVariables { rule: r.name.clone(), vars: vars.join(", ") }
}

/// Makes rule names unique by suffixing repeats with `#2`, `#3`, ...
pub(crate) fn unique_names(rules: &mut [Rule]) {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for r in rules.iter_mut() {
        let n = seen.entry(r.name.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            r.name = format!("{}#{}", r.name, n);
        }
    }
}

/// `f(x1, ..., xn)` over the given variable names.
pub(crate) fn flat_source(f: &Symbol, vars: impl IntoIterator<Item = crate::syntax::Var>) -> Term {
    Term::App(f.clone(), vars.into_iter().map(Term::Var).collect())
}
