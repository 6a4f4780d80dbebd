//! Ruloids, modal decomposition through open terms, and empirical checks
//! of the decomposition and precongruence results.

mod check;
mod inverse;
mod precongruence;
mod ruloids;

use thiserror::Error;

use crate::observe::{Formula, ObserveError};
use crate::semantics::SemanticsError;
use crate::syntax::Term;
use crate::transform::PipelineError;

pub use check::{check_inverse_images, format_tags, preservation_report, InverseCheck, InverseMismatch, PreservationEntry, PreservationReport};
pub use inverse::{inverse, Decomposition};
pub use precongruence::{
    closed_terms, fuzz_precongruence, precongruence_test, FuzzOptions, PrecongruenceOptions, PrecongruenceOutcome, PrecongruenceViolation,
};
pub use ruloids::{derive_ruloids, Decomposer, Derivation, Polarity, Ruloid};

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("rule {0} is not a decent xynft rule; run the plus pipeline first")]
    NotPrepared(String),
    #[error("formula {0} is outside the ready simulation language")]
    OutsideRs(Formula),
    #[error("{what} exceeded {cap} entries")]
    Explosion { what: &'static str, cap: usize },
    #[error("depth too small: {0} reaches the frontier of the fragment")]
    Depth(Term),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Observe(ObserveError),
}

impl From<ObserveError> for DecomposeError {
    fn from(e: ObserveError) -> DecomposeError {
        match e {
            ObserveError::Truncated(t) => DecomposeError::Depth(t),
            e => DecomposeError::Observe(e),
        }
    }
}

/// Mixed-radix increment; false once every combination has been visited.
pub(crate) fn odometer(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix(k) {
            return true;
        }
        digits[k] = 0;
    }
    false
}
