//! Ground programs over a bounded universe and the provability notions
//! evaluated on them: standard, supported and well-supported.

mod eval;
mod ground;
mod lts;
mod provable;

use thiserror::Error;

use crate::syntax::{Action, Term};

pub use ground::{ground_program, Closure, GroundOptions, GroundProgram, Instance};
pub use lts::{
    build_lts, build_lts_with, check_complete, check_conservative_semantic, Completeness, ConservativeVerdict, LtsFragment,
    PairStatus, TransitionRelation3,
};
pub use provable::{relation, standard_provable, supported_provable, ws_provable, Notion};

/// A source term paired with an action.
pub type Pair = (Term, Action);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("root `{0}` is not a closed term")]
    NotClosed(Term),
    #[error("root `{0}` is not well formed over the signature")]
    IllFormed(Term),
    #[error("{what} grew to {size}, above the cap of {cap}")]
    Explosion { what: &'static str, size: usize, cap: usize },
    #[error("the well-supported and supported notions need a standard specification")]
    NotStandard,
    #[error("signature of the first specification is not contained in the second")]
    SignatureMismatch,
}
