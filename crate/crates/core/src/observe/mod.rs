//! Modal observations, their sublanguages, satisfaction on fragments,
//! decorated traces, simulations and the preorders they induce.

mod formula;
mod language;
mod preorder;
mod sat;
mod sim;
mod traces;

use thiserror::Error;

use crate::syntax::{Action, Term};

pub use formula::Formula;
pub use language::Sublanguage;
pub use preorder::{observations, preorder_holds, preorder_modal, preorder_modal_conjunctive, MAX_OBSERVATION_SIZE};
pub use sat::{holds, satisfies, Truth};
pub use sim::{simulation_preorder, SimKind, SimRelation};
pub use traces::{decorated_traces, included, Decorated, DecoratedKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObserveError {
    #[error("formula syntax: {0}")]
    Parse(String),
    #[error("negation needs a fragment without undecided transitions")]
    NegationOnThreeValued,
    #[error("behaviour of `{0}` is cut off by the fragment bound")]
    Truncated(Term),
    #[error("`{0}` neither can nor provably cannot do `{1}`")]
    Incomplete(Term, Action),
    #[error("observations exceed the size cap of {cap}")]
    Blowup { cap: usize },
}
