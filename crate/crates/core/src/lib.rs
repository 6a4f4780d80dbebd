//! Rule formats for transition system specifications: format checking, the
//! plus construction for negative premises, well-supported semantics, modal
//! characterisations of behavioural preorders and their decomposition.

pub mod acceptance;
pub mod fixtures;
pub mod decompose;
pub mod format;
pub mod gen;
pub mod observe;
pub mod semantics;
pub mod transform;
pub mod syntax;

pub use syntax::{parse_term, parse_tss, print_tss, Action, Literal, Rule, Symbol, Term, Tss, Var};
