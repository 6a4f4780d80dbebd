//! Terms, literals, rules and specifications, with the text format.

mod alpha;
mod parse;
mod print;
mod rule;
mod subst;
mod term;
mod tss;

pub use alpha::{alpha_canonical, alpha_canonical_fixing, alpha_equal, alpha_key, dedup_alpha};
pub(crate) use alpha::canonical_fixing_as;
pub use parse::{parse_literal, parse_term, parse_tss, ParseError, ParseErrorKind};
pub use print::print_tss;
pub use rule::{Instantiation, Literal, Rule};
pub use subst::Subst;
pub use term::{Action, Path, Symbol, Term, Var};
pub use tss::{ActionOrder, Fresh, FunctionDecl, Signature, Tss};
