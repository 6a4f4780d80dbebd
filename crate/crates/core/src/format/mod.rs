//! Rule shapes, liquid and frozen argument positions, and format membership.

mod check;
mod classify;
mod conservative;
mod lambda;
mod occurrence;

pub use check::{
    check_format, lambda0, minimal_lambdas, rule_safety, Clause, Format, FormatReport, LambdaMode, Safety, TooManyPositions,
    UnknownFormat, Violation, EXHAUSTIVE_LIMIT,
};
pub use classify::{classify, decent_direct, has_no_lookahead, is_ntytt, RuleClass};
pub use conservative::{check_conservative_syntactic, ConservativityReport};
pub use lambda::{all_positions, liquid_occurrence, positions_along, ArgPos, Lambda};
pub use occurrence::{Occurrence, OccurrenceReport, Site};
