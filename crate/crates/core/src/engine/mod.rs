//! Bounded decision procedures for the five well-formedness properties.

mod bounds;
mod checks;
mod dbm;
mod domain;
mod search;
mod verdict;

pub use bounds::{Bounds, DEFAULT_NODE_BUDGET};
pub use checks::{
    check, check_insufficient, check_redundant, check_restrictive, check_situational, check_vacuous, CheckError,
};
pub use domain::AbstractDomain;
pub use search::{find_extension, find_trace, Budget, BudgetExhausted, Constraint};
pub use verdict::{Property, Status, Verdict};
