//! Propositional formulas: syntax, substitution, evaluation, forgetting, and
//! clause form.

pub(crate) mod clauses;
mod formula;
pub(crate) mod syntax;

pub use clauses::{Clause, Literal};
pub(crate) use formula::is_identifier;
pub use formula::{Assignment, Atom, Formula, Renaming, RESERVED_PREFIX};
