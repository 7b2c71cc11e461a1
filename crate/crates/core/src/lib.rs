//! A workbench for propositional default logic.
//!
//! The crate implements the operational (process-based) semantics of several
//! default-logic dialects, the simulation of any of them by a normal default
//! theory, and brute-force checks of the correspondence between the two.
//!
//! * [`logic`]: formulas, renaming, forgetting, clause form.
//! * [`sat`]: the consistency oracle every semantic test reduces to.
//! * [`theory`]: defaults, default theories, the `.dlt` format.
//! * [`process`]: processes, successfulness, closure, extensions.
//! * [`translate`]: translations into normal default logic.
//! * [`verify`]: random corpora, an independent extension oracle, and the
//!   correspondence checks.

pub mod error;
pub mod logic;
pub mod process;
pub mod sat;
pub mod theory;
pub mod translate;
pub mod verify;

#[cfg(doctest)]
mod guide;

pub use error::{EngineError, LogicError, ParseError, TheoryError, TranslateError, VerifyError};
pub use logic::{Atom, Formula, Renaming};
pub use process::{Extension, Process, Semantics};
pub use theory::{Default, DefaultTheory};
