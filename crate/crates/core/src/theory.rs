//! Defaults, default theories, and the `.dlt` text format.
//!
//! ```text
//! # comment
//! W: a.                 background theory (optional, at most one)
//! d1: a : b / c.        default  name: prec : just / cons.
//! d2: : ~h / ~h.        empty precondition means `true`
//! d3: ~h : / false.     empty justification means `true`
//! ```
//!
//! A file whose first line is `#generated` may use atoms with the reserved
//! `__` prefix; other files may not.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{ParseError, TheoryError};
use crate::logic::syntax::{lex, Parser, Tok};
use crate::logic::{Atom, Formula};
use crate::sat::Oracle;

pub const GENERATED_HEADER: &str = "#generated";

/// A default `prec : just / cons`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Default {
    pub name: String,
    pub prec: Formula,
    pub just: Formula,
    pub cons: Formula,
}

impl Default {
    pub fn new(name: impl Into<String>, prec: Formula, just: Formula, cons: Formula) -> Default {
        Default { name: name.into(), prec, just, cons }
    }

    /// A normal default `prec : cons / cons`.
    pub fn normal(name: impl Into<String>, prec: Formula, cons: Formula) -> Default {
        Default { name: name.into(), prec, just: cons.clone(), cons }
    }
}

/// An ordered list of defaults over a consistent background theory.
///
/// The only constructors validate, so a value of this type always has a
/// consistent background and pairwise distinct default names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefaultTheory {
    defaults: Vec<Default>,
    background: Formula,
}

/// Reasoning mode for queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reasoning {
    Skeptical,
    Credulous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub formula: Formula,
    pub mode: Reasoning,
}

impl DefaultTheory {
    /// Validates names and background consistency. Reserved atoms are
    /// accepted here; only the text parser rejects them.
    pub fn new(defaults: Vec<Default>, background: Formula) -> Result<DefaultTheory, TheoryError> {
        let mut seen = HashSet::new();
        for d in &defaults {
            if !crate::logic::is_identifier(&d.name) {
                return Err(TheoryError::InvalidName(d.name.clone()));
            }
            if !seen.insert(d.name.as_str()) {
                return Err(TheoryError::DuplicateName(d.name.clone()));
            }
        }
        if !Oracle::new().is_consistent([&background]) {
            return Err(TheoryError::InconsistentBackground);
        }
        Ok(DefaultTheory { defaults, background })
    }

    pub fn parse(text: &str) -> Result<DefaultTheory, TheoryError> {
        parse_theory(text)
    }

    pub fn defaults(&self) -> &[Default] {
        &self.defaults
    }

    pub fn background(&self) -> &Formula {
        &self.background
    }

    pub fn len(&self) -> usize {
        self.defaults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defaults.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.defaults.iter().position(|d| d.name == name)
    }

    /// The alphabet: every atom of the background and of the defaults.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.background.collect_atoms(&mut out);
        for d in &self.defaults {
            d.prec.collect_atoms(&mut out);
            d.just.collect_atoms(&mut out);
            d.cons.collect_atoms(&mut out);
        }
        out
    }

    pub fn has_generated_atoms(&self) -> bool {
        self.atoms().iter().any(Atom::is_generated)
    }

    /// Every justification is equivalent to its consequence.
    pub fn is_normal(&self) -> bool {
        let oracle = Oracle::new();
        self.defaults.iter().all(|d| oracle.equivalent(&d.just, &d.cons))
    }

    /// The same theory with each justification replaced by its consequence.
    pub fn normalized(&self) -> DefaultTheory {
        let defaults = self
            .defaults
            .iter()
            .map(|d| Default::normal(d.name.clone(), d.prec.clone(), d.cons.clone()))
            .collect();
        DefaultTheory { defaults, background: self.background.clone() }
    }

    pub fn serialize(&self) -> String {
        serialize_theory(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct DefaultJson {
            name: String,
            prec: String,
            just: String,
            cons: String,
        }
        #[derive(Serialize)]
        struct TheoryJson {
            background: String,
            defaults: Vec<DefaultJson>,
        }
        let view = TheoryJson {
            background: self.background.to_string(),
            defaults: self
                .defaults
                .iter()
                .map(|d| DefaultJson {
                    name: d.name.clone(),
                    prec: d.prec.to_string(),
                    just: d.just.to_string(),
                    cons: d.cons.to_string(),
                })
                .collect(),
        };
        serde_json::to_value(view).expect("theory view serializes")
    }
}

/// Parses and validates a `.dlt` document.
pub fn parse_theory(text: &str) -> Result<DefaultTheory, TheoryError> {
    let generated = text.lines().next().map(str::trim_end) == Some(GENERATED_HEADER);
    let toks = lex(text)?;
    let mut p = Parser::new(&toks);
    let mut background: Option<Formula> = None;
    let mut defaults = Vec::new();
    while *p.peek() != Tok::Eof {
        let name = match p.peek().clone() {
            Tok::Ident(name) => name,
            other => return Err(p.error(format!("expected a statement name, found {other}")).into()),
        };
        p.bump();
        p.expect(Tok::Colon)?;
        let first = optional_formula(&mut p)?;
        match p.peek() {
            Tok::Dot if name == "W" => {
                p.bump();
                let f = first.ok_or_else(|| p.error("background needs a formula"))?;
                if background.replace(f).is_some() {
                    return Err(TheoryError::DuplicateBackground);
                }
            }
            Tok::Colon => {
                p.bump();
                let just = optional_formula(&mut p)?;
                p.expect(Tok::Slash)?;
                let cons = p.formula()?;
                p.expect(Tok::Dot)?;
                defaults.push(Default {
                    name,
                    prec: first.unwrap_or(Formula::True),
                    just: just.unwrap_or(Formula::True),
                    cons,
                });
            }
            other => {
                let msg = if name == "W" {
                    format!("expected `.` or `:`, found {other}")
                } else {
                    format!("expected `:`, found {other}")
                };
                return Err(p.error(msg).into());
            }
        }
    }
    let theory = DefaultTheory::new(defaults, background.unwrap_or(Formula::True))?;
    if !generated {
        if let Some(a) = theory.atoms().into_iter().find(Atom::is_generated) {
            return Err(TheoryError::ReservedAtom(a));
        }
    }
    Ok(theory)
}

fn optional_formula(p: &mut Parser<'_>) -> Result<Option<Formula>, ParseError> {
    if p.at_formula_start() {
        p.formula().map(Some)
    } else {
        Ok(None)
    }
}

/// Renders a theory in `.dlt` syntax. Theories with reserved atoms get the
/// `#generated` header so that they reparse.
pub fn serialize_theory(t: &DefaultTheory) -> String {
    serialize_with_comments(t, &[])
}

/// Like [`serialize_theory`], with extra lines after the header. Each line
/// must be a `#` comment.
pub fn serialize_with_comments(t: &DefaultTheory, comments: &[String]) -> String {
    let mut out = String::new();
    if t.has_generated_atoms() {
        out.push_str(GENERATED_HEADER);
        out.push('\n');
    }
    for c in comments {
        debug_assert!(c.starts_with('#'));
        let _ = writeln!(out, "{c}");
    }
    if t.background != Formula::True {
        let _ = writeln!(out, "W: {}.", t.background);
    }
    for d in &t.defaults {
        let _ = write!(out, "{}:", d.name);
        if d.prec != Formula::True {
            let _ = write!(out, " {}", d.prec);
        }
        out.push_str(" :");
        if d.just != Formula::True {
            let _ = write!(out, " {}", d.just);
        }
        let _ = writeln!(out, " / {}.", d.cons);
    }
    out
}
