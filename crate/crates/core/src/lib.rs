//! Authoring and well-formedness analysis for SLEEC normative rules.
//!
//! The pipeline runs front to back:
//!
//! * [`syntax`] tokenizes and parses `.sleec` text into a [`syntax::Document`];
//! * [`sema`] resolves names, type-checks conditions, offers completions, and
//!   lowers a clean document into a [`sema::Model`];
//! * [`semantics`] defines traces and when they satisfy rules or raise
//!   concerns and purposes;
//! * [`engine`] decides the five well-formedness properties by bounded
//!   search, and [`oracle`] decides the same properties by brute force on
//!   tiny instances;
//! * [`diagnostics`] turns verdicts into filtered, stakeholder-facing
//!   diagnoses.

pub mod diagnostics;
pub mod engine;
pub mod instances;
pub mod oracle;
pub mod sema;
pub mod semantics;
pub mod syntax;
