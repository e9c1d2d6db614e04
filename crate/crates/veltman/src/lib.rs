//! Workbench for interpretability logics over Veltman semantics.
//!
//! The crate provides a formula language with the binary modality `|>`,
//! ordinary and generalised Veltman models with validation and forcing,
//! frame-condition checkers, the label algebra for assuring successors,
//! a Hilbert-style proof checker, and bounded decision procedures with
//! countermodel extraction.

pub mod cli;
pub mod decide;
pub mod formula;
pub mod gen;
pub mod genmodel;
pub mod labels;
pub mod model;
pub mod proofcheck;

pub use decide::{ilw_decide, sat_bounded, DecisionResult, Verdict};
pub use formula::{adequate_set, parse, print, AdequateSet, Formula, ParseError};
pub use genmodel::GeneralisedModel;
pub use labels::{semantic_assuring, Label};
pub use model::{OrdinaryModel, Principle};
pub use proofcheck::{check_proof, parse_script, Logic};
