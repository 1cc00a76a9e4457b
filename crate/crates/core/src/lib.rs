//! Bimodal product logics over two-dimensional frames.
//!
//! The crate provides a model checker and bounded satisfiability search for
//! the bimodal language with `<0>` (horizontal) and `<1>` (vertical)
//! diamonds, a first-order temporal front end, counter machines, compilers
//! from machine problems into formulas, witness model builders and a
//! finite-model shrinking procedure.

pub mod formula;

pub use formula::{Formula, ParseError};
pub mod frames;
pub mod semantics;
pub mod foltl;
pub mod machines;
pub mod reductions;
pub mod witnesses;
pub mod fmp;
