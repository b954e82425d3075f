//! Acceptance suite for `emitcorr`.
//!
//! The checks themselves live in [`emitcorr::verify`] so that the command-line
//! tool can run them too; this package only hosts the `acceptance` test
//! target, which runs after the unit, property and command-line tests of the
//! other packages.

pub use emitcorr::verify::{criterion, select, CriterionReport, CRITERIA};
