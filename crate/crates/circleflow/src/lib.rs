//! IO, file formats, and reports for the `circleflow` command-line tool.
//!
//! The algorithmic core lives in `circleflow-core`; this crate adds the
//! decomposition file schema, the run-report document, and the trajectory
//! CSV writer that the binary ties together.

#![warn(missing_docs)]

pub mod format;
pub mod report;
