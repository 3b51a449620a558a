//! Generators, structure files, verification suites and reports for
//! `codazzi-core`.

pub mod cli;
pub mod error;
pub mod generate;
pub mod json;
pub mod report;
pub mod structure;
pub mod suites;

pub use error::{Error, Result};
