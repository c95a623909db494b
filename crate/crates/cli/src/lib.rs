//! Parsing and canonical-emission support for the `lcstoric` binary.

pub mod report;
pub mod spec;
