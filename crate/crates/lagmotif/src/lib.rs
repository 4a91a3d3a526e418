//! Command-line driver and file formats for `lagmotif-core`.
//!
//! Series are read from CSV ([`io::load_csv`]), benchmark pairs are stored
//! as CSV plus a JSON ground-truth sidecar ([`dataset`]), and every
//! analysis result can be written as JSON or CSV ([`report`]).

pub mod cli;
pub mod dataset;
pub mod evaluate;
pub mod io;
pub mod report;
