//! Command-line front end: configuration parsing, dispatch and report files.

pub mod config;
pub mod output;
pub mod run;
