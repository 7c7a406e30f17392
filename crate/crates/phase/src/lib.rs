//! Command-line front end for `yamabe-core`: runs the classification,
//! shooting and sweep procedures and writes CSV, JSON and SVG output.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

pub use commands::{run, Outcome};
pub use config::{Command, Grid, RunConfig, Window};
