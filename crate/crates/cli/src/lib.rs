//! Command-line front end for `trop-refine`: JSON payloads, SVG output and
//! the `g0 | g1 | mult | check | render` commands.

pub mod app;
pub mod dto;
pub mod svg;

pub use app::{run, Cli, Failure, Output};
