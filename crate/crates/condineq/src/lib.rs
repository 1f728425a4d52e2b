//! File formats, reports and the command-line front end for `condineq-core`.

pub mod cli;
pub mod error;
pub mod golden;
pub mod io;
pub mod params;
pub mod render;
