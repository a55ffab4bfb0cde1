//! Command-line front end, file formats and experiment drivers for
//! `kcoreset-core`.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod gen;
pub mod io;
