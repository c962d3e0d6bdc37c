//! Figure-data harness for the `toa-core` laboratory.
//!
//! A [`RunConfig`] names the packet, grid, detector and numerical settings;
//! [`run`] validates it and produces [`FigureBundle`]s, which
//! [`write_bundles`] stores as CSV or JSON.

pub mod bundle;
pub mod config;
pub mod run;

pub use bundle::{Column, FigureBundle, ParseError};
pub use config::{Diagnostic, Experiment, Format, Overrides, RunConfig};
pub use run::{run, write_bundles, RunError, CODE_VERSION};
