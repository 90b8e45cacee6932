//! Library side of the `readgauge` command: corpus manifests, score files,
//! resource loading and the subcommands.

pub mod app;
pub mod corpus;
pub mod resources;

pub use app::{run, Cli, Command};
