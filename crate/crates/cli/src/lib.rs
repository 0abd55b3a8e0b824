//! Report generation behind the `fortify` binary: experiment manifests,
//! table documents, and the subcommand implementations.

pub mod commands;
pub mod manifest;
pub mod report;
