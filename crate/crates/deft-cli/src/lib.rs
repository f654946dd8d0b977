//! File formats and command plumbing for the `deft` binary.
//!
//! [`formats`] holds a reader/writer pair per artifact, [`commands`] the
//! clap definitions and per-subcommand drivers, [`error`] the exit-code
//! taxonomy, and [`io`] the atomic-write and float-formatting helpers the
//! formats share.

pub mod commands;
pub mod error;
pub mod formats;
pub mod io;
