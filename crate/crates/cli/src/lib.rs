//! Library surface of the command-line tool: the workspace format,
//! report assembly, DOT export, and command handlers. The binary in
//! `main.rs` is a thin wrapper.

pub mod cliargs;
pub mod commands;
pub mod dot;
pub mod reportfmt;
pub mod workspace;
