//! Command-line driver and HTTP game service.

pub mod commands;
pub mod server;
