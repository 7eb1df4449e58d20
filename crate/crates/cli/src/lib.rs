//! Command-line driver for the invmon toolkit: argument handling, the
//! approximation cache and JSON report rendering.

pub mod cache;
pub mod commands;
