//! Support library for the `trishift` command-line tool: Matrix Market
//! I/O, field serialization, numeric formatting, and the benchmark
//! harness. The binary in `main.rs` wires these to the solver crate.

pub mod bench;
pub mod field;
pub mod fmt;
pub mod io;
