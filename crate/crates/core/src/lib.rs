//! Grid-splitting detection and DC N-1 fast screening.
//!
//! * [`grid`] parses and indexes the bus/branch multigraph.
//! * [`bridges`] finds branches whose outage islands part of the grid.
//! * [`screening`] ranks the remaining single-branch outages by a
//!   severity index computed from superposed DC power flows.
//! * [`synth`] generates reproducible test networks.
//! * [`bench`] times the detection engines across worker counts.

pub mod bridges;
pub mod grid;
pub mod bench;
pub mod screening;
pub mod synth;
