//! Bridge detection: finding the branches whose outage splits the grid.
//!
//! Four engines produce the same [`BridgeReport`] and are expected to agree
//! on every connected multigraph:
//!
//! * [`oracle_bridges`] removes each branch and counts components by BFS.
//! * [`tarjan_bridges`] is the one-pass low/num DFS.
//! * [`per_edge_tarjan_bridges`] re-runs the Tarjan DFS once per removed
//!   branch and counts DFS restarts.
//! * [`parallel_bridges`] runs a dual-frontier level-synchronous BFS per
//!   branch, with branches spread over a worker pool.
//!
//! Branches that share their endpoint pair with another branch are never
//! bridges and are skipped by every engine.

mod frontier;
mod oracle;
mod tarjan;

use std::fmt;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::grid::{connected_components, Adjacency, BranchId, Grid};

pub use frontier::{bfs_cc, parallel_bridges, BfsOutcome, DualFrontierState};
pub use oracle::oracle_bridges;
pub use tarjan::{per_edge_tarjan_bridges, per_edge_tarjan_bridges_with, tarjan_bridges, TarjanState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Oracle,
    Tarjan,
    PerEdge,
    Parallel,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Oracle => "oracle",
            Engine::Tarjan => "tarjan",
            Engine::PerEdge => "per-edge",
            Engine::Parallel => "parallel",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(Engine::Oracle),
            "tarjan" => Ok(Engine::Tarjan),
            "per-edge" => Ok(Engine::PerEdge),
            "parallel" => Ok(Engine::Parallel),
            other => Err(format!("unknown engine `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("base grid is not connected ({components} components)")]
    Disconnected { components: usize },
    #[error("branch {0} does not exist")]
    UnknownBranch(BranchId),
    #[error("branch {branch} has {multiplicity} parallel circuits and cannot be a bridge")]
    ParallelBranch { branch: BranchId, multiplicity: u32 },
    #[error("worker count must be at least 1")]
    NoWorkers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeReport {
    pub engine: Engine,
    /// Sorted ascending.
    pub bridge_ids: Vec<BranchId>,
    pub skipped_parallel: usize,
    /// Total BFS supersteps across all branches; parallel engine only.
    pub supersteps_total: usize,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct BridgeJson {
    branch: BranchId,
    from: u64,
    to: u64,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    engine: &'a str,
    bridges: Vec<BridgeJson>,
    bridges_count: usize,
    skipped_parallel: usize,
    elapsed_ms: f64,
}

impl BridgeReport {
    pub fn bridges_count(&self) -> usize {
        self.bridge_ids.len()
    }

    pub fn is_bridge(&self, branch: BranchId) -> bool {
        self.bridge_ids.binary_search(&branch).is_ok()
    }

    pub fn elapsed_ms(&self) -> f64 {
        round_ms(self.elapsed)
    }

    /// JSON document with endpoints given as external bus ids.
    pub fn to_json(&self, grid: &Grid) -> serde_json::Value {
        let bridges = self
            .bridge_ids
            .iter()
            .map(|&id| {
                let b = &grid.branches()[id];
                BridgeJson {
                    branch: id,
                    from: grid.bus_id(b.from_bus),
                    to: grid.bus_id(b.to_bus),
                }
            })
            .collect();
        serde_json::to_value(ReportJson {
            engine: self.engine.name(),
            bridges,
            bridges_count: self.bridges_count(),
            skipped_parallel: self.skipped_parallel,
            elapsed_ms: self.elapsed_ms(),
        })
        .expect("report serializes")
    }

    /// CSV rows `branch,from,to`.
    pub fn to_csv(&self, grid: &Grid) -> String {
        let mut out = String::from("branch,from,to\n");
        for &id in &self.bridge_ids {
            let b = &grid.branches()[id];
            out.push_str(&format!("{},{},{}\n", id, grid.bus_id(b.from_bus), grid.bus_id(b.to_bus)));
        }
        out
    }
}

/// Wall-clock milliseconds rounded to three decimals.
pub fn round_ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

pub(crate) fn ensure_connected(adjacency: &Adjacency) -> Result<(), BridgeError> {
    if crate::grid::is_connected(adjacency) {
        return Ok(());
    }
    let (components, _) = connected_components(adjacency, None);
    Err(BridgeError::Disconnected { components })
}

pub(crate) fn count_parallel(adjacency: &Adjacency) -> usize {
    (0..adjacency.branch_count())
        .filter(|&b| adjacency.is_parallel(b))
        .count()
}

/// Run the named engine. `workers` only matters for the parallel engine.
pub fn detect(
    engine: Engine,
    grid: &Grid,
    adjacency: &Adjacency,
    workers: usize,
) -> Result<BridgeReport, BridgeError> {
    match engine {
        Engine::Oracle => oracle_bridges(grid, adjacency),
        Engine::Tarjan => Ok(tarjan_bridges(grid, adjacency)),
        Engine::PerEdge => per_edge_tarjan_bridges(grid, adjacency),
        Engine::Parallel => parallel_bridges(grid, adjacency, workers),
    }
}
