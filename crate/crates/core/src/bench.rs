//! Timing harness for the bridge engines.

use std::time::Instant;

use serde::Serialize;

use crate::bridges::{parallel_bridges, per_edge_tarjan_bridges_with, tarjan_bridges, BridgeError};
use crate::grid::{Adjacency, DenseAdjacency, Grid, DEFAULT_DENSE_CAP};

pub const DEFAULT_WORKER_SWEEP: [usize; 5] = [1, 4, 8, 16, 32];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub worker_counts: Vec<usize>,
    pub reps: usize,
    /// The dense per-edge baseline runs only when `|V|` is at most this.
    pub dense_cap: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            worker_counts: DEFAULT_WORKER_SWEEP.to_vec(),
            reps: 5,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub engine: String,
    /// Worker threads; `None` for the sequential engines.
    pub workers: Option<usize>,
    pub reps: usize,
    pub mean_ms: f64,
    pub min_ms: f64,
    pub bridges_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub buses: usize,
    pub branches: usize,
    pub available_cores: usize,
    pub rows: Vec<BenchRow>,
    pub notices: Vec<String>,
}

impl BenchTable {
    /// Mean time of the 1-worker parallel row over the `workers` row.
    pub fn speedup(&self, workers: usize) -> Option<f64> {
        let mean = |w: usize| {
            self.rows
                .iter()
                .find(|r| r.engine == "parallel" && r.workers == Some(w))
                .map(|r| r.mean_ms)
        };
        let base = mean(1)?;
        let other = mean(workers)?;
        (other > 0.0).then(|| base / other)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("engine,workers,reps,mean_ms,min_ms,bridges_count\n");
        for r in &self.rows {
            let workers = r.workers.map(|w| w.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:.3},{:.3},{}\n",
                r.engine, workers, r.reps, r.mean_ms, r.min_ms, r.bridges_count
            ));
        }
        out
    }
}

fn time_reps(reps: usize, mut run: impl FnMut() -> Result<usize, BridgeError>) -> Result<(f64, f64, usize), BridgeError> {
    let mut total = 0.0;
    let mut best = f64::INFINITY;
    let mut count = 0;
    for _ in 0..reps {
        let started = Instant::now();
        count = run()?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        total += ms;
        best = best.min(ms);
    }
    Ok((total / reps as f64, best, count))
}

pub fn available_cores() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Time the parallel engine at each worker count, then the sequential
/// one-pass Tarjan and (when small enough) the dense per-edge Tarjan.
pub fn run_bench(grid: &Grid, config: &BenchConfig) -> Result<BenchTable, BridgeError> {
    let reps = config.reps.max(1);
    let adjacency = Adjacency::build(grid);
    let mut rows = Vec::new();
    let mut notices = Vec::new();

    for &workers in &config.worker_counts {
        let (mean_ms, min_ms, bridges_count) =
            time_reps(reps, || parallel_bridges(grid, &adjacency, workers).map(|r| r.bridges_count()))?;
        rows.push(BenchRow {
            engine: "parallel".into(),
            workers: Some(workers),
            reps,
            mean_ms,
            min_ms,
            bridges_count,
        });
    }

    let (mean_ms, min_ms, bridges_count) = time_reps(reps, || Ok(tarjan_bridges(grid, &adjacency).bridges_count()))?;
    rows.push(BenchRow {
        engine: "tarjan".into(),
        workers: None,
        reps,
        mean_ms,
        min_ms,
        bridges_count,
    });

    match DenseAdjacency::build(grid, config.dense_cap) {
        Ok(dense) => {
            let (mean_ms, min_ms, bridges_count) =
                time_reps(reps, || per_edge_tarjan_bridges_with(grid, &dense).map(|r| r.bridges_count()))?;
            rows.push(BenchRow {
                engine: "per-edge-dense".into(),
                workers: None,
                reps,
                mean_ms,
                min_ms,
                bridges_count,
            });
        }
        Err(e) => notices.push(format!("per-edge-dense skipped: {e}")),
    }

    Ok(BenchTable {
        buses: grid.bus_count(),
        branches: grid.branch_count(),
        available_cores: available_cores(),
        rows,
        notices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_fixture_f1;

    #[test]
    fn f1_table() {
        let grid = build_fixture_f1();
        let config = BenchConfig {
            worker_counts: vec![1, 2],
            reps: 2,
            ..BenchConfig::default()
        };
        let table = run_bench(&grid, &config).unwrap();
        let engines: Vec<&str> = table.rows.iter().map(|r| r.engine.as_str()).collect();
        assert_eq!(engines, ["parallel", "parallel", "tarjan", "per-edge-dense"]);
        assert!(table.rows.iter().all(|r| r.bridges_count == 2));
        assert!(table.speedup(2).is_some());
        assert!(table.notices.is_empty());
        let csv = table.to_csv();
        assert!(csv.starts_with("engine,workers,reps,mean_ms,min_ms,bridges_count\nparallel,1,2,"));
        assert!(csv.contains("\ntarjan,,2,"));
    }

    #[test]
    fn dense_cap_skips_baseline() {
        let grid = build_fixture_f1();
        let config = BenchConfig {
            worker_counts: vec![1],
            reps: 1,
            dense_cap: 5,
        };
        let table = run_bench(&grid, &config).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.notices.len(), 1);
        assert!(table.notices[0].contains("skipped"));
    }
}
