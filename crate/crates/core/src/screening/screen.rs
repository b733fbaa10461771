use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::base::{build_base_case, superposition_outage, DcBaseCase, OutageError};
use super::severity::severity_index;
use super::ScreeningError;
use crate::bridges::{round_ms, BridgeReport};
use crate::grid::{BranchId, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedOutage {
    pub branch: BranchId,
    pub severity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningResult {
    /// Descending by severity, ties by ascending branch id.
    pub ranked: Vec<RankedOutage>,
    pub excluded_bridges: usize,
    pub excluded_voltage: usize,
    /// Outages actually evaluated: `ranked.len() + failures.len()`.
    pub screened: usize,
    pub failures: Vec<(BranchId, OutageError)>,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct RowJson {
    rank: usize,
    branch_id: BranchId,
    from_bus: u64,
    to_bus: u64,
    #[serde(rename = "SI")]
    si: f64,
}

#[derive(Serialize)]
struct FailureJson {
    branch_id: BranchId,
    reason: String,
}

#[derive(Serialize)]
struct ResultJson {
    ranked: Vec<RowJson>,
    excluded_bridges: usize,
    excluded_voltage: usize,
    screened: usize,
    failures: Vec<FailureJson>,
    elapsed_ms: f64,
}

impl ScreeningResult {
    pub fn elapsed_ms(&self) -> f64 {
        round_ms(self.elapsed)
    }

    fn rows<'a>(&'a self, grid: &'a Grid, top: Option<usize>) -> impl Iterator<Item = RowJson> + 'a {
        self.ranked
            .iter()
            .take(top.unwrap_or(usize::MAX))
            .enumerate()
            .map(|(i, r)| {
                let b = &grid.branches()[r.branch];
                RowJson {
                    rank: i + 1,
                    branch_id: r.branch,
                    from_bus: grid.bus_id(b.from_bus),
                    to_bus: grid.bus_id(b.to_bus),
                    si: r.severity,
                }
            })
    }

    pub fn to_json(&self, grid: &Grid, top: Option<usize>) -> serde_json::Value {
        serde_json::to_value(ResultJson {
            ranked: self.rows(grid, top).collect(),
            excluded_bridges: self.excluded_bridges,
            excluded_voltage: self.excluded_voltage,
            screened: self.screened,
            failures: self
                .failures
                .iter()
                .map(|(b, e)| FailureJson {
                    branch_id: *b,
                    reason: e.to_string(),
                })
                .collect(),
            elapsed_ms: self.elapsed_ms(),
        })
        .expect("result serializes")
    }

    /// `rank,branch_id,from_bus,to_bus,SI` rows.
    pub fn to_csv(&self, grid: &Grid, top: Option<usize>) -> String {
        let mut out = String::from("rank,branch_id,from_bus,to_bus,SI\n");
        for row in self.rows(grid, top) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.rank, row.branch_id, row.from_bus, row.to_bus, row.si
            ));
        }
        out
    }
}

/// Screen every non-bridge branch at or above `min_kv`.
///
/// Branches with unknown voltage (0 kV) are kept. The base case is factored
/// once; outages are spread over `workers` threads that share the factors.
pub fn fast_screen(
    grid: &Grid,
    bridges: &BridgeReport,
    min_kv: f64,
    workers: usize,
) -> Result<ScreeningResult, ScreeningError> {
    let started = Instant::now();
    let base = build_base_case(grid)?;
    let mut result = fast_screen_with(grid, &base, bridges, min_kv, workers)?;
    result.elapsed = started.elapsed();
    Ok(result)
}

/// [`fast_screen`] against an already-built base case.
pub fn fast_screen_with(
    grid: &Grid,
    base: &DcBaseCase,
    bridges: &BridgeReport,
    min_kv: f64,
    workers: usize,
) -> Result<ScreeningResult, ScreeningError> {
    let started = Instant::now();
    if workers == 0 {
        return Err(ScreeningError::NoWorkers);
    }
    if let Some(&bad) = bridges.bridge_ids.iter().find(|&&b| b >= grid.branch_count()) {
        return Err(ScreeningError::BridgeOutOfRange(bad));
    }

    let mut excluded_bridges = 0;
    let mut excluded_voltage = 0;
    let mut candidates = Vec::new();
    for b in grid.branches() {
        if bridges.is_bridge(b.id) {
            excluded_bridges += 1;
        } else if b.voltage_kv > 0.0 && b.voltage_kv < min_kv {
            excluded_voltage += 1;
        } else {
            candidates.push(b.id);
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to start worker pool");
    let outcomes: Vec<(BranchId, Result<f64, OutageError>)> = pool.install(|| {
        candidates
            .par_iter()
            .map(|&b| {
                let si = superposition_outage(base, grid, b).map(|u| severity_index(&u.flows, grid, b));
                (b, si)
            })
            .collect()
    });

    let mut ranked = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (branch, outcome) in outcomes {
        match outcome {
            Ok(severity) => ranked.push(RankedOutage { branch, severity }),
            Err(e) => failures.push((branch, e)),
        }
    }
    ranked.sort_by(|a, b| b.severity.total_cmp(&a.severity).then(a.branch.cmp(&b.branch)));

    Ok(ScreeningResult {
        ranked,
        excluded_bridges,
        excluded_voltage,
        screened: candidates.len(),
        failures,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridges::tarjan_bridges;
    use crate::grid::{build_fixture_f1, Adjacency, BranchSpec, GridBuilder};

    fn screen(grid: &Grid, min_kv: f64, workers: usize) -> ScreeningResult {
        let report = tarjan_bridges(grid, &Adjacency::build(grid));
        fast_screen(grid, &report, min_kv, workers).unwrap()
    }

    #[test]
    fn f1_covers_non_bridges() {
        let grid = build_fixture_f1();
        let result = screen(&grid, 0.0, 2);
        assert_eq!(result.ranked.len(), 11);
        assert_eq!(result.excluded_bridges, 2);
        assert_eq!(result.screened, 11);
        assert!(result.failures.is_empty());
        assert!(result.ranked.windows(2).all(|w| w[0].severity >= w[1].severity));
        assert!(result.ranked.iter().all(|r| r.severity.is_finite() && r.severity >= 0.0));
    }

    #[test]
    fn distinct_parallel_parameters_give_distinct_severity() {
        let twins = build_fixture_f1().branches_between(2, 3);
        let grid = build_fixture_f1().map_branches(|b| {
            if b.id == twins[1] {
                b.reactance = 2.0;
            }
        });
        let result = screen(&grid, 0.0, 1);
        let si = |id| result.ranked.iter().find(|r| r.branch == id).unwrap().severity;
        assert!((si(twins[0]) - si(twins[1])).abs() > 1e-6);
    }

    #[test]
    fn tree_has_nothing_to_screen() {
        let grid = GridBuilder::new()
            .bus(1, 10.0, 0.0)
            .bus(2, -5.0, 0.0)
            .bus(3, -5.0, 0.0)
            .branch(BranchSpec::new(1, 2, 0.1, 100.0))
            .branch(BranchSpec::new(1, 3, 0.1, 100.0))
            .slack(1)
            .build()
            .unwrap();
        let result = screen(&grid, 0.0, 1);
        assert!(result.ranked.is_empty());
        assert_eq!(result.excluded_bridges, 2);
    }

    #[test]
    fn voltage_floor_keeps_unknown_voltage() {
        let grid = build_fixture_f1().map_branches(|b| {
            b.voltage_kv = match b.id {
                1 | 3 => 10.0,
                4 => 110.0,
                _ => 0.0,
            }
        });
        let result = screen(&grid, 35.0, 1);
        assert_eq!(result.excluded_voltage, 2);
        assert_eq!(result.ranked.len(), 9);
        assert!(result.ranked.iter().all(|r| r.branch != 1 && r.branch != 3));
    }

    #[test]
    fn csv_and_top() {
        let grid = build_fixture_f1();
        let result = screen(&grid, 0.0, 1);
        let csv = result.to_csv(&grid, Some(5));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rank,branch_id,from_bus,to_bus,SI");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("1,"));
        let json = result.to_json(&grid, Some(5));
        assert_eq!(json["ranked"].as_array().unwrap().len(), 5);
        assert_eq!(json["ranked"][0]["rank"], 1);
    }

    #[test]
    fn workers_do_not_change_the_ranking() {
        let grid = build_fixture_f1();
        let one = screen(&grid, 0.0, 1);
        let four = screen(&grid, 0.0, 4);
        assert_eq!(one.ranked, four.ranked);
    }
}
