use std::time::Instant;

use rayon::prelude::*;

use super::{count_parallel, ensure_connected, BridgeError, BridgeReport, Engine};
use crate::grid::{Adjacency, BranchId, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BfsOutcome {
    /// 1 if the endpoints stay connected, 2 if the grid splits.
    pub components: u8,
    pub supersteps: usize,
}

/// Scratch for the dual-frontier BFS.
///
/// `cc1` / `cc2` mark vertices reached from the from-side `u` and the to-side
/// `v` of the removed branch. A mark is "set" when it equals the current
/// epoch, so the arrays are never cleared between branches. Marks only grow
/// within a run.
#[derive(Debug, Clone)]
pub struct DualFrontierState {
    cc1: Vec<u32>,
    cc2: Vec<u32>,
    epoch: u32,
    frontier1: Vec<usize>,
    frontier2: Vec<usize>,
    next: Vec<usize>,
    /// Vertices newly labeled on each side in the last superstep.
    pub cc1_vts: usize,
    pub cc2_vts: usize,
    /// 0 while undecided, 1 once the two sides met.
    pub cc_count: u8,
}

impl DualFrontierState {
    pub fn new(vertices: usize) -> Self {
        DualFrontierState {
            cc1: vec![0; vertices],
            cc2: vec![0; vertices],
            epoch: 0,
            frontier1: Vec::new(),
            frontier2: Vec::new(),
            next: Vec::new(),
            cc1_vts: 0,
            cc2_vts: 0,
            cc_count: 0,
        }
    }

    fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.cc1.fill(0);
            self.cc2.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    pub fn in_cc1(&self, w: usize) -> bool {
        self.cc1[w] == self.epoch
    }

    pub fn in_cc2(&self, w: usize) -> bool {
        self.cc2[w] == self.epoch
    }

    /// Level-synchronous BFS from both ends of `removed`, never crossing it.
    /// Each superstep expands both label sets by one level; the run stops
    /// with one component as soon as a vertex carries both labels, or with
    /// two once either side labels nothing new.
    pub fn run(&mut self, adjacency: &Adjacency, removed: BranchId) -> BfsOutcome {
        let (u, v) = adjacency.endpoints(removed);
        let epoch = self.next_epoch();
        self.cc1[u] = epoch;
        self.cc2[v] = epoch;
        self.frontier1.clear();
        self.frontier1.push(u);
        self.frontier2.clear();
        self.frontier2.push(v);
        self.cc_count = 0;

        let mut supersteps = 0;
        loop {
            supersteps += 1;

            let met = expand(adjacency, removed, epoch, &mut self.frontier1, &mut self.next, &mut self.cc1, &self.cc2);
            self.cc1_vts = self.frontier1.len();
            if met {
                self.cc_count = 1;
                return BfsOutcome {
                    components: 1,
                    supersteps,
                };
            }

            let met = expand(adjacency, removed, epoch, &mut self.frontier2, &mut self.next, &mut self.cc2, &self.cc1);
            self.cc2_vts = self.frontier2.len();
            if met {
                self.cc_count = 1;
                return BfsOutcome {
                    components: 1,
                    supersteps,
                };
            }

            if self.cc1_vts == 0 || self.cc2_vts == 0 {
                return BfsOutcome {
                    components: 2,
                    supersteps,
                };
            }
        }
    }
}

/// Replace `frontier` by its unlabeled neighbors, labeling them in `mine`.
/// Returns true when a newly labeled vertex already carries the other label.
fn expand(
    adjacency: &Adjacency,
    removed: BranchId,
    epoch: u32,
    frontier: &mut Vec<usize>,
    next: &mut Vec<usize>,
    mine: &mut [u32],
    other: &[u32],
) -> bool {
    next.clear();
    for &x in frontier.iter() {
        for (w, branch) in adjacency.neighbors(x) {
            if branch == removed || mine[w] == epoch {
                continue;
            }
            mine[w] = epoch;
            if other[w] == epoch {
                return true;
            }
            next.push(w);
        }
    }
    std::mem::swap(frontier, next);
    false
}

/// Component count (1 or 2) after removing a non-parallel branch from a
/// connected grid.
pub fn bfs_cc(adjacency: &Adjacency, removed: BranchId) -> Result<BfsOutcome, BridgeError> {
    if removed >= adjacency.branch_count() {
        return Err(BridgeError::UnknownBranch(removed));
    }
    let multiplicity = adjacency.branch_multiplicity(removed);
    if multiplicity > 1 {
        return Err(BridgeError::ParallelBranch {
            branch: removed,
            multiplicity,
        });
    }
    Ok(DualFrontierState::new(adjacency.vertex_count()).run(adjacency, removed))
}

/// Run [`bfs_cc`] for every non-parallel branch on a pool of `workers`
/// threads. Each worker keeps its own label scratch; results are gathered in
/// branch order so the report does not depend on `workers`.
pub fn parallel_bridges(grid: &Grid, adjacency: &Adjacency, workers: usize) -> Result<BridgeReport, BridgeError> {
    let started = Instant::now();
    if workers == 0 {
        return Err(BridgeError::NoWorkers);
    }
    ensure_connected(adjacency)?;

    let candidates: Vec<BranchId> = grid
        .branches()
        .iter()
        .map(|b| b.id)
        .filter(|&b| !adjacency.is_parallel(b))
        .collect();
    let n = adjacency.vertex_count();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to start worker pool");
    let outcomes: Vec<(BranchId, BfsOutcome)> = pool.install(|| {
        candidates
            .par_iter()
            .map_init(|| DualFrontierState::new(n), |state, &b| (b, state.run(adjacency, b)))
            .collect()
    });

    let supersteps_total = outcomes.iter().map(|(_, o)| o.supersteps).sum();
    let bridge_ids = outcomes
        .into_iter()
        .filter(|(_, o)| o.components == 2)
        .map(|(b, _)| b)
        .collect();

    Ok(BridgeReport {
        engine: Engine::Parallel,
        bridge_ids,
        skipped_parallel: count_parallel(adjacency),
        supersteps_total,
        elapsed: started.elapsed(),
    })
}
