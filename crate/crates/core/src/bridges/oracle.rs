use std::collections::VecDeque;
use std::time::Instant;

use super::{count_parallel, ensure_connected, BridgeError, BridgeReport, Engine};
use crate::grid::{Adjacency, BranchId, Grid};

/// Brute-force reference: for every non-parallel branch, BFS the grid with
/// that branch removed and mark it a bridge iff two components result.
///
/// O(|E| (|V| + |E|)).
pub fn oracle_bridges(grid: &Grid, adjacency: &Adjacency) -> Result<BridgeReport, BridgeError> {
    let started = Instant::now();
    ensure_connected(adjacency)?;

    let mut seen = vec![false; adjacency.vertex_count()];
    let mut queue = VecDeque::new();
    let bridge_ids = grid
        .branches()
        .iter()
        .filter(|b| !adjacency.is_parallel(b.id))
        .filter(|b| component_count(adjacency, b.id, &mut seen, &mut queue) == 2)
        .map(|b| b.id)
        .collect();

    Ok(BridgeReport {
        engine: Engine::Oracle,
        bridge_ids,
        skipped_parallel: count_parallel(adjacency),
        supersteps_total: 0,
        elapsed: started.elapsed(),
    })
}

fn component_count(
    adjacency: &Adjacency,
    removed: BranchId,
    seen: &mut [bool],
    queue: &mut VecDeque<usize>,
) -> usize {
    seen.fill(false);
    let mut count = 0;
    for start in 0..seen.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for (w, branch) in adjacency.neighbors(v) {
                if branch != removed && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    count
}
