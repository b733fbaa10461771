use std::time::Instant;

use super::{count_parallel, ensure_connected, BridgeError, BridgeReport, Engine};
use crate::grid::{Adjacency, Grid, NeighborRuns};

const NO_PARENT: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Frame {
    vertex: usize,
    parent: usize,
    /// Multiplicity of the tree edge that led here.
    arrival: u32,
    cursor: usize,
    parent_skipped: bool,
}

/// low/num bookkeeping of an iterative Tarjan DFS.
///
/// `num[v]` is the visit order (1-based, 0 = unvisited); `low[v]` the
/// smallest visit order reachable from the subtree of `v` through one back
/// edge. Exactly one traversal of the arrival edge is excluded, so a parallel
/// branch back to the parent still counts as a back edge.
#[derive(Debug, Clone)]
pub struct TarjanState {
    pub num: Vec<u32>,
    pub low: Vec<u32>,
    pub level: u32,
    /// DFS trees started so far.
    pub restarts: usize,
    stack: Vec<Frame>,
}

impl TarjanState {
    pub fn new(vertices: usize) -> Self {
        TarjanState {
            num: vec![0; vertices],
            low: vec![0; vertices],
            level: 0,
            restarts: 0,
            stack: Vec::new(),
        }
    }

    pub fn reset(&mut self) {
        self.num.fill(0);
        self.low.fill(0);
        self.level = 0;
        self.restarts = 0;
        self.stack.clear();
    }

    /// Full traversal: a DFS from `root` first, then restarts from every
    /// still-unvisited vertex in ascending order. `removed` takes one branch
    /// out of the endpoint pair it names.
    pub fn traverse<G: NeighborRuns>(graph: &G, root: usize, removed: Option<(usize, usize)>) -> Self {
        let mut state = TarjanState::new(graph.vertex_count());
        state.visit(graph, root, removed, |_, _| {});
        for v in 0..graph.vertex_count() {
            if state.num[v] == 0 {
                state.visit(graph, v, removed, |_, _| {});
            }
        }
        state
    }

    /// DFS from an unvisited `root`. `on_bridge(parent, child)` fires for
    /// every tree edge of multiplicity one with `low[child] == num[child]`.
    pub fn visit<G: NeighborRuns>(
        &mut self,
        graph: &G,
        root: usize,
        removed: Option<(usize, usize)>,
        mut on_bridge: impl FnMut(usize, usize),
    ) {
        debug_assert_eq!(self.num[root], 0);
        let TarjanState {
            num,
            low,
            level,
            restarts,
            stack,
        } = self;
        *restarts += 1;
        *level += 1;
        num[root] = *level;
        low[root] = *level;
        stack.push(Frame {
            vertex: root,
            parent: NO_PARENT,
            arrival: 0,
            cursor: 0,
            parent_skipped: false,
        });

        while let Some(top) = stack.last_mut() {
            let v = top.vertex;
            match graph.next_run(v, &mut top.cursor) {
                Some((w, mut count)) => {
                    if removed == Some(ordered(v, w)) {
                        count -= 1;
                    }
                    if w == top.parent && !top.parent_skipped {
                        top.parent_skipped = true;
                        count -= 1;
                    }
                    if count == 0 {
                        continue;
                    }
                    if num[w] == 0 {
                        *level += 1;
                        num[w] = *level;
                        low[w] = *level;
                        stack.push(Frame {
                            vertex: w,
                            parent: v,
                            arrival: count,
                            cursor: 0,
                            parent_skipped: false,
                        });
                    } else {
                        low[v] = low[v].min(num[w]);
                    }
                }
                None => {
                    let done = stack.pop().expect("non-empty");
                    if done.parent != NO_PARENT {
                        let (p, c) = (done.parent, done.vertex);
                        low[p] = low[p].min(low[c]);
                        if low[c] == num[c] && done.arrival == 1 {
                            on_bridge(p, c);
                        }
                    }
                }
            }
        }
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// One-pass bridge search in O(|V| + |E|). Works on disconnected grids.
pub fn tarjan_bridges(grid: &Grid, adjacency: &Adjacency) -> BridgeReport {
    let started = Instant::now();
    let n = adjacency.vertex_count();
    let mut state = TarjanState::new(n);
    let mut bridge_ids = Vec::new();
    for root in 0..n {
        if state.num[root] == 0 {
            state.visit(adjacency, root, None, |p, c| {
                bridge_ids.push(adjacency.branch_between(p, c).expect("tree edge exists"));
            });
        }
    }
    bridge_ids.sort_unstable();
    debug_assert!(bridge_ids.iter().all(|&b| b < grid.branch_count()));

    BridgeReport {
        engine: Engine::Tarjan,
        bridge_ids,
        skipped_parallel: count_parallel(adjacency),
        supersteps_total: 0,
        elapsed: started.elapsed(),
    }
}

/// Remove each non-parallel branch in turn, run a full Tarjan traversal of
/// the remainder, and call the branch a bridge when more than one DFS tree
/// was needed.
pub fn per_edge_tarjan_bridges(grid: &Grid, adjacency: &Adjacency) -> Result<BridgeReport, BridgeError> {
    ensure_connected(adjacency)?;
    per_edge_tarjan_bridges_with(grid, adjacency)
}

/// [`per_edge_tarjan_bridges`] over any neighbor storage, e.g. the dense
/// multiplicity matrix.
pub fn per_edge_tarjan_bridges_with<G: NeighborRuns>(grid: &Grid, graph: &G) -> Result<BridgeReport, BridgeError> {
    let started = Instant::now();
    let n = graph.vertex_count();
    let mut state = TarjanState::new(n);
    if n > 0 {
        state.visit(graph, 0, None, |_, _| {});
        for v in 1..n {
            if state.num[v] == 0 {
                state.visit(graph, v, None, |_, _| {});
            }
        }
        if state.restarts > 1 {
            return Err(BridgeError::Disconnected {
                components: state.restarts,
            });
        }
    }

    let mut bridge_ids = Vec::new();
    let mut skipped_parallel = 0;
    for branch in grid.branches() {
        let pair = branch.pair();
        if graph.multiplicity(pair.0, pair.1) > 1 {
            skipped_parallel += 1;
            continue;
        }
        state.reset();
        for v in 0..n {
            if state.num[v] == 0 {
                state.visit(graph, v, Some(pair), |_, _| {});
            }
        }
        if state.restarts > 1 {
            bridge_ids.push(branch.id);
        }
    }

    Ok(BridgeReport {
        engine: Engine::PerEdge,
        bridge_ids,
        skipped_parallel,
        supersteps_total: 0,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_fixture_f1, BranchSpec, DenseAdjacency, GridBuilder, DEFAULT_DENSE_CAP};

    fn f1_bridges(grid: &Grid) -> Vec<usize> {
        let mut ids = grid.branches_between(1, 2);
        ids.extend(grid.branches_between(4, 6));
        ids
    }

    #[test]
    fn f1_one_pass() {
        let grid = build_fixture_f1();
        let adjacency = Adjacency::build(&grid);
        let report = tarjan_bridges(&grid, &adjacency);
        assert_eq!(report.bridge_ids, f1_bridges(&grid));
        for id in grid.branches_between(2, 3) {
            assert!(!report.is_bridge(id));
        }
    }

    #[test]
    fn f1_rooted_at_4_without_4_6() {
        let grid = build_fixture_f1();
        let adjacency = Adjacency::build(&grid);
        let ix = |id| grid.bus_index(id).unwrap();
        let state = TarjanState::traverse(&adjacency, ix(4), Some((ix(4), ix(6))));
        assert_eq!((state.low[ix(4)], state.num[ix(4)]), (1, 1));
        assert_eq!((state.low[ix(6)], state.num[ix(6)]), (6, 6));
        assert_eq!(state.restarts, 2);
        for v in 0..grid.bus_count() {
            assert!(1 <= state.low[v] && state.low[v] <= state.num[v]);
        }
        let mut order = state.num.clone();
        order.sort_unstable();
        assert_eq!(order, (1..=10).collect::<Vec<u32>>());
    }

    #[test]
    fn parallel_edge_to_parent_is_a_back_edge() {
        // 1=2 double circuit, 2-3 single
        let grid = GridBuilder::new()
            .bus(1, 0.0, 0.0)
            .bus(2, 0.0, 0.0)
            .bus(3, 0.0, 0.0)
            .branch(BranchSpec::new(1, 2, 0.1, 1.0))
            .branch(BranchSpec::new(2, 1, 0.1, 1.0))
            .branch(BranchSpec::new(2, 3, 0.1, 1.0))
            .slack(1)
            .build()
            .unwrap();
        let adjacency = Adjacency::build(&grid);
        let state = TarjanState::traverse(&adjacency, 0, None);
        assert_eq!(state.low[1], 1);
        assert_eq!(tarjan_bridges(&grid, &adjacency).bridge_ids, vec![2]);
    }

    #[test]
    fn per_edge_list_and_dense_agree_on_f1() {
        let grid = build_fixture_f1();
        let adjacency = Adjacency::build(&grid);
        let dense = DenseAdjacency::build(&grid, DEFAULT_DENSE_CAP).unwrap();
        let list = per_edge_tarjan_bridges(&grid, &adjacency).unwrap();
        let matrix = per_edge_tarjan_bridges_with(&grid, &dense).unwrap();
        assert_eq!(list.bridge_ids, f1_bridges(&grid));
        assert_eq!(matrix.bridge_ids, list.bridge_ids);
        assert_eq!(list.skipped_parallel, 2);
        assert_eq!(matrix.skipped_parallel, 2);
    }

    #[test]
    fn per_edge_component_counts_on_f1() {
        let grid = build_fixture_f1();
        let adjacency = Adjacency::build(&grid);
        let restarts_without = |a: u64, b: u64| {
            let (i, j) = (grid.bus_index(a).unwrap(), grid.bus_index(b).unwrap());
            TarjanState::traverse(&adjacency, 0, Some(ordered(i, j))).restarts
        };
        assert_eq!(restarts_without(4, 6), 2);
        assert_eq!(restarts_without(2, 3), 1);
        assert_eq!(restarts_without(4, 5), 1);
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let n = 1_000_000u64;
        let mut b = GridBuilder::new();
        for id in 1..=n {
            b = b.bus(id, 0.0, 0.0);
        }
        for id in 1..n {
            b = b.branch(BranchSpec::new(id, id + 1, 0.1, 1.0));
        }
        let grid = b.slack(1).build().unwrap();
        let adjacency = Adjacency::build(&grid);
        let report = tarjan_bridges(&grid, &adjacency);
        assert_eq!(report.bridges_count(), (n - 1) as usize);
    }

    #[test]
    fn per_edge_rejects_disconnected() {
        let grid = build_fixture_f1().without_branch(6);
        let adjacency = Adjacency::build(&grid);
        assert_eq!(
            per_edge_tarjan_bridges(&grid, &adjacency),
            Err(BridgeError::Disconnected { components: 2 })
        );
        // the one-pass engine accepts it and still finds 1-2
        assert_eq!(tarjan_bridges(&grid, &adjacency).bridge_ids, vec![0]);
    }
}
