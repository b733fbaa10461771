use thiserror::Error;

use super::{BranchId, Grid};

/// Default vertex cap for the dense multiplicity matrix.
pub const DEFAULT_DENSE_CAP: usize = 10_000;

/// Iteration over the neighbors of a vertex grouped into runs of equal
/// neighbors, so that parallel branches show up as one entry with a count.
///
/// `cursor` starts at 0 for every vertex and is advanced by the implementation.
pub trait NeighborRuns {
    fn vertex_count(&self) -> usize;

    fn next_run(&self, v: usize, cursor: &mut usize) -> Option<(usize, u32)>;

    /// Number of branches joining `i` and `j`.
    fn multiplicity(&self, i: usize, j: usize) -> u32;
}

/// Compressed neighbor lists. Each vertex's entries are sorted ascending by
/// neighbor index (then branch id), so parallel branches are adjacent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    edges: Vec<BranchId>,
    /// `(from, to)` of each branch.
    endpoints: Vec<(usize, usize)>,
    /// Multiplicity of each branch's endpoint pair.
    branch_multiplicity: Vec<u32>,
}

impl Adjacency {
    pub fn build(grid: &Grid) -> Self {
        let n = grid.bus_count();
        let mut degree = vec![0usize; n];
        for b in grid.branches() {
            degree[b.from_bus] += 1;
            degree[b.to_bus] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }

        let mut fill = offsets[..n].to_vec();
        let total = offsets[n];
        let mut entries = vec![(0usize, 0usize); total];
        for b in grid.branches() {
            entries[fill[b.from_bus]] = (b.to_bus, b.id);
            fill[b.from_bus] += 1;
            entries[fill[b.to_bus]] = (b.from_bus, b.id);
            fill[b.to_bus] += 1;
        }
        for v in 0..n {
            entries[offsets[v]..offsets[v + 1]].sort_unstable();
        }

        let mut branch_multiplicity = vec![0u32; grid.branch_count()];
        for v in 0..n {
            let list = &entries[offsets[v]..offsets[v + 1]];
            for run in list.chunk_by(|a, b| a.0 == b.0) {
                if run[0].0 > v {
                    for &(_, id) in run {
                        branch_multiplicity[id] = run.len() as u32;
                    }
                }
            }
        }

        let (targets, edges) = entries.into_iter().unzip();
        Adjacency {
            offsets,
            targets,
            edges,
            endpoints: grid.branches().iter().map(|b| (b.from_bus, b.to_bus)).collect(),
            branch_multiplicity,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn branch_count(&self) -> usize {
        self.branch_multiplicity.len()
    }

    /// `(from, to)` bus indices of a branch.
    pub fn endpoints(&self, branch: BranchId) -> (usize, usize) {
        self.endpoints[branch]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbor indices of `v`, repeated once per parallel branch.
    pub fn neighbor_indices(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(neighbor, branch id)` pairs of `v` in sorted order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, BranchId)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.edges[range].iter().copied())
    }

    /// Number of branches joining `i` and `j`.
    pub fn pair_multiplicity(&self, i: usize, j: usize) -> u32 {
        let list = self.neighbor_indices(i);
        let lo = list.partition_point(|&t| t < j);
        let hi = list.partition_point(|&t| t <= j);
        (hi - lo) as u32
    }

    /// Multiplicity of the endpoint pair of `branch`.
    pub fn branch_multiplicity(&self, branch: BranchId) -> u32 {
        self.branch_multiplicity[branch]
    }

    pub fn is_parallel(&self, branch: BranchId) -> bool {
        self.branch_multiplicity[branch] >= 2
    }

    /// Lowest branch id joining `i` and `j`.
    pub fn branch_between(&self, i: usize, j: usize) -> Option<BranchId> {
        let range = self.offsets[i]..self.offsets[i + 1];
        let list = &self.targets[range.clone()];
        let at = list.partition_point(|&t| t < j);
        (at < list.len() && list[at] == j).then(|| self.edges[range.start + at])
    }
}

impl NeighborRuns for Adjacency {
    fn vertex_count(&self) -> usize {
        Adjacency::vertex_count(self)
    }

    fn next_run(&self, v: usize, cursor: &mut usize) -> Option<(usize, u32)> {
        let list = self.neighbor_indices(v);
        let start = *cursor;
        let &w = list.get(start)?;
        let mut end = start + 1;
        while end < list.len() && list[end] == w {
            end += 1;
        }
        *cursor = end;
        Some((w, (end - start) as u32))
    }

    fn multiplicity(&self, i: usize, j: usize) -> u32 {
        self.pair_multiplicity(i, j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dense adjacency needs {vertices}^2 entries; cap is {cap} vertices")]
pub struct DenseCapExceeded {
    pub vertices: usize,
    pub cap: usize,
}

/// `|V| x |V|` symmetric matrix of branch multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseAdjacency {
    n: usize,
    entries: Vec<u32>,
}

impl DenseAdjacency {
    pub fn build(grid: &Grid, cap: usize) -> Result<Self, DenseCapExceeded> {
        let n = grid.bus_count();
        if n > cap {
            return Err(DenseCapExceeded { vertices: n, cap });
        }
        let mut entries = vec![0u32; n * n];
        for b in grid.branches() {
            entries[b.from_bus * n + b.to_bus] += 1;
            entries[b.to_bus * n + b.from_bus] += 1;
        }
        Ok(DenseAdjacency { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

impl NeighborRuns for DenseAdjacency {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn next_run(&self, v: usize, cursor: &mut usize) -> Option<(usize, u32)> {
        let row = self.row(v);
        while *cursor < self.n {
            let j = *cursor;
            *cursor += 1;
            if row[j] > 0 {
                return Some((j, row[j]));
            }
        }
        None
    }

    fn multiplicity(&self, i: usize, j: usize) -> u32 {
        self.get(i, j)
    }
}
