//! Helpers shared by the integration tests. Everything here is written
//! against the public grid data only, without the crate's own adjacency,
//! bridge or DC code, so it can serve as an independent check.

#![allow(dead_code)]

use std::collections::VecDeque;

use gridsplit_core::grid::{BranchId, BranchSpec, Grid, GridBuilder};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn between(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

/// Connected multigraph on `n` buses with about `edge_factor * n` branches,
/// `parallel` of the non-tree branches duplicating an earlier one. Branch
/// order is shuffled so tree edges are not listed first.
pub fn random_multigraph(seed: u64, n: usize, edge_factor: f64, parallel: f64) -> Grid {
    assert!(n >= 2);
    let mut rng = Rng::new(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.below(i + 1));
    }
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.below(i)], order[i])).collect();
    let target = ((edge_factor * n as f64).round() as usize).max(n - 1);
    while pairs.len() < target {
        if rng.unit() < parallel {
            let p = pairs[rng.below(pairs.len())];
            pairs.push((p.1, p.0));
        } else {
            let a = rng.below(n);
            let b = rng.below(n);
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    for i in (1..pairs.len()).rev() {
        pairs.swap(i, rng.below(i + 1));
    }

    // sparse, non-contiguous external ids
    let ids: Vec<u64> = (0..n as u64).map(|i| 3 * i + 7).collect();
    let mut injections: Vec<f64> = (0..n).map(|_| rng.between(-100.0, 100.0)).collect();
    let slack = rng.below(n);
    let others: f64 = injections.iter().enumerate().filter(|&(i, _)| i != slack).map(|(_, p)| p).sum();
    injections[slack] = -others;

    let mut builder = GridBuilder::new();
    for i in 0..n {
        builder = builder.bus(ids[i], injections[i], 0.0);
    }
    for (a, b) in pairs {
        let x = rng.between(0.01, 0.5);
        let rating = rng.between(20.0, 400.0);
        let weight = rng.between(0.5, 2.0);
        builder = builder.branch(BranchSpec::new(ids[a], ids[b], x, rating).weight(weight));
    }
    builder.slack(ids[slack]).build().unwrap()
}

/// Simple cycle through `n` buses, ids 1..=n.
pub fn ring(n: usize) -> Grid {
    let mut builder = GridBuilder::new();
    for id in 1..=n as u64 {
        builder = builder.bus(id, 0.0, 0.0);
    }
    for i in 0..n as u64 {
        builder = builder.branch(BranchSpec::new(i + 1, (i + 1) % n as u64 + 1, 0.1, 100.0));
    }
    builder.slack(1).build().unwrap()
}

/// Components of the grid with `skip` taken out, by plain BFS over the
/// branch list.
pub fn component_count(grid: &Grid, skip: Option<BranchId>) -> usize {
    let n = grid.bus_count();
    let mut neighbors = vec![Vec::new(); n];
    for b in grid.branches() {
        if Some(b.id) != skip {
            neighbors[b.from_bus].push(b.to_bus);
            neighbors[b.to_bus].push(b.from_bus);
        }
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    count
}

/// Reference bridge list: every branch whose removal adds a component.
pub fn reference_bridges(grid: &Grid) -> Vec<BranchId> {
    let base = component_count(grid, None);
    (0..grid.branch_count())
        .filter(|&b| component_count(grid, Some(b)) > base)
        .collect()
}

/// DC flows in MW from scratch: dense `B'` with the slack deleted, solved by
/// Gaussian elimination with partial pivoting.
pub fn dense_dc_flows(grid: &Grid, mva_base: f64) -> Vec<f64> {
    let n = grid.bus_count();
    let slack = grid.slack();
    let row = |bus: usize| if bus < slack { Some(bus) } else if bus > slack { Some(bus - 1) } else { None };
    let m = n - 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for b in grid.branches() {
        let y = 1.0 / b.reactance;
        let (i, j) = (row(b.from_bus), row(b.to_bus));
        if let Some(i) = i {
            a[i][i] += y;
        }
        if let Some(j) = j {
            a[j][j] += y;
        }
        if let (Some(i), Some(j)) = (i, j) {
            a[i][j] -= y;
            a[j][i] -= y;
        }
    }
    for bus in grid.buses().iter().enumerate() {
        if let Some(i) = row(bus.0) {
            a[i][m] = bus.1.injection / mva_base;
        }
    }
    for col in 0..m {
        let pivot = (col..m).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        a.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-14, "singular system");
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(r);
                for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][m] - s) / a[r][r];
    }
    let theta = |bus: usize| row(bus).map_or(0.0, |i| x[i]);
    grid.branches()
        .iter()
        .map(|b| (theta(b.from_bus) - theta(b.to_bus)) / b.reactance * mva_base)
        .collect()
}

/// Largest nodal mismatch in MW: every non-slack bus must export exactly
/// its injection. Branch `outaged` (if any) carries nothing.
pub fn nodal_mismatch(grid: &Grid, flows: &[f64], outaged: Option<BranchId>) -> f64 {
    let mut export = vec![0.0; grid.bus_count()];
    for b in grid.branches() {
        if Some(b.id) == outaged {
            continue;
        }
        export[b.from_bus] += flows[b.id];
        export[b.to_bus] -= flows[b.id];
    }
    grid.buses()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != grid.slack())
        .map(|(i, bus)| (export[i] - bus.injection).abs())
        .fold(0.0, f64::max)
}
