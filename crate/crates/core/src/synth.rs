//! Reproducible synthetic grids.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`)
//! and is consumed only through `next_u64`, mapped as follows so the output
//! can be reproduced outside this crate:
//!
//! * uniform real in `[0, 1)`: `(next_u64 >> 11) * 2^-53`
//! * uniform real in `[a, b)`: `a + (b - a) * u`
//! * uniform index in `0..n`: `next_u64 % n`
//!
//! Construction order: spanning tree, protected pendants, extra branches,
//! branch parameters in branch order, bus voltages and injections in bus
//! order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::grid::{BranchSpec, Grid, GridBuilder};

pub const VOLTAGE_LEVELS_KV: [f64; 5] = [10.0, 35.0, 110.0, 220.0, 500.0];
pub const REACTANCE_RANGE: (f64, f64) = (0.01, 0.2);
pub const RATING_RANGE_MW: (f64, f64) = (50.0, 500.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub buses: usize,
    /// Branches added on top of the spanning tree.
    pub extra_edges: usize,
    /// Share of the extra branches that duplicate an existing branch.
    pub parallel_fraction: f64,
    /// Share of tree leaves kept at degree one.
    pub pendant_fraction: f64,
    /// Injections are drawn uniformly from `[-scale, scale]` MW.
    pub injection_scale: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            buses: 100,
            extra_edges: 20,
            parallel_fraction: 0.1,
            pendant_fraction: 0.3,
            injection_scale: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("need at least 2 buses, got {0}")]
    TooFewBuses(usize),
    #[error("{name} must lie in [0, 1], got {value}")]
    Fraction { name: &'static str, value: f64 },
    #[error("injection scale must be finite and non-negative, got {0}")]
    InjectionScale(f64),
}

struct Draw(ChaCha8Rng);

impl Draw {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, (lo, hi): (f64, f64)) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn index(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

fn round_to(value: f64, step: f64) -> f64 {
    (value / step).round() * step
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.buses < 2 {
            return Err(SynthError::TooFewBuses(self.buses));
        }
        for (name, value) in [
            ("parallel_fraction", self.parallel_fraction),
            ("pendant_fraction", self.pendant_fraction),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SynthError::Fraction { name, value });
            }
        }
        if !(self.injection_scale.is_finite() && self.injection_scale >= 0.0) {
            return Err(SynthError::InjectionScale(self.injection_scale));
        }
        Ok(())
    }
}

/// Random spanning tree plus extra chords and parallel duplicates. Always
/// connected; identical output for identical specs.
pub fn generate(spec: &SynthSpec) -> Result<Grid, SynthError> {
    spec.validate()?;
    let n = spec.buses;
    let mut rng = Draw(ChaCha8Rng::seed_from_u64(spec.seed));

    // random recursive tree
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n - 1 + spec.extra_edges);
    let mut degree = vec![0usize; n];
    for v in 1..n {
        let parent = rng.index(v);
        edges.push((parent, v));
        degree[parent] += 1;
        degree[v] += 1;
    }

    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    rng.shuffle(&mut leaves);
    let keep = (spec.pendant_fraction * leaves.len() as f64).floor() as usize;
    let mut protected = vec![false; n];
    for &v in &leaves[..keep] {
        protected[v] = true;
    }
    let open: Vec<usize> = (0..n).filter(|&v| !protected[v]).collect();

    for _ in 0..spec.extra_edges {
        let duplicate = rng.unit() < spec.parallel_fraction;
        if duplicate {
            let pick = edges[rng.index(edges.len())];
            if !protected[pick.0] && !protected[pick.1] {
                edges.push(pick);
                continue;
            }
        }
        if open.len() < 2 {
            continue;
        }
        let a = open[rng.index(open.len())];
        let mut b = open[rng.index(open.len() - 1)];
        if b == a {
            b = open[open.len() - 1];
        }
        edges.push((a, b));
    }

    let mut builder = GridBuilder::new();
    let mut injections: Vec<f64> = Vec::with_capacity(n);
    let mut branch_specs = Vec::with_capacity(edges.len());
    for &(a, b) in &edges {
        let reactance = round_to(rng.range(REACTANCE_RANGE), 1e-4).max(REACTANCE_RANGE.0);
        let rating = round_to(rng.range(RATING_RANGE_MW), 0.1);
        let kv = VOLTAGE_LEVELS_KV[rng.index(VOLTAGE_LEVELS_KV.len())];
        branch_specs.push(BranchSpec::new(a as u64 + 1, b as u64 + 1, reactance, rating).voltage_kv(kv));
    }
    let mut bus_kv = Vec::with_capacity(n);
    for _ in 0..n {
        bus_kv.push(VOLTAGE_LEVELS_KV[rng.index(VOLTAGE_LEVELS_KV.len())]);
        injections.push(round_to(rng.range((-spec.injection_scale, spec.injection_scale)), 0.01));
    }
    // balance on the slack (bus 1)
    injections[0] = -injections[1..].iter().sum::<f64>();

    for v in 0..n {
        builder = builder.bus(v as u64 + 1, injections[v], bus_kv[v]);
    }
    for spec in branch_specs {
        builder = builder.branch(spec);
    }
    Ok(builder.slack(1).build().expect("generated grid is well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridges::tarjan_bridges;
    use crate::grid::{check_connected, Adjacency};

    #[test]
    fn large_grid_counts() {
        let grid = generate(&SynthSpec {
            seed: 42,
            buses: 2752,
            extra_edges: 538,
            ..SynthSpec::default()
        })
        .unwrap();
        assert_eq!(grid.bus_count(), 2752);
        assert_eq!(grid.branch_count(), 3289);
        assert!(check_connected(&grid));
    }

    #[test]
    fn spanning_tree_is_all_bridges() {
        let grid = generate(&SynthSpec {
            seed: 3,
            buses: 300,
            extra_edges: 0,
            parallel_fraction: 0.0,
            ..SynthSpec::default()
        })
        .unwrap();
        let report = tarjan_bridges(&grid, &Adjacency::build(&grid));
        assert_eq!(report.bridges_count(), grid.branch_count());
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = SynthSpec {
            seed: 99,
            ..SynthSpec::default()
        };
        let a = generate(&spec).unwrap().to_grid_file();
        let b = generate(&spec).unwrap().to_grid_file();
        assert_eq!(a, b);
        let c = generate(&SynthSpec { seed: 100, ..spec }).unwrap().to_grid_file();
        assert_ne!(a, c);
    }

    #[test]
    fn parameters_in_range() {
        let grid = generate(&SynthSpec::default()).unwrap();
        for b in grid.branches() {
            assert!((REACTANCE_RANGE.0..=REACTANCE_RANGE.1).contains(&b.reactance));
            assert!((RATING_RANGE_MW.0..=RATING_RANGE_MW.1).contains(&b.rating));
            assert!(VOLTAGE_LEVELS_KV.contains(&b.voltage_kv));
        }
        let total: f64 = grid.buses().iter().map(|b| b.injection).sum();
        assert!(total.abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = |f: fn(&mut SynthSpec)| {
            let mut s = SynthSpec::default();
            f(&mut s);
            generate(&s).unwrap_err()
        };
        assert_eq!(bad(|s| s.buses = 1), SynthError::TooFewBuses(1));
        assert!(matches!(bad(|s| s.parallel_fraction = 1.5), SynthError::Fraction { .. }));
        assert!(matches!(bad(|s| s.pendant_fraction = -0.1), SynthError::Fraction { .. }));
        assert!(matches!(bad(|s| s.injection_scale = f64::NAN), SynthError::InjectionScale(_)));
    }

    #[test]
    fn fewer_chords_more_bridges() {
        // average bridge fraction over seeds must not increase with chords
        let fraction = |extra: usize| -> f64 {
            (0..20)
                .map(|seed| {
                    let grid = generate(&SynthSpec {
                        seed,
                        buses: 200,
                        extra_edges: extra,
                        ..SynthSpec::default()
                    })
                    .unwrap();
                    let report = tarjan_bridges(&grid, &Adjacency::build(&grid));
                    report.bridges_count() as f64 / grid.branch_count() as f64
                })
                .sum::<f64>()
                / 20.0
        };
        let series: Vec<f64> = [0, 10, 40, 100, 200].into_iter().map(fraction).collect();
        assert!(series.windows(2).all(|w| w[0] > w[1]), "{series:?}");
    }
}
