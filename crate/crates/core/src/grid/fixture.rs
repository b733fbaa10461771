use super::{BranchSpec, Grid, GridBuilder};

/// Bus injections (MW) of the ten-bus fixture, indexed by bus id - 1.
/// Balanced to zero so the slack carries no residual.
pub const F1_INJECTIONS: [f64; 10] = [0.0, -20.0, 80.0, -10.0, -20.0, 10.0, 40.0, -30.0, -25.0, -25.0];

const F1_BRANCHES: [(u64, u64); 13] = [
    (1, 2),
    (2, 3),
    (2, 3),
    (2, 4),
    (3, 5),
    (4, 5),
    (4, 6),
    (6, 7),
    (6, 8),
    (7, 8),
    (8, 9),
    (8, 10),
    (9, 10),
];

/// Ten-bus, thirteen-branch test network.
///
/// Two meshed halves `{1..5}` and `{6..10}` joined by the single branch 4-6,
/// a pendant bus 1 hanging off bus 2, and a parallel pair between buses 2
/// and 3. Unit reactances, 100 MW ratings, unit weights, slack at bus 1.
pub fn build_fixture_f1() -> Grid {
    let mut builder = GridBuilder::new();
    for (i, injection) in F1_INJECTIONS.iter().enumerate() {
        builder = builder.bus(i as u64 + 1, *injection, 0.0);
    }
    for (from, to) in F1_BRANCHES {
        builder = builder.branch(BranchSpec::new(from, to, 1.0, 100.0));
    }
    builder.slack(1).build().expect("fixture is well formed")
}
