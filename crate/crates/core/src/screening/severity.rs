use crate::grid::{BranchId, Grid};

/// `Σ w_k (P_k / P_k,max)²` over every in-service branch, i.e. all branches
/// except `outaged`.
///
/// Panics if a rating is not positive; the grid model rejects those.
pub fn severity_index(flows: &[f64], grid: &Grid, outaged: BranchId) -> f64 {
    assert_eq!(flows.len(), grid.branch_count(), "one flow per branch");
    grid.branches()
        .iter()
        .zip(flows)
        .filter(|(b, _)| b.id != outaged)
        .map(|(b, &p)| {
            assert!(b.rating > 0.0, "branch {} has non-positive rating", b.id);
            let loading = p / b.rating;
            b.weight * loading * loading
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BranchSpec, GridBuilder};

    fn pair_grid(weight: f64, rating: f64) -> Grid {
        GridBuilder::new()
            .bus(1, 0.0, 0.0)
            .bus(2, 0.0, 0.0)
            .branch(BranchSpec::new(1, 2, 0.1, rating).weight(weight))
            .branch(BranchSpec::new(1, 2, 0.1, rating).weight(weight))
            .slack(1)
            .build()
            .unwrap()
    }

    #[test]
    fn single_surviving_branch() {
        let grid = pair_grid(1.0, 100.0);
        assert_eq!(severity_index(&[0.0, 50.0], &grid, 0), 0.25);
    }

    #[test]
    fn zero_weights() {
        let grid = pair_grid(0.0, 100.0);
        assert_eq!(severity_index(&[0.0, 75.0], &grid, 0), 0.0);
    }

    #[test]
    fn homogeneity() {
        let flows = [0.0, 37.0];
        let si = severity_index(&flows, &pair_grid(1.5, 80.0), 0);
        let doubled_w = severity_index(&flows, &pair_grid(3.0, 80.0), 0);
        let doubled_rating = severity_index(&flows, &pair_grid(1.5, 160.0), 0);
        assert!((doubled_w - 2.0 * si).abs() <= 1e-12 * si);
        assert!((doubled_rating - si / 4.0).abs() <= 1e-12 * si);
    }
}
