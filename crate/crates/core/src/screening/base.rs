use sprs::{CsMat, TriMat};
use thiserror::Error;

use super::factor::Factor;
use super::ScreeningError;
use crate::grid::{splits_without, Adjacency, BranchId, Grid};

/// Compensation denominators at or below this magnitude are degenerate.
pub const DENOMINATOR_EPS: f64 = 1e-12;
/// Denominators below this fraction of the branch reactance trigger an
/// islanding check; floating-point error keeps a bridge's denominator from
/// being exactly zero.
pub const DENOMINATOR_RTOL: f64 = 1e-9;

const NOT_REDUCED: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcOptions {
    /// System base in MVA.
    pub mva_base: f64,
    /// Systems with fewer buses than this are factored densely.
    pub dense_below: usize,
}

impl Default for DcOptions {
    fn default() -> Self {
        DcOptions {
            mva_base: 100.0,
            dense_below: 500,
        }
    }
}

/// Base-case DC power flow, factored once and reused for every outage.
pub struct DcBaseCase {
    pub mva_base: f64,
    slack: usize,
    /// Bus index -> row of the reduced system (slack removed).
    reduced: Vec<usize>,
    b_prime: CsMat<f64>,
    factor: Factor,
    /// Bus angles in radians, slack = 0.
    pub theta0: Vec<f64>,
    /// Branch flows in MW, positive from -> to.
    pub base_flows: Vec<f64>,
}

pub fn build_base_case(grid: &Grid) -> Result<DcBaseCase, ScreeningError> {
    build_base_case_with(grid, &DcOptions::default())
}

pub fn build_base_case_with(grid: &Grid, options: &DcOptions) -> Result<DcBaseCase, ScreeningError> {
    let adjacency = Adjacency::build(grid);
    if !crate::grid::is_connected(&adjacency) {
        let (components, _) = crate::grid::connected_components(&adjacency, None);
        return Err(ScreeningError::Disconnected { components });
    }

    let n = grid.bus_count();
    let slack = grid.slack();
    let mut reduced = vec![NOT_REDUCED; n];
    let mut next = 0;
    for (bus, slot) in reduced.iter_mut().enumerate() {
        if bus != slack {
            *slot = next;
            next += 1;
        }
    }
    let m = n - 1;

    let mut triplets = TriMat::new((m, m));
    for b in grid.branches() {
        let y = 1.0 / b.reactance;
        let (i, j) = (reduced[b.from_bus], reduced[b.to_bus]);
        if i != NOT_REDUCED {
            triplets.add_triplet(i, i, y);
        }
        if j != NOT_REDUCED {
            triplets.add_triplet(j, j, y);
        }
        if i != NOT_REDUCED && j != NOT_REDUCED {
            triplets.add_triplet(i, j, -y);
            triplets.add_triplet(j, i, -y);
        }
    }
    let b_prime: CsMat<f64> = triplets.to_csc();
    let factor = Factor::new(&b_prime, options.dense_below).map_err(ScreeningError::Singular)?;

    let mut injections = vec![0.0; m];
    for (bus, &r) in reduced.iter().enumerate() {
        if r != NOT_REDUCED {
            injections[r] = grid.buses()[bus].injection / options.mva_base;
        }
    }
    let solved = factor.solve(&injections);
    let mut theta0 = vec![0.0; n];
    for (bus, &r) in reduced.iter().enumerate() {
        if r != NOT_REDUCED {
            theta0[bus] = solved[r];
        }
    }
    let base_flows = grid
        .branches()
        .iter()
        .map(|b| (theta0[b.from_bus] - theta0[b.to_bus]) / b.reactance * options.mva_base)
        .collect();

    Ok(DcBaseCase {
        mva_base: options.mva_base,
        slack,
        reduced,
        b_prime,
        factor,
        theta0,
        base_flows,
    })
}

impl DcBaseCase {
    /// Reduced nodal susceptance matrix in per unit.
    pub fn b_prime(&self) -> &CsMat<f64> {
        &self.b_prime
    }

    pub fn slack(&self) -> usize {
        self.slack
    }

    /// Row of `bus` in the reduced system; `None` for the slack.
    pub fn reduced_index(&self, bus: usize) -> Option<usize> {
        let r = self.reduced[bus];
        (r != NOT_REDUCED).then_some(r)
    }

    pub fn uses_dense_factor(&self) -> bool {
        self.factor.is_dense()
    }

    /// Solve `B' x = rhs` in the reduced space with the stored factors.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.factor.solve(rhs)
    }

    /// Infinity norm of `B' θ0 - P` in per unit.
    pub fn residual_inf(&self, grid: &Grid) -> f64 {
        let mut theta = vec![0.0; self.b_prime.rows()];
        for (bus, &r) in self.reduced.iter().enumerate() {
            if r != NOT_REDUCED {
                theta[r] = self.theta0[bus];
            }
        }
        let mut lhs = vec![0.0; self.b_prime.rows()];
        for (&value, (i, j)) in self.b_prime.iter() {
            lhs[i] += value * theta[j];
        }
        let mut worst = 0.0f64;
        for (bus, &r) in self.reduced.iter().enumerate() {
            if r != NOT_REDUCED {
                let p = grid.buses()[bus].injection / self.mva_base;
                worst = worst.max((lhs[r] - p).abs());
            }
        }
        worst
    }

    /// `X m` for the incidence vector `m = e_from - e_to` of a branch, in
    /// reduced coordinates.
    fn incidence_response(&self, from: usize, to: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.b_prime.rows()];
        if let Some(r) = self.reduced_index(from) {
            m[r] += 1.0;
        }
        if let Some(r) = self.reduced_index(to) {
            m[r] -= 1.0;
        }
        self.factor.solve(&m)
    }

    fn angle_difference(&self, reduced: &[f64], from: usize, to: usize) -> f64 {
        let at = |bus| self.reduced_index(bus).map_or(0.0, |r| reduced[r]);
        at(from) - at(to)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OutageError {
    #[error("branch {0} does not exist")]
    UnknownBranch(BranchId),
    #[error("outage of branch {0} islands part of the grid")]
    Islanding(BranchId),
    #[error("compensation denominator {denominator:e} for branch {branch} is degenerate")]
    DegenerateDenominator { branch: BranchId, denominator: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageUpdate {
    pub branch: BranchId,
    /// Scalar compensation injection, per unit, applied +C at the from bus
    /// and -C at the to bus.
    pub compensation: f64,
    /// Angle change per bus, radians.
    pub delta_theta: Vec<f64>,
    /// Post-outage branch flows in MW.
    pub flows: Vec<f64>,
}

/// Post-outage flows for a single-branch outage by rank-one compensation on
/// the base-case factors; no refactorization.
///
/// With `m = e_from - e_to` and `X = B'^-1`, removing a branch of reactance
/// `x` gives
///
/// ```text
/// C  = (θ0_from - θ0_to) / (x - mᵀ X m)
/// Δθ = C · X m
/// ```
///
/// i.e. the base system solved for a ±C injection pair. The denominator
/// vanishes exactly when the branch is a bridge.
pub fn superposition_outage(base: &DcBaseCase, grid: &Grid, branch: BranchId) -> Result<OutageUpdate, OutageError> {
    let br = grid.branch(branch).ok_or(OutageError::UnknownBranch(branch))?;
    let response = base.incidence_response(br.from_bus, br.to_bus);
    let denominator = br.reactance - base.angle_difference(&response, br.from_bus, br.to_bus);
    if denominator.abs() <= DENOMINATOR_EPS.max(DENOMINATOR_RTOL * br.reactance) {
        if splits_without(grid, branch) {
            return Err(OutageError::Islanding(branch));
        }
        if denominator.abs() <= DENOMINATOR_EPS {
            return Err(OutageError::DegenerateDenominator { branch, denominator });
        }
    }
    let compensation = (base.theta0[br.from_bus] - base.theta0[br.to_bus]) / denominator;
    let mut update = compensate(base, grid, branch, compensation, &response);
    update.flows[branch] = 0.0;
    Ok(update)
}

/// Superpose a given compensation `C` for `branch` onto the base case,
/// leaving every flow (including the outaged branch's) as computed. With
/// `C = 0` this returns the base flows unchanged.
pub fn apply_compensation(base: &DcBaseCase, grid: &Grid, branch: BranchId, compensation: f64) -> Result<OutageUpdate, OutageError> {
    let br = grid.branch(branch).ok_or(OutageError::UnknownBranch(branch))?;
    let response = base.incidence_response(br.from_bus, br.to_bus);
    Ok(compensate(base, grid, branch, compensation, &response))
}

fn compensate(base: &DcBaseCase, grid: &Grid, branch: BranchId, compensation: f64, response: &[f64]) -> OutageUpdate {
    let delta_theta: Vec<f64> = (0..grid.bus_count())
        .map(|bus| base.reduced_index(bus).map_or(0.0, |r| compensation * response[r]))
        .collect();
    let flows = grid
        .branches()
        .iter()
        .zip(&base.base_flows)
        .map(|(b, &p0)| p0 + (delta_theta[b.from_bus] - delta_theta[b.to_bus]) / b.reactance * base.mva_base)
        .collect();
    OutageUpdate {
        branch,
        compensation,
        delta_theta,
        flows,
    }
}
