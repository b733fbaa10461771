//! DC N-1 fast screening.
//!
//! The reduced susceptance matrix `B'` (slack row and column deleted) is
//! factored once. Each non-splitting single-branch outage is then evaluated
//! by rank-one compensation against those factors, and outages are ranked by
//! the severity index `Σ w_k (P_k / P_k,max)²`.

mod base;
mod factor;
mod screen;
mod severity;

use thiserror::Error;

use crate::grid::BranchId;

pub use base::{
    apply_compensation, build_base_case, build_base_case_with, superposition_outage, DcBaseCase, DcOptions,
    OutageError, OutageUpdate, DENOMINATOR_EPS, DENOMINATOR_RTOL,
};
pub use screen::{fast_screen, fast_screen_with, RankedOutage, ScreeningResult};
pub use severity::severity_index;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScreeningError {
    #[error("base grid is not connected ({components} components)")]
    Disconnected { components: usize },
    #[error("susceptance matrix is singular: {0}")]
    Singular(String),
    #[error("bridge report names branch {0}, which is not in this grid")]
    BridgeOutOfRange(BranchId),
    #[error("worker count must be at least 1")]
    NoWorkers,
}
