//! Bus/branch model of a power network viewed as an undirected multigraph.
//!
//! External bus ids are arbitrary positive integers; internally buses are
//! re-indexed densely `0..|V|` in ascending external-id order and branches
//! are numbered `0..|E|` in input order. Parallel branches keep distinct ids.

mod adjacency;
mod fixture;
mod parse;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub use adjacency::{Adjacency, DenseAdjacency, NeighborRuns, DEFAULT_DENSE_CAP};
pub use fixture::{build_fixture_f1, F1_INJECTIONS};
pub use parse::parse_grid;

/// Dense branch index, `0..|E|`.
pub type BranchId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    /// External identifier as it appears in the grid file.
    pub id: u64,
    /// Net injection in MW, positive for generation.
    pub injection: f64,
    /// Nominal voltage in kV, 0 when unknown.
    pub voltage_kv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: BranchId,
    /// Internal index of the from-side bus. Flow is positive from -> to.
    pub from_bus: usize,
    pub to_bus: usize,
    /// Series reactance, per unit.
    pub reactance: f64,
    /// Flow limit in MW.
    pub rating: f64,
    /// Severity weight.
    pub weight: f64,
    pub voltage_kv: f64,
}

impl Branch {
    /// Endpoints as an ordered pair `(min, max)`.
    pub fn pair(&self) -> (usize, usize) {
        if self.from_bus < self.to_bus {
            (self.from_bus, self.to_bus)
        } else {
            (self.to_bus, self.from_bus)
        }
    }

    pub fn other_end(&self, bus: usize) -> usize {
        if bus == self.from_bus {
            self.to_bus
        } else {
            self.from_bus
        }
    }
}

/// Immutable grid. Construct through [`GridBuilder`] or [`parse_grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    slack: usize,
}

/// Optional source line attached to a validation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Loc(pub Option<usize>);

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(line) => write!(f, "line {line}: "),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("{0}malformed record: {1}")]
    Malformed(Loc, String),
    #[error("{0}unknown record tag `{1}`")]
    UnknownTag(Loc, String),
    #[error("{0}duplicate bus id {1}")]
    DuplicateBus(Loc, u64),
    #[error("{0}bus id must be positive")]
    ZeroBusId(Loc),
    #[error("{0}branch references unknown bus {1}")]
    UnknownBus(Loc, u64),
    #[error("{0}self-loop on bus {1}")]
    SelfLoop(Loc, u64),
    #[error("{loc}{field} must be {requirement}, got {value}")]
    BadValue {
        loc: Loc,
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("no SLACK record")]
    MissingSlack,
    #[error("{0}second SLACK record")]
    MultipleSlack(Loc),
    #[error("{0}slack references unknown bus {1}")]
    UnknownSlack(Loc, u64),
    #[error("grid has no buses")]
    Empty,
}

impl GridError {
    /// Source line, when the error came from a parsed file.
    pub fn line(&self) -> Option<usize> {
        match self {
            GridError::Malformed(loc, _)
            | GridError::UnknownTag(loc, _)
            | GridError::DuplicateBus(loc, _)
            | GridError::ZeroBusId(loc)
            | GridError::UnknownBus(loc, _)
            | GridError::SelfLoop(loc, _)
            | GridError::BadValue { loc, .. }
            | GridError::MultipleSlack(loc)
            | GridError::UnknownSlack(loc, _) => loc.0,
            GridError::MissingSlack | GridError::Empty => None,
        }
    }
}

/// Branch parameters keyed by external bus ids.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSpec {
    pub from: u64,
    pub to: u64,
    pub reactance: f64,
    pub rating: f64,
    pub weight: f64,
    pub voltage_kv: f64,
}

impl BranchSpec {
    pub fn new(from: u64, to: u64, reactance: f64, rating: f64) -> Self {
        BranchSpec {
            from,
            to,
            reactance,
            rating,
            weight: 1.0,
            voltage_kv: 0.0,
        }
    }

    pub fn weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn voltage_kv(mut self, kv: f64) -> Self {
        self.voltage_kv = kv;
        self
    }
}

#[derive(Debug, Default, Clone)]
pub struct GridBuilder {
    buses: Vec<(Loc, Bus)>,
    branches: Vec<(Loc, BranchSpec)>,
    slacks: Vec<(Loc, u64)>,
}

impl GridBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bus(mut self, id: u64, injection: f64, voltage_kv: f64) -> Self {
        self.push_bus(Loc(None), id, injection, voltage_kv);
        self
    }

    pub fn branch(mut self, spec: BranchSpec) -> Self {
        self.push_branch(Loc(None), spec);
        self
    }

    pub fn slack(mut self, id: u64) -> Self {
        self.push_slack(Loc(None), id);
        self
    }

    pub(crate) fn push_bus(&mut self, loc: Loc, id: u64, injection: f64, voltage_kv: f64) {
        self.buses.push((
            loc,
            Bus {
                id,
                injection,
                voltage_kv,
            },
        ));
    }

    pub(crate) fn push_branch(&mut self, loc: Loc, spec: BranchSpec) {
        self.branches.push((loc, spec));
    }

    pub(crate) fn push_slack(&mut self, loc: Loc, id: u64) {
        self.slacks.push((loc, id));
    }

    pub fn build(self) -> Result<Grid, GridError> {
        if self.buses.is_empty() {
            return Err(GridError::Empty);
        }
        let mut seen: HashMap<u64, Loc> = HashMap::with_capacity(self.buses.len());
        for (loc, bus) in &self.buses {
            if bus.id == 0 {
                return Err(GridError::ZeroBusId(*loc));
            }
            check_finite(*loc, "injection", bus.injection)?;
            check_nonneg(*loc, "voltage_kv", bus.voltage_kv)?;
            if seen.insert(bus.id, *loc).is_some() {
                return Err(GridError::DuplicateBus(*loc, bus.id));
            }
        }

        let mut buses: Vec<Bus> = self.buses.into_iter().map(|(_, b)| b).collect();
        buses.sort_by_key(|b| b.id);
        let index: HashMap<u64, usize> = buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect();

        let mut branches = Vec::with_capacity(self.branches.len());
        for (loc, spec) in self.branches {
            let from_bus = *index
                .get(&spec.from)
                .ok_or(GridError::UnknownBus(loc, spec.from))?;
            let to_bus = *index
                .get(&spec.to)
                .ok_or(GridError::UnknownBus(loc, spec.to))?;
            if from_bus == to_bus {
                return Err(GridError::SelfLoop(loc, spec.from));
            }
            check_positive(loc, "reactance", spec.reactance)?;
            check_positive(loc, "rating", spec.rating)?;
            check_nonneg(loc, "weight", spec.weight)?;
            check_nonneg(loc, "voltage_kv", spec.voltage_kv)?;
            branches.push(Branch {
                id: branches.len(),
                from_bus,
                to_bus,
                reactance: spec.reactance,
                rating: spec.rating,
                weight: spec.weight,
                voltage_kv: spec.voltage_kv,
            });
        }

        let slack = match self.slacks.as_slice() {
            [] => return Err(GridError::MissingSlack),
            [(loc, id)] => *index.get(id).ok_or(GridError::UnknownSlack(*loc, *id))?,
            [_, (loc, _), ..] => return Err(GridError::MultipleSlack(*loc)),
        };

        Ok(Grid {
            buses,
            branches,
            slack,
        })
    }
}

fn check_finite(loc: Loc, field: &'static str, value: f64) -> Result<(), GridError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(GridError::BadValue {
            loc,
            field,
            requirement: "finite",
            value,
        })
    }
}

fn check_positive(loc: Loc, field: &'static str, value: f64) -> Result<(), GridError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GridError::BadValue {
            loc,
            field,
            requirement: "positive",
            value,
        })
    }
}

fn check_nonneg(loc: Loc, field: &'static str, value: f64) -> Result<(), GridError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(GridError::BadValue {
            loc,
            field,
            requirement: "non-negative",
            value,
        })
    }
}

impl Grid {
    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Internal index of the slack bus.
    pub fn slack(&self) -> usize {
        self.slack
    }

    pub fn branch(&self, id: BranchId) -> Option<&Branch> {
        self.branches.get(id)
    }

    /// Internal index for an external bus id.
    pub fn bus_index(&self, id: u64) -> Option<usize> {
        self.buses.binary_search_by_key(&id, |b| b.id).ok()
    }

    /// External id of an internal bus index.
    pub fn bus_id(&self, index: usize) -> u64 {
        self.buses[index].id
    }

    /// Branch ids joining two external bus ids, in either orientation.
    pub fn branches_between(&self, a: u64, b: u64) -> Vec<BranchId> {
        let (Some(i), Some(j)) = (self.bus_index(a), self.bus_index(b)) else {
            return Vec::new();
        };
        let pair = if i < j { (i, j) } else { (j, i) };
        self.branches
            .iter()
            .filter(|br| br.pair() == pair)
            .map(|br| br.id)
            .collect()
    }

    /// Copy of the grid with one branch taken out; remaining ids are renumbered.
    pub fn without_branch(&self, id: BranchId) -> Grid {
        let branches = self
            .branches
            .iter()
            .filter(|b| b.id != id)
            .enumerate()
            .map(|(i, b)| Branch { id: i, ..b.clone() })
            .collect();
        Grid {
            buses: self.buses.clone(),
            branches,
            slack: self.slack,
        }
    }

    /// Copy of the grid with the given per-branch parameters rewritten.
    pub fn map_branches(&self, mut f: impl FnMut(&mut Branch)) -> Grid {
        let mut grid = self.clone();
        for b in &mut grid.branches {
            let (id, from, to) = (b.id, b.from_bus, b.to_bus);
            f(b);
            // topology is not editable through this path
            b.id = id;
            b.from_bus = from;
            b.to_bus = to;
        }
        grid
    }

    /// Serialize to the line-oriented grid-file format. `parse_grid` of the
    /// result reproduces an identical grid.
    pub fn to_grid_file(&self) -> String {
        let mut out = String::new();
        for bus in &self.buses {
            out.push_str(&format!("BUS {} {:?} {:?}\n", bus.id, bus.injection, bus.voltage_kv));
        }
        for br in &self.branches {
            out.push_str(&format!(
                "BRANCH {} {} {:?} {:?} {:?} {:?}\n",
                self.bus_id(br.from_bus),
                self.bus_id(br.to_bus),
                br.reactance,
                br.rating,
                br.weight,
                br.voltage_kv
            ));
        }
        out.push_str(&format!("SLACK {}\n", self.bus_id(self.slack)));
        out
    }
}

/// Connected components of the grid with optionally one branch taken out.
/// Returns the component count and a per-bus component label.
pub fn connected_components(adjacency: &Adjacency, removed: Option<BranchId>) -> (usize, Vec<usize>) {
    const UNSEEN: usize = usize::MAX;
    let n = adjacency.vertex_count();
    let mut label = vec![UNSEEN; n];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..n {
        if label[start] != UNSEEN {
            continue;
        }
        label[start] = count;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for (w, branch) in adjacency.neighbors(v) {
                if Some(branch) == removed || label[w] != UNSEEN {
                    continue;
                }
                label[w] = count;
                queue.push_back(w);
            }
        }
        count += 1;
    }
    (count, label)
}

/// True if taking `branch` out leaves the grid in more than one piece.
pub fn splits_without(grid: &Grid, branch: BranchId) -> bool {
    connected_components(&Adjacency::build(grid), Some(branch)).0 > 1
}

/// True iff a single BFS from bus 0 reaches every bus.
pub fn check_connected(grid: &Grid) -> bool {
    let adjacency = Adjacency::build(grid);
    is_connected(&adjacency)
}

pub(crate) fn is_connected(adjacency: &Adjacency) -> bool {
    let n = adjacency.vertex_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for (w, _) in adjacency.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == n
}
