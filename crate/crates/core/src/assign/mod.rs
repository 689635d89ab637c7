//! Static user-equilibrium traffic assignment and congested skims.

mod fw;
mod io;
mod skims;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fw::{all_or_nothing, beckmann, frank_wolfe, link_times, relative_gap};
pub use io::{format_flows, parse_tntp_demand, read_demand};
pub use skims::{skims, Skims};

use crate::netgraph::{NodeId, PathError};

#[derive(Debug, Error, PartialEq)]
pub enum AssignError {
    #[error("demand {from} -> {to} cannot be routed: no path")]
    Unreachable { from: NodeId, to: NodeId },
    #[error("demand {from} -> {to} = {value} must be finite and >= 0")]
    InvalidDemand { from: NodeId, to: NodeId, value: f64 },
    #[error("OD matrix has {od} zones, network has {zones}")]
    DimensionMismatch { zones: usize, od: usize },
    #[error("relative gap undefined: total travel cost is zero")]
    ZeroTotalCost,
    #[error("invalid assignment options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineSearch {
    /// Exact step from bisection on the directional derivative of the potential.
    Bisection,
    /// Method of successive averages, step `1 / (k + 1)`.
    Msa,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssignmentOptions {
    pub max_iterations: usize,
    pub relative_gap_target: f64,
    pub line_search: LineSearch,
    pub bisection_steps: usize,
}

impl Default for AssignmentOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            relative_gap_target: 1e-4,
            line_search: LineSearch::Bisection,
            bisection_steps: 40,
        }
    }
}

impl AssignmentOptions {
    pub fn check(&self) -> Result<(), AssignError> {
        if self.max_iterations < 1 {
            return Err(AssignError::InvalidOptions("max_iterations must be >= 1".into()));
        }
        if !(self.relative_gap_target > 0.0) {
            return Err(AssignError::InvalidOptions("relative_gap_target must be > 0".into()));
        }
        Ok(())
    }
}

/// Result of an assignment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    /// PCE/hour per link.
    pub flows: Vec<f64>,
    /// Congested minutes per link at `flows`.
    pub times: Vec<f64>,
    pub beckmann_value: f64,
    /// Relative gap at the start of each iteration.
    pub gap_history: Vec<f64>,
    /// Beckmann potential at the start of each iteration.
    pub beckmann_history: Vec<f64>,
    pub converged: bool,
}

impl FlowState {
    pub fn iterations(&self) -> usize {
        self.gap_history.len()
    }

    pub fn final_gap(&self) -> f64 {
        self.gap_history.last().copied().unwrap_or(0.0)
    }
}
