//! Macroscopic appraisal of road-network interventions.
//!
//! The crate chains four stages:
//!
//! * [`demand`]: zone trip generation and attraction, gravity distribution,
//!   nested-logit mode choice and conversion of person trips to PCE demand;
//! * [`assign`]: static user-equilibrium assignment (Frank-Wolfe) and skims;
//! * [`appraise`]: monetization of network-performance deltas, NPV, payback,
//!   benefit/cost ratio and price sensitivity;
//! * [`pipeline`]: configuration, file ingestion, multi-year orchestration and reports.
//!
//! [`netgraph`] holds the network model shared by all of them.

// `!(x > 0.0)` is the intended form wherever NaN must be rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod appraise;
pub mod assign;
pub mod demand;
pub mod fixtures;
pub mod netgraph;
pub mod od;
pub mod pipeline;
mod text;

use std::path::{Path, PathBuf};

pub use od::OdMatrix;
pub use text::ParseError;

pub use appraise::{AppraisalLedger, UnitValues};
pub use assign::{frank_wolfe, AssignmentOptions, FlowState};
pub use netgraph::{Link, Network, ScenarioDelta};
pub use pipeline::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("invalid network{}:\n{}", path.as_ref().map(|p| format!(" {}", p.display())).unwrap_or_default(), defects.iter().map(|d| format!("  - {d}")).collect::<Vec<_>>().join("\n"))]
    InvalidNetwork {
        path: Option<PathBuf>,
        defects: Vec<netgraph::Defect>,
    },
    #[error("scenario `{name}`: {source}")]
    Scenario {
        name: String,
        #[source]
        source: netgraph::ScenarioError,
    },
    #[error(transparent)]
    Path(#[from] netgraph::PathError),
    #[error(transparent)]
    Demand(#[from] demand::DemandError),
    #[error(transparent)]
    Assign(#[from] assign::AssignError),
    #[error(transparent)]
    Appraise(#[from] appraise::AppraiseError),
    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn input(path: &Path, message: impl Into<String>) -> Self {
        Error::Input {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    /// True for failures caused by the user's files or configuration rather than
    /// by the computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse(_)
                | Error::Input { .. }
                | Error::InvalidNetwork { .. }
                | Error::Scenario { .. }
                | Error::Config(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
