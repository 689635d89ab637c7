//! Road network representation, volume-delay evaluation, shortest paths and
//! scenario edits.

mod io;
mod network;
mod paths;
mod scenario;
mod vdf;

pub use io::{format_network, parse_network, parse_scenario, read_network, read_scenario, SCENARIO_COST_SCALE};
pub use network::{
    validate_network, Defect, Link, LinkField, Network, Node, NodeId, DEFAULT_VDF_ALPHA, DEFAULT_VDF_BETA,
};
pub use paths::{shortest_path_tree, PathError, ShortestPathTree};
pub use scenario::{apply_edits, apply_scenario, DirectCosts, Edit, Phase, ScenarioDelta, ScenarioError, UndoLog};
pub use vdf::{bpr_derivative, bpr_integral, bpr_time};
