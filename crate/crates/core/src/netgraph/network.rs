use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub type NodeId = u32;

pub const DEFAULT_VDF_ALPHA: f64 = 0.15;
pub const DEFAULT_VDF_BETA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub is_centroid: bool,
}

/// A directed road segment with BPR volume-delay parameters.
///
/// Units: `length` in km, `free_flow_time` in minutes, `capacity` in PCE/hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    pub length: f64,
    pub free_flow_time: f64,
    pub capacity: f64,
    pub vdf_alpha: f64,
    pub vdf_beta: f64,
    pub accident_rate_multiplier: f64,
}

impl Link {
    /// A link with the default BPR shape (alpha 0.15, beta 4) and unit accident multiplier.
    pub fn new(from: NodeId, to: NodeId, length: f64, free_flow_time: f64, capacity: f64) -> Self {
        Self {
            from,
            to,
            length,
            free_flow_time,
            capacity,
            vdf_alpha: DEFAULT_VDF_ALPHA,
            vdf_beta: DEFAULT_VDF_BETA,
            accident_rate_multiplier: 1.0,
        }
    }

    pub fn with_vdf(mut self, alpha: f64, beta: f64) -> Self {
        self.vdf_alpha = alpha;
        self.vdf_beta = beta;
        self
    }

    pub fn with_accident_multiplier(mut self, multiplier: f64) -> Self {
        self.accident_rate_multiplier = multiplier;
        self
    }
}

/// Editable link attributes, addressed by scenario `set` edits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkField {
    Length,
    FreeFlowTime,
    Capacity,
    VdfAlpha,
    VdfBeta,
    AccidentRateMultiplier,
}

impl LinkField {
    pub fn get(self, link: &Link) -> f64 {
        match self {
            LinkField::Length => link.length,
            LinkField::FreeFlowTime => link.free_flow_time,
            LinkField::Capacity => link.capacity,
            LinkField::VdfAlpha => link.vdf_alpha,
            LinkField::VdfBeta => link.vdf_beta,
            LinkField::AccidentRateMultiplier => link.accident_rate_multiplier,
        }
    }

    pub fn set(self, link: &mut Link, value: f64) {
        let slot = match self {
            LinkField::Length => &mut link.length,
            LinkField::FreeFlowTime => &mut link.free_flow_time,
            LinkField::Capacity => &mut link.capacity,
            LinkField::VdfAlpha => &mut link.vdf_alpha,
            LinkField::VdfBeta => &mut link.vdf_beta,
            LinkField::AccidentRateMultiplier => &mut link.accident_rate_multiplier,
        };
        *slot = value;
    }

    pub fn name(self) -> &'static str {
        match self {
            LinkField::Length => "length",
            LinkField::FreeFlowTime => "free_flow_time",
            LinkField::Capacity => "capacity",
            LinkField::VdfAlpha => "alpha",
            LinkField::VdfBeta => "beta",
            LinkField::AccidentRateMultiplier => "accident_mult",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "length" => LinkField::Length,
            "free_flow_time" | "fft" => LinkField::FreeFlowTime,
            "capacity" => LinkField::Capacity,
            "alpha" | "vdf_alpha" => LinkField::VdfAlpha,
            "beta" | "vdf_beta" => LinkField::VdfBeta,
            "accident_mult" | "accident_rate_multiplier" => LinkField::AccidentRateMultiplier,
            _ => return None,
        })
    }
}

impl fmt::Display for LinkField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A violated network invariant. Defects are reported, never raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Defect {
    DuplicateNode { id: NodeId },
    DanglingEndpoint { link: usize, node: NodeId },
    InvalidLinkField { link: usize, field: LinkField, value: f64, requirement: &'static str },
    UnknownZone { id: NodeId },
    ZoneNotCentroid { id: NodeId },
    CentroidCountMismatch { centroids: usize, zones: usize },
    UnreachableZonePair { from: NodeId, to: NodeId },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::DuplicateNode { id } => write!(f, "duplicate node id {id}"),
            Defect::DanglingEndpoint { link, node } => {
                write!(f, "dangling endpoint: link #{link} references absent node {node}")
            }
            Defect::InvalidLinkField {
                link,
                field,
                value,
                requirement,
            } => write!(f, "link #{link}: {field} = {value} violates {requirement}"),
            Defect::UnknownZone { id } => write!(f, "zone {id} is not a node of the network"),
            Defect::ZoneNotCentroid { id } => write!(f, "zone {id} is not flagged as a centroid"),
            Defect::CentroidCountMismatch { centroids, zones } => {
                write!(f, "centroid count {centroids} differs from zone count {zones}")
            }
            Defect::UnreachableZonePair { from, to } => {
                write!(f, "unreachable zone pair: {from} -> {to}")
            }
        }
    }
}

/// Directed road graph. Immutable once built; scenario edits produce new networks.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Node>,
    links: Vec<Link>,
    zone_ids: Vec<NodeId>,
    node_index: HashMap<NodeId, usize>,
    /// Outgoing link indices per node position, ascending.
    out_links: Vec<Vec<usize>>,
    /// Incoming link indices per node position, ascending.
    in_links: Vec<Vec<usize>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.links == other.links && self.zone_ids == other.zone_ids
    }
}

impl Network {
    /// Builds a network. No invariant is enforced here; see [`validate_network`].
    /// Links with an absent endpoint stay in `links` but are left out of the adjacency.
    pub fn new(nodes: Vec<Node>, links: Vec<Link>, zone_ids: Vec<NodeId>) -> Self {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (k, node) in nodes.iter().enumerate() {
            node_index.entry(node.id).or_insert(k);
        }
        let mut out_links = vec![Vec::new(); nodes.len()];
        let mut in_links = vec![Vec::new(); nodes.len()];
        for (k, link) in links.iter().enumerate() {
            if let (Some(&u), Some(&v)) = (node_index.get(&link.from), node_index.get(&link.to)) {
                out_links[u].push(k);
                in_links[v].push(k);
            }
        }
        Self {
            nodes,
            links,
            zone_ids,
            node_index,
            out_links,
            in_links,
        }
    }

    /// Convenience constructor: nodes `1..=node_count`, the first `zone_count` are centroids.
    pub fn with_numbered_nodes(node_count: u32, zone_count: u32, links: Vec<Link>) -> Self {
        let nodes = (1..=node_count)
            .map(|id| Node {
                id,
                is_centroid: id <= zone_count,
            })
            .collect();
        Self::new(nodes, links, (1..=zone_count).collect())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, index: usize) -> &Link {
        &self.links[index]
    }

    pub fn zone_ids(&self) -> &[NodeId] {
        &self.zone_ids
    }

    pub fn zone_count(&self) -> usize {
        self.zone_ids.len()
    }

    pub fn node_position(&self, id: NodeId) -> Option<usize> {
        self.node_index.get(&id).copied()
    }

    pub fn zone_position(&self, id: NodeId) -> Option<usize> {
        self.zone_ids.iter().position(|&z| z == id)
    }

    pub(crate) fn out_links(&self, node_position: usize) -> &[usize] {
        &self.out_links[node_position]
    }

    pub(crate) fn in_links(&self, node_position: usize) -> &[usize] {
        &self.in_links[node_position]
    }

    /// Index of the first link `from -> to`, if any.
    pub fn find_link(&self, from: NodeId, to: NodeId) -> Option<usize> {
        self.links.iter().position(|l| l.from == from && l.to == to)
    }

    pub fn free_flow_times(&self) -> Vec<f64> {
        self.links.iter().map(|l| l.free_flow_time).collect()
    }

    pub(crate) fn into_parts(self) -> (Vec<Node>, Vec<Link>, Vec<NodeId>) {
        (self.nodes, self.links, self.zone_ids)
    }
}

fn link_field_defects(k: usize, link: &Link, out: &mut Vec<Defect>) {
    let checks: [(LinkField, bool, &'static str); 5] = [
        (LinkField::Length, link.length >= 0.0, "length >= 0"),
        (LinkField::FreeFlowTime, link.free_flow_time > 0.0, "free_flow_time > 0"),
        (LinkField::Capacity, link.capacity > 0.0, "capacity > 0"),
        (LinkField::VdfAlpha, link.vdf_alpha >= 0.0, "alpha >= 0"),
        (LinkField::VdfBeta, link.vdf_beta >= 1.0, "beta >= 1"),
    ];
    for (field, ok, requirement) in checks {
        // `ok` is false for NaN as well
        if !ok || !field.get(link).is_finite() {
            out.push(Defect::InvalidLinkField {
                link: k,
                field,
                value: field.get(link),
                requirement,
            });
        }
    }
    let m = link.accident_rate_multiplier;
    if !(m >= 0.0 && m.is_finite()) {
        out.push(Defect::InvalidLinkField {
            link: k,
            field: LinkField::AccidentRateMultiplier,
            value: m,
            requirement: "accident_mult >= 0",
        });
    }
}

/// Checks every network invariant and lists the violations. Empty means valid.
pub fn validate_network(net: &Network) -> Vec<Defect> {
    let mut defects = Vec::new();

    let mut seen = BTreeSet::new();
    for node in &net.nodes {
        if !seen.insert(node.id) {
            defects.push(Defect::DuplicateNode { id: node.id });
        }
    }

    for (k, link) in net.links.iter().enumerate() {
        for endpoint in [link.from, link.to] {
            if !net.node_index.contains_key(&endpoint) {
                defects.push(Defect::DanglingEndpoint { link: k, node: endpoint });
            }
        }
        link_field_defects(k, link, &mut defects);
    }

    let mut zones_ok = true;
    for &z in &net.zone_ids {
        match net.node_position(z) {
            None => {
                defects.push(Defect::UnknownZone { id: z });
                zones_ok = false;
            }
            Some(p) if !net.nodes[p].is_centroid => defects.push(Defect::ZoneNotCentroid { id: z }),
            Some(_) => {}
        }
    }
    let centroids = net.nodes.iter().filter(|n| n.is_centroid).count();
    if centroids != net.zone_ids.len() {
        defects.push(Defect::CentroidCountMismatch {
            centroids,
            zones: net.zone_ids.len(),
        });
    }

    if zones_ok {
        for &origin in &net.zone_ids {
            let reached = reachable_from(net, net.node_index[&origin]);
            for &dest in &net.zone_ids {
                if dest != origin && !reached[net.node_index[&dest]] {
                    defects.push(Defect::UnreachableZonePair { from: origin, to: dest });
                }
            }
        }
    }
    defects
}

fn reachable_from(net: &Network, start: usize) -> Vec<bool> {
    let mut seen = vec![false; net.nodes.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &k in &net.out_links[u] {
            let v = net.node_index[&net.links[k].to];
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}
