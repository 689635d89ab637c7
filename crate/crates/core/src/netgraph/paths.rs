use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Network, NodeId};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("origin {0} is not a zone of the network")]
    NotAZone(NodeId),
    #[error("link cost vector has {got} entries, network has {expected} links")]
    CostLength { expected: usize, got: usize },
    #[error("link #{link} has negative or undefined cost {cost}")]
    NegativeCost { link: usize, cost: f64 },
}

/// One-to-all shortest paths from a zone.
///
/// Unreachable nodes carry `f64::INFINITY` and no predecessor; query them through
/// [`ShortestPathTree::cost_to`], which returns `None` for them.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathTree {
    origin: NodeId,
    cost: Vec<f64>,
    pred_link: Vec<Option<usize>>,
}

impl ShortestPathTree {
    pub fn origin(&self) -> NodeId {
        self.origin
    }

    /// Raw per-node-position costs (infinite when unreachable).
    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub fn pred_links(&self) -> &[Option<usize>] {
        &self.pred_link
    }

    pub fn cost_to(&self, net: &Network, node: NodeId) -> Option<f64> {
        let c = self.cost[net.node_position(node)?];
        c.is_finite().then_some(c)
    }

    pub fn is_reachable(&self, net: &Network, node: NodeId) -> bool {
        self.cost_to(net, node).is_some()
    }

    /// Link indices from the origin to `node`, in travel order. `None` if unreachable.
    pub fn path_to(&self, net: &Network, node: NodeId) -> Option<Vec<usize>> {
        let mut v = net.node_position(node)?;
        if !self.cost[v].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        while let Some(k) = self.pred_link[v] {
            path.push(k);
            v = net.node_position(net.link(k).from)?;
        }
        path.reverse();
        Some(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then node position
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `origin` over non-negative `link_costs`.
///
/// Among equal-cost predecessors of a node the lowest link index wins; only links
/// whose tail was settled earlier qualify, so the result is always a tree.
pub fn shortest_path_tree(
    net: &Network,
    origin: NodeId,
    link_costs: &[f64],
) -> Result<ShortestPathTree, PathError> {
    if link_costs.len() != net.links().len() {
        return Err(PathError::CostLength {
            expected: net.links().len(),
            got: link_costs.len(),
        });
    }
    if let Some((link, &cost)) = link_costs.iter().enumerate().find(|(_, c)| !(**c >= 0.0)) {
        return Err(PathError::NegativeCost { link, cost });
    }
    if !net.zone_ids().contains(&origin) {
        return Err(PathError::NotAZone(origin));
    }
    let start = net.node_position(origin).ok_or(PathError::NotAZone(origin))?;

    let n = net.nodes().len();
    let mut cost = vec![f64::INFINITY; n];
    let mut settle_order = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    cost[start] = 0.0;
    heap.push(Entry { cost: 0.0, node: start });
    let mut settled = 0;
    while let Some(Entry { cost: d, node: u }) = heap.pop() {
        if settle_order[u] != usize::MAX || d > cost[u] {
            continue;
        }
        settle_order[u] = settled;
        settled += 1;
        for &k in net.out_links(u) {
            let v = net.node_position(net.link(k).to).expect("adjacency holds known nodes");
            let candidate = d + link_costs[k];
            if candidate < cost[v] {
                cost[v] = candidate;
                heap.push(Entry { cost: candidate, node: v });
            }
        }
    }

    let mut pred_link = vec![None; n];
    for v in 0..n {
        if v == start || !cost[v].is_finite() {
            continue;
        }
        pred_link[v] = net.in_links(v).iter().copied().find(|&k| {
            let u = net.node_position(net.link(k).from).expect("adjacency holds known nodes");
            settle_order[u] < settle_order[v] && cost[u] + link_costs[k] == cost[v]
        });
        debug_assert!(pred_link[v].is_some());
    }

    Ok(ShortestPathTree {
        origin,
        cost,
        pred_link,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::netgraph::{Link, Node};

    #[test]
    fn single_link() {
        let net = Network::with_numbered_nodes(2, 2, vec![Link::new(1, 2, 1.0, 5.0, 100.0)]);
        let tree = shortest_path_tree(&net, 1, &[5.0]).unwrap();
        assert_eq!(tree.cost_to(&net, 2), Some(5.0));
        assert_eq!(tree.path_to(&net, 2), Some(vec![0]));
        assert_eq!(tree.cost_to(&net, 1), Some(0.0));
    }

    #[test]
    fn unreachable_is_flagged_not_large() {
        let net = Network::with_numbered_nodes(2, 2, vec![Link::new(1, 2, 1.0, 5.0, 100.0)]);
        let tree = shortest_path_tree(&net, 2, &[5.0]).unwrap();
        assert_eq!(tree.cost_to(&net, 1), None);
        assert!(tree.costs()[0].is_infinite());
        assert_eq!(tree.path_to(&net, 1), None);
    }

    #[test]
    fn equal_cost_tie_takes_lowest_link_index() {
        // 1 -> 3 via 2 (links 2,3) and via 4 (links 0,1), equal cost
        let nodes = (1..=4).map(|id| Node { id, is_centroid: id == 1 || id == 3 }).collect();
        let links = vec![
            Link::new(1, 4, 1.0, 1.0, 10.0),
            Link::new(4, 3, 1.0, 1.0, 10.0),
            Link::new(1, 2, 1.0, 1.0, 10.0),
            Link::new(2, 3, 1.0, 1.0, 10.0),
        ];
        let net = Network::new(nodes, links, vec![1, 3]);
        let costs = net.free_flow_times();
        for _ in 0..5 {
            let tree = shortest_path_tree(&net, 1, &costs).unwrap();
            assert_eq!(tree.path_to(&net, 3), Some(vec![0, 1]));
        }
    }

    #[test]
    fn rejects_non_zone_origin_and_negative_costs() {
        let net = fixtures::braess(true);
        let costs = net.free_flow_times();
        assert_eq!(shortest_path_tree(&net, 2, &costs), Err(PathError::NotAZone(2)));
        let mut bad = costs.clone();
        bad[1] = -1.0;
        assert!(matches!(
            shortest_path_tree(&net, 1, &bad),
            Err(PathError::NegativeCost { link: 1, .. })
        ));
    }

    #[test]
    fn bellman_condition_on_braess() {
        let net = fixtures::braess(true);
        let costs = net.free_flow_times();
        let tree = shortest_path_tree(&net, 1, &costs).unwrap();
        for (k, link) in net.links().iter().enumerate() {
            let cu = tree.costs()[net.node_position(link.from).unwrap()];
            let cv = tree.costs()[net.node_position(link.to).unwrap()];
            assert!(cv <= cu + costs[k]);
        }
    }
}
