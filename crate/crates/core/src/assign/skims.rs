use rayon::prelude::*;

use super::AssignError;
use super::fw::link_times;
use crate::netgraph::{shortest_path_tree, Network, NodeId};
use crate::od::OdMatrix;

/// Congested zone-to-zone times and the distances along the same paths.
/// Unreachable pairs hold `f64::INFINITY` in both matrices and are listed.
#[derive(Debug, Clone, PartialEq)]
pub struct Skims {
    pub time: OdMatrix,
    pub distance: OdMatrix,
    pub unreachable: Vec<(NodeId, NodeId)>,
}

pub fn skims(net: &Network, flows: &[f64]) -> Result<Skims, AssignError> {
    let times = link_times(net, flows);
    let zones = net.zone_ids();
    let n = zones.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let tree = shortest_path_tree(net, zones[i], &times)?;
            let mut t = vec![f64::INFINITY; n];
            let mut d = vec![f64::INFINITY; n];
            for j in 0..n {
                if let Some(path) = tree.path_to(net, zones[j]) {
                    t[j] = path.iter().map(|&k| times[k]).sum();
                    d[j] = path.iter().map(|&k| net.link(k).length).sum();
                }
            }
            Ok::<_, AssignError>((t, d))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut time = Vec::with_capacity(n * n);
    let mut distance = Vec::with_capacity(n * n);
    for (t, d) in rows {
        time.extend(t);
        distance.extend(d);
    }
    let time = OdMatrix::from_rows(n, time);
    let unreachable = time
        .iter()
        .filter(|&(_, _, v)| v.is_infinite())
        .map(|(i, j, _)| (zones[i], zones[j]))
        .collect();
    Ok(Skims {
        time,
        distance: OdMatrix::from_rows(n, distance),
        unreachable,
    })
}
