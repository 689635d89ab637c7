//! Independent reference solvers for the integration tests.
//!
//! Nothing here calls into the crate's assignment code. Travel times are
//! re-derived from the raw link fields.

#![allow(dead_code)]

use netappraise_core::netgraph::{Link, Network};
use netappraise_core::od::OdMatrix;

pub fn link_time(l: &Link, x: f64) -> f64 {
    l.free_flow_time * (1.0 + l.vdf_alpha * (x / l.capacity).powf(l.vdf_beta))
}

fn link_slope(l: &Link, x: f64) -> f64 {
    if l.vdf_beta == 1.0 {
        return l.free_flow_time * l.vdf_alpha / l.capacity;
    }
    l.free_flow_time * l.vdf_alpha * l.vdf_beta * x.max(0.0).powf(l.vdf_beta - 1.0) / l.capacity.powf(l.vdf_beta)
}

/// Every simple path from `from` to `to`, as link index lists.
pub fn simple_paths(net: &Network, from: u32, to: u32) -> Vec<Vec<usize>> {
    fn walk(net: &Network, at: u32, to: u32, seen: &mut Vec<u32>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if at == to {
            out.push(path.clone());
            return;
        }
        for (k, l) in net.links().iter().enumerate() {
            if l.from == at && !seen.contains(&l.to) {
                seen.push(l.to);
                path.push(k);
                walk(net, l.to, to, seen, path, out);
                path.pop();
                seen.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(net, from, to, &mut vec![from], &mut Vec::new(), &mut out);
    out
}

/// User equilibrium by path enumeration and pairwise path equilibration.
///
/// Each sweep visits every OD pair and moves flow from its dearest used path to
/// its cheapest path with a Newton step on the cost difference. Sweeps stop once
/// every pair's used paths are within `tol` minutes of each other.
pub fn path_equilibrium(net: &Network, od: &OdMatrix, tol: f64) -> Vec<f64> {
    let zones = net.zone_ids();
    let mut pairs = Vec::new();
    for (i, j, d) in od.iter() {
        if d > 0.0 {
            let paths = simple_paths(net, zones[i], zones[j]);
            assert!(!paths.is_empty(), "oracle: no path {} -> {}", zones[i], zones[j]);
            let mut flows = vec![0.0; paths.len()];
            flows[0] = d;
            pairs.push((paths, flows));
        }
    }
    let n = net.links().len();
    let load = |pairs: &[(Vec<Vec<usize>>, Vec<f64>)]| {
        let mut x = vec![0.0; n];
        for (paths, flows) in pairs {
            for (p, &f) in paths.iter().zip(flows) {
                for &k in p {
                    x[k] += f;
                }
            }
        }
        x
    };
    let mut x = load(&pairs);
    for _sweep in 0..200_000 {
        let mut worst = 0.0f64;
        for (paths, flows) in pairs.iter_mut() {
            let times: Vec<f64> = net.links().iter().zip(&x).map(|(l, &v)| link_time(l, v)).collect();
            let cost = |p: &Vec<usize>| p.iter().map(|&k| times[k]).sum::<f64>();
            let costs: Vec<f64> = paths.iter().map(cost).collect();
            let cheap = (0..paths.len()).min_by(|&a, &b| costs[a].total_cmp(&costs[b])).unwrap();
            let dear = (0..paths.len())
                .filter(|&p| flows[p] > 0.0)
                .max_by(|&a, &b| costs[a].total_cmp(&costs[b]))
                .unwrap();
            let diff = costs[dear] - costs[cheap];
            worst = worst.max(diff);
            if dear == cheap || diff <= 0.0 {
                continue;
            }
            let mut curvature = 0.0;
            for &k in paths[dear].iter().filter(|k| !paths[cheap].contains(k)) {
                curvature += link_slope(&net.links()[k], x[k]);
            }
            for &k in paths[cheap].iter().filter(|k| !paths[dear].contains(k)) {
                curvature += link_slope(&net.links()[k], x[k]);
            }
            let step = if curvature > 0.0 { (diff / curvature).min(flows[dear]) } else { flows[dear] };
            flows[dear] -= step;
            flows[cheap] += step;
            for &k in &paths[dear] {
                x[k] -= step;
            }
            for &k in &paths[cheap] {
                x[k] += step;
            }
        }
        if worst < tol {
            return load(&pairs);
        }
    }
    panic!("path equilibration did not settle");
}

/// Equilibrium split of `demand` over two parallel links, found by bisection on
/// the flow of the first link.
pub fn two_link_split(a: &Link, b: &Link, demand: f64) -> f64 {
    let excess = |x: f64| link_time(a, x) - link_time(b, demand - x);
    if excess(demand) <= 0.0 {
        return demand;
    }
    if excess(0.0) >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, demand);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bellman-Ford distances from `origin` (node position indexed). Unreachable is infinity.
pub fn bellman_ford(net: &Network, origin: u32, costs: &[f64]) -> Vec<f64> {
    let pos = |id: u32| net.node_position(id).unwrap();
    let mut d = vec![f64::INFINITY; net.nodes().len()];
    d[pos(origin)] = 0.0;
    for _ in 0..net.nodes().len() {
        let mut changed = false;
        for (l, &c) in net.links().iter().zip(costs) {
            let cand = d[pos(l.from)] + c;
            if cand < d[pos(l.to)] {
                d[pos(l.to)] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/synthetic_city")
}
