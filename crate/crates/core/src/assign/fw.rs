use rayon::prelude::*;

use super::{AssignError, AssignmentOptions, FlowState, LineSearch};
use crate::netgraph::{bpr_integral, bpr_time, shortest_path_tree, Network};
use crate::od::OdMatrix;

pub fn link_times(net: &Network, flows: &[f64]) -> Vec<f64> {
    net.links().iter().zip(flows).map(|(l, &x)| bpr_time(l, x)).collect()
}

/// Beckmann potential `Σ ∫₀^x t(s) ds`.
pub fn beckmann(net: &Network, flows: &[f64]) -> f64 {
    net.links().iter().zip(flows).map(|(l, &x)| bpr_integral(l, x)).sum()
}

struct Loading {
    flows: Vec<f64>,
    /// Σ demand × shortest-path cost.
    shortest_cost: f64,
}

fn check_od(net: &Network, od: &OdMatrix) -> Result<(), AssignError> {
    if od.zones() != net.zone_count() {
        return Err(AssignError::DimensionMismatch {
            zones: net.zone_count(),
            od: od.zones(),
        });
    }
    if let Some((i, j, v)) = od.iter().find(|&(_, _, v)| !(v >= 0.0 && v.is_finite())) {
        return Err(AssignError::InvalidDemand {
            from: net.zone_ids()[i],
            to: net.zone_ids()[j],
            value: v,
        });
    }
    Ok(())
}

/// All-or-nothing loading; per-origin loads are summed in origin order.
fn load(net: &Network, od: &OdMatrix, link_costs: &[f64]) -> Result<Loading, AssignError> {
    let zones = net.zone_ids();
    let per_origin: Vec<Result<Option<Loading>, AssignError>> = (0..zones.len())
        .into_par_iter()
        .map(|i| {
            if od.row(i).iter().all(|&d| d == 0.0) {
                return Ok(None);
            }
            let tree = shortest_path_tree(net, zones[i], link_costs)?;
            let mut flows = vec![0.0; net.links().len()];
            let mut shortest_cost = 0.0;
            for (j, &demand) in od.row(i).iter().enumerate() {
                if demand == 0.0 || i == j {
                    continue;
                }
                let path = tree.path_to(net, zones[j]).ok_or(AssignError::Unreachable {
                    from: zones[i],
                    to: zones[j],
                })?;
                shortest_cost += demand * tree.cost_to(net, zones[j]).unwrap_or(f64::INFINITY);
                for k in path {
                    flows[k] += demand;
                }
            }
            Ok(Some(Loading { flows, shortest_cost }))
        })
        .collect();

    let mut total = Loading {
        flows: vec![0.0; net.links().len()],
        shortest_cost: 0.0,
    };
    for part in per_origin {
        if let Some(part) = part? {
            for (t, f) in total.flows.iter_mut().zip(&part.flows) {
                *t += f;
            }
            total.shortest_cost += part.shortest_cost;
        }
    }
    Ok(total)
}

/// Loads every OD cell onto its shortest path under `link_costs`.
/// Intrazonal demand never enters the network.
pub fn all_or_nothing(net: &Network, od: &OdMatrix, link_costs: &[f64]) -> Result<Vec<f64>, AssignError> {
    check_od(net, od)?;
    Ok(load(net, od, link_costs)?.flows)
}

/// `(Σ x t − Σ d c*) / Σ x t` at the link times implied by `flows`.
pub fn relative_gap(net: &Network, flows: &[f64], od: &OdMatrix) -> Result<f64, AssignError> {
    check_od(net, od)?;
    let times = link_times(net, flows);
    let total: f64 = flows.iter().zip(&times).map(|(x, t)| x * t).sum();
    if total == 0.0 {
        return Err(AssignError::ZeroTotalCost);
    }
    let shortest = load(net, od, &times)?.shortest_cost;
    Ok((total - shortest) / total)
}

/// Step size minimizing the Beckmann potential on `x + λ (y − x)`, by bisection on its
/// derivative. The lower bracket end is returned so the potential never rises.
fn bisection_step(net: &Network, x: &[f64], y: &[f64], steps: usize) -> f64 {
    let slope = |lambda: f64| -> f64 {
        net.links()
            .iter()
            .zip(x.iter().zip(y))
            .map(|(l, (&xa, &ya))| (ya - xa) * bpr_time(l, xa + lambda * (ya - xa)))
            .sum()
    };
    if slope(1.0) <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Static user equilibrium by the Frank-Wolfe method.
///
/// Starts from an all-or-nothing load at free-flow times and stops once the relative
/// gap reaches `opts.relative_gap_target` or after `opts.max_iterations` gap
/// evaluations. Non-convergence is reported through [`FlowState::converged`].
pub fn frank_wolfe(net: &Network, od: &OdMatrix, opts: &AssignmentOptions) -> Result<FlowState, AssignError> {
    opts.check()?;
    check_od(net, od)?;
    if od.iter().all(|(i, j, v)| v == 0.0 || i == j) {
        let flows = vec![0.0; net.links().len()];
        return Ok(FlowState {
            times: link_times(net, &flows),
            flows,
            beckmann_value: 0.0,
            beckmann_history: vec![0.0],
            gap_history: vec![0.0],
            converged: true,
        });
    }

    let mut flows = load(net, od, &net.free_flow_times())?.flows;
    let mut gap_history = Vec::new();
    let mut beckmann_history = Vec::new();
    let mut converged = false;

    for k in 1..=opts.max_iterations {
        let times = link_times(net, &flows);
        let total: f64 = flows.iter().zip(&times).map(|(x, t)| x * t).sum();
        let target = load(net, od, &times)?;
        let gap = if total > 0.0 { (total - target.shortest_cost) / total } else { 0.0 };
        gap_history.push(gap);
        beckmann_history.push(beckmann(net, &flows));
        if gap <= opts.relative_gap_target {
            converged = true;
            break;
        }
        if k == opts.max_iterations {
            break;
        }
        let lambda = match opts.line_search {
            LineSearch::Bisection => bisection_step(net, &flows, &target.flows, opts.bisection_steps),
            LineSearch::Msa => 1.0 / (k as f64 + 1.0),
        };
        for (x, y) in flows.iter_mut().zip(&target.flows) {
            *x += lambda * (y - *x);
        }
    }

    Ok(FlowState {
        times: link_times(net, &flows),
        beckmann_value: beckmann(net, &flows),
        flows,
        gap_history,
        beckmann_history,
        converged,
    })
}
