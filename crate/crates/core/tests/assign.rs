mod support;

use netappraise_core::assign::{beckmann, frank_wolfe, link_times, relative_gap, AssignmentOptions, LineSearch};
use netappraise_core::fixtures::{braess, braess_demand, synthetic_demand, synthetic_grid, two_parallel_links};
use netappraise_core::netgraph::{Link, Network};
use netappraise_core::od::OdMatrix;
use proptest::prelude::*;

fn tight() -> AssignmentOptions {
    AssignmentOptions { relative_gap_target: 1e-8, max_iterations: 20_000, ..AssignmentOptions::default() }
}

/// A strongly connected network: a directed ring over all nodes plus extra chords.
fn random_network(nodes: u32, zones: u32, chords: &[(u32, u32)], params: &[(f64, f64, f64)]) -> Network {
    let mut links = Vec::new();
    let mut pairs: Vec<(u32, u32)> = (1..=nodes).map(|a| (a, a % nodes + 1)).collect();
    for &(a, b) in chords {
        let (a, b) = (a % nodes + 1, b % nodes + 1);
        if a != b && !pairs.contains(&(a, b)) {
            pairs.push((a, b));
        }
    }
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let (fft, cap, alpha) = params[k % params.len()];
        links.push(Link::new(a, b, 1.0, fft, cap).with_vdf(alpha, 4.0));
    }
    Network::with_numbered_nodes(nodes, zones, links)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matches_path_enumeration(
        nodes in 4u32..=8,
        zones in 2u32..=3,
        chords in prop::collection::vec((0u32..8, 0u32..8), 2..8),
        params in prop::collection::vec((1.0f64..10.0, 20.0f64..80.0, 0.1f64..1.0), 4),
        demand in prop::collection::vec(5.0f64..60.0, 3),
    ) {
        let net = random_network(nodes, zones, &chords, &params);
        let mut od = OdMatrix::zeros(zones as usize);
        let z = zones as usize;
        for (q, &(i, j)) in [(0, z - 1), (z - 1, 0), (1 % z, 0)].iter().enumerate() {
            if i != j {
                od.set(i, j, demand[q]);
            }
        }
        let oracle = support::path_equilibrium(&net, &od, 1e-11);
        let state = frank_wolfe(&net, &od, &tight()).unwrap();
        for (k, (a, b)) in state.flows.iter().zip(&oracle).enumerate() {
            prop_assert!((a - b).abs() < 1e-3, "link {k}: fw {a}, oracle {b}");
        }
    }

    #[test]
    fn node_conservation(seed in 0u64..1000) {
        let net = synthetic_grid(3, 3, seed);
        let od = synthetic_demand(9, seed, 60.0);
        let state = frank_wolfe(&net, &od, &AssignmentOptions::default()).unwrap();
        let ids = net.zone_ids();
        for (n, node) in net.nodes().iter().enumerate() {
            let inflow: f64 = net.links().iter().zip(&state.flows).filter(|(l, _)| l.to == node.id).map(|(_, x)| x).sum();
            let outflow: f64 = net.links().iter().zip(&state.flows).filter(|(l, _)| l.from == node.id).map(|(_, x)| x).sum();
            let z = ids.iter().position(|&id| id == node.id).unwrap();
            let produced = od.row(z).iter().sum::<f64>();
            let attracted: f64 = (0..od.zones()).map(|i| od.get(i, z)).sum();
            let net_out = outflow - inflow;
            prop_assert!((net_out - (produced - attracted)).abs() < 1e-8 * (1.0 + produced + attracted), "node {n}");
        }
    }

    #[test]
    fn two_links_match_bisection(demand in 1.0f64..400.0, fft2 in 10.0f64..40.0) {
        let mut links = two_parallel_links().links().to_vec();
        links[1].free_flow_time = fft2 / 2.0;
        links[2].free_flow_time = fft2 / 2.0;
        let net = Network::with_numbered_nodes(3, 2, links);
        let od = OdMatrix::from_rows(2, vec![0.0, demand, 0.0, 0.0]);
        let state = frank_wolfe(&net, &od, &tight()).unwrap();

        // both hops of the second route share capacity and shape, so together they
        // behave like one link with the summed free-flow time
        let direct = net.links()[0];
        let via = Link { free_flow_time: fft2, ..net.links()[1] };
        let expected = support::two_link_split(&direct, &via, demand);
        prop_assert!((state.flows[0] - expected).abs() < 1e-3, "fw {} bisection {}", state.flows[0], expected);
        prop_assert!((state.flows[1] - (demand - expected)).abs() < 1e-3);
    }
}

#[test]
fn braess_center_link_raises_cost() {
    let od = braess_demand();
    // at a 1e-4 gap the center-link flows are still about 1.4e-3 off
    let opts = AssignmentOptions { relative_gap_target: 1e-6, max_iterations: 200, ..AssignmentOptions::default() };
    let cost = |net: &Network| {
        let state = frank_wolfe(net, &od, &opts).unwrap();
        assert!(state.converged);
        assert!(state.final_gap() <= 1e-6);
        let oracle = support::path_equilibrium(net, &od, 1e-12);
        for (a, b) in state.flows.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-3, "fw {a} oracle {b}");
        }
        // OD time along the used paths at the oracle solution
        let t: Vec<f64> = net.links().iter().zip(&oracle).map(|(l, &x)| support::link_time(l, x)).collect();
        t[0] + t[1]
    };
    let without = cost(&braess(false));
    let with = cost(&braess(true));
    assert!((without - 84.0).abs() < 1e-6);
    assert!((with - 1200.0 / 13.0).abs() < 1e-6);
    assert!(with > without);
}

#[test]
fn grid_reaches_gap_with_monotone_objective() {
    let net = synthetic_grid(4, 6, 7);
    assert_eq!(net.nodes().len(), 24);
    assert_eq!(net.links().len(), 76);
    let od = synthetic_demand(24, 7, 40.0);
    assert_eq!(od.iter().filter(|&(_, _, v)| v > 0.0).count(), 528);
    let state = frank_wolfe(&net, &od, &AssignmentOptions::default()).unwrap();
    assert!(state.converged, "gap {}", state.final_gap());
    for w in state.beckmann_history.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * w[0].abs(), "{} then {}", w[0], w[1]);
    }
    let gap = relative_gap(&net, &state.flows, &od).unwrap();
    assert!((gap - state.final_gap()).abs() < 1e-12);
    assert!((beckmann(&net, &state.flows) - state.beckmann_value).abs() < 1e-9 * state.beckmann_value);
    assert_eq!(link_times(&net, &state.flows), state.times);
}

#[test]
fn reruns_are_bit_identical() {
    let net = synthetic_grid(4, 6, 3);
    let od = synthetic_demand(24, 3, 40.0);
    let a = frank_wolfe(&net, &od, &AssignmentOptions::default()).unwrap();
    let b = frank_wolfe(&net, &od, &AssignmentOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn msa_approaches_the_same_equilibrium() {
    let net = braess(true);
    let od = braess_demand();
    let msa = AssignmentOptions {
        line_search: LineSearch::Msa,
        max_iterations: 20_000,
        relative_gap_target: 1e-6,
        ..AssignmentOptions::default()
    };
    let state = frank_wolfe(&net, &od, &msa).unwrap();
    let oracle = support::path_equilibrium(&net, &od, 1e-12);
    for (a, b) in state.flows.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-2, "msa {a} oracle {b}");
    }
}

#[test]
fn zero_demand_is_immediately_converged() {
    let net = braess(true);
    let state = frank_wolfe(&net, &OdMatrix::zeros(2), &AssignmentOptions::default()).unwrap();
    assert_eq!(state.iterations(), 1);
    assert_eq!(state.final_gap(), 0.0);
    assert!(state.flows.iter().all(|&x| x == 0.0));
}
