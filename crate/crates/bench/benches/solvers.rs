use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use netappraise_core::demand::{mode_shares, ChoiceModel, Purpose};
use netappraise_core::fixtures::{synthetic_demand, synthetic_grid};
use netappraise_core::netgraph::shortest_path_tree;
use netappraise_core::{frank_wolfe, AssignmentOptions};

fn assignment(c: &mut Criterion) {
    let net = synthetic_grid(4, 6, 7);
    let od = synthetic_demand(24, 7, 40.0);
    let opts = AssignmentOptions::default();
    c.bench_function("frank_wolfe 24 nodes", |b| b.iter(|| frank_wolfe(black_box(&net), &od, &opts).unwrap()));

    let big = synthetic_grid(12, 12, 3);
    let costs = big.free_flow_times();
    let origin = big.zone_ids()[0];
    c.bench_function("shortest_path_tree 144 nodes", |b| {
        b.iter(|| shortest_path_tree(black_box(&big), origin, &costs).unwrap())
    });
}

fn choice(c: &mut Criterion) {
    let model = ChoiceModel::default_for(Purpose::Work);
    let u: Vec<f64> = (0..model.modes().len()).map(|k| -0.3 * k as f64).collect();
    c.bench_function("mode_shares", |b| b.iter(|| mode_shares(&model, black_box(&u))));
}

criterion_group!(benches, assignment, choice);
criterion_main!(benches);
