use std::collections::BTreeMap;

use netappraise_core::appraise::{
    assemble_ledger, compare_scenarios, cumulative_npv, emissions_kg, fuel_liters, monetize, npv, payback_year,
    sensitivity, AnnualMetrics, AppraisalLedger, AppraiseError, EmissionFactors, FuelModel, InitialCosts,
    LedgerYear, LinkUse, MetricsDelta, Pollutants, PriceDriver, UnitValues,
};
use netappraise_core::netgraph::DirectCosts;
use proptest::prelude::*;

/// Independent discounting: each year divided by its own power of (1 + r).
fn npv_oracle(c0: f64, flows: &[f64], r: f64) -> f64 {
    -c0 + flows.iter().enumerate().map(|(i, c)| c / (1.0 + r).powi(i as i32 + 1)).sum::<f64>()
}

fn ledger(name: &str, c0: f64, benefits: &[f64]) -> AppraisalLedger {
    AppraisalLedger {
        name: name.into(),
        currency: "USD".into(),
        initial: InitialCosts { construction: c0, ..InitialCosts::default() },
        years: benefits.iter().map(|&b| LedgerYear { time: -b, ..LedgerYear::default() }).collect(),
    }
}

proptest! {
    #[test]
    fn npv_is_linear(
        flows in prop::collection::vec(-1e6f64..1e6, 1..20),
        other in prop::collection::vec(-1e6f64..1e6, 20),
        k in -5.0f64..5.0,
        r in 0.0f64..0.3,
    ) {
        let g = &other[..flows.len()];
        let combo: Vec<f64> = flows.iter().zip(g).map(|(a, b)| k * a + b).collect();
        let lhs = npv(0.0, &combo, r);
        let rhs = k * npv(0.0, &flows, r) + npv(0.0, g, r);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())) * flows.len() as f64);
        let oracle = npv_oracle(123.0, &flows, r);
        prop_assert!((npv(123.0, &flows, r) - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()));
    }

    #[test]
    fn npv_falls_with_rate(flows in prop::collection::vec(0.1f64..1e5, 1..20), r in 0.0f64..0.5, dr in 0.001f64..0.2) {
        prop_assert!(npv(0.0, &flows, r + dr) < npv(0.0, &flows, r));
    }

    #[test]
    fn zero_rate_is_plain_sum(c0 in 0.0f64..1e6, flows in prop::collection::vec(-1e5f64..1e5, 0..20)) {
        let mut sum = 0.0 - c0;
        for c in &flows {
            sum += c;
        }
        prop_assert_eq!(npv(c0, &flows, 0.0), sum);
    }

    #[test]
    fn raising_a_flow_never_delays_payback(
        c0 in 0.0f64..500.0,
        flows in prop::collection::vec(-50.0f64..150.0, 1..15),
        at in 0usize..15,
        bump in 0.0f64..100.0,
        r in 0.0f64..0.2,
    ) {
        let before = payback_year(c0, &flows, r);
        let mut more = flows.clone();
        let k = at % more.len();
        more[k] += bump;
        let after = payback_year(c0, &more, r);
        match (before, after) {
            (Some(b), Some(a)) => prop_assert!(a <= b),
            (Some(_), None) => prop_assert!(false, "payback lost"),
            _ => {}
        }
    }

    #[test]
    fn monetize_is_linear(h in -1e7f64..1e7, f in -1e7f64..1e7, co in -1e6f64..1e6, k in -3.0f64..3.0) {
        let unit = UnitValues::default();
        let d = MetricsDelta {
            vehicle_hours: h,
            fuel_liters: f,
            emissions_kg: Pollutants { co, ..Pollutants::default() },
            ..MetricsDelta::default()
        };
        let scaled = MetricsDelta {
            vehicle_hours: k * h,
            fuel_liters: k * f,
            emissions_kg: d.emissions_kg * k,
            ..MetricsDelta::default()
        };
        let a = monetize(&scaled, &unit);
        let b = monetize(&d, &unit);
        prop_assert!((a.total_cost() - k * b.total_cost()).abs() <= 1e-9 * (1.0 + a.total_cost().abs()));
    }
}

#[test]
fn npv_worked_example() {
    assert!((npv(100.0, &[60.0, 60.0, 60.0], 0.1) - 49.211_119_459_053_37).abs() < 1e-9);
    assert_eq!(npv(10.0, &[5.0, 5.0, 5.0], 0.0), 5.0);
    assert_eq!(npv(100.0, &[], 0.05), -100.0);
}

#[test]
fn payback_examples() {
    assert_eq!(payback_year(100.0, &[50.0, 80.0, 100.0], 0.0), Some(2));
    assert_eq!(payback_year(0.0, &[0.0, 1.0], 0.1), Some(1));
    assert_eq!(payback_year(1000.0, &[1.0, 1.0, 1.0], 0.0), None);
}

#[test]
fn ledger_component_totals() {
    let unit = UnitValues { horizon: 3, ..UnitValues::default() };
    let mut years = BTreeMap::new();
    let build = |time, fuel, emission, accident| LedgerYear { time, fuel, emission, accident, maintenance: 0.0 };
    let zero = LedgerYear::default();
    for (direct, y0, total) in [
        (DirectCosts { construction: 403.0, acquisition: 164.0, annual_maintenance: 0.0 }, build(576.0, 866.0, 366.0, 47.0), 2422.0),
        (DirectCosts { construction: 314.0, acquisition: 0.0, annual_maintenance: 0.0 }, build(329.0, 495.0, 215.0, 23.0), 1376.0),
    ] {
        years.insert(0, y0);
        for y in 1..=3 {
            years.insert(y, zero);
        }
        let l = assemble_ledger("x", &direct, &years, &unit).unwrap();
        assert_eq!(l.c0(), total);
        assert_eq!(l.npv(0.08), -total);
    }
    years.remove(&2);
    assert_eq!(
        assemble_ledger("x", &DirectCosts::default(), &years, &unit).unwrap_err(),
        AppraiseError::MissingYear(2)
    );
}

#[test]
fn sensitivity_follows_component_magnitudes() {
    let unit = UnitValues::default();
    let l = AppraisalLedger {
        name: "s".into(),
        currency: "USD".into(),
        initial: InitialCosts::default(),
        years: vec![LedgerYear { time: -38.0, fuel: -55.0, emission: -3.0, accident: -4.0, maintenance: 0.0 }],
    };
    let s = sensitivity(&l, &unit, 0.1).unwrap();
    for (got, want) in [(s.fuel, 0.55), (s.time, 0.38), (s.accident, 0.04), (s.emission, 0.03)] {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert_eq!(s.ranking(), vec![PriceDriver::Fuel, PriceDriver::Time, PriceDriver::Accident, PriceDriver::Emission]);
    assert_eq!(sensitivity(&ledger("z", 5.0, &[0.0]), &unit, 0.1).unwrap_err(), AppraiseError::DegenerateSensitivity);
}

#[test]
fn constructed_streams_cross_in_order() {
    let r = 0.08;
    // higher up-front cost and higher benefits: crosses between years 2 and 3
    let a = ledger("directional", 250.0, &[100.0, 110.0, 120.0, 130.0, 140.0]);
    // cheaper, slower: crosses between years 3 and 4
    let b = ledger("cloverleaf", 180.0, &[55.0, 60.0, 65.0, 70.0, 75.0]);
    for (l, year) in [(&a, 3), (&b, 4)] {
        let cum = cumulative_npv(l.c0(), &l.cash_flows(), r);
        let k = cum.iter().position(|&v| v >= 0.0).unwrap() + 1;
        assert_eq!(k, year);
        assert!(cum[year - 2] < 0.0);
        assert_eq!(l.payback_year(r), Some(year as u32));
    }
    let cmp = compare_scenarios(&[b.clone(), a.clone()], r).unwrap();
    assert_eq!(cmp.ranking[0].name, "directional");
    assert_eq!(cmp.ranking[1].name, "cloverleaf");
    assert!((cmp.npv_ratios[0].ratio - a.npv(r) / b.npv(r)).abs() < 1e-15);
}

#[test]
fn comparison_ties_and_errors() {
    let r = 0.05;
    let x = ledger("b", 0.0, &[10.0, 10.0]);
    let y = ledger("a", 0.0, &[10.0, 10.0]);
    let cmp = compare_scenarios(&[x.clone(), y], r).unwrap();
    assert_eq!(cmp.ranking[0].name, "a");
    assert_eq!(cmp.npv_ratios[0].ratio, 1.0);

    let big = ledger("big", 0.0, &[12.7, 12.7]);
    let small = ledger("small", 0.0, &[10.0, 10.0]);
    let cmp = compare_scenarios(&[small, big], r).unwrap();
    assert!((cmp.npv_ratios[0].ratio - 1.27).abs() < 1e-12);

    let short = ledger("short", 0.0, &[1.0]);
    assert!(matches!(compare_scenarios(&[x, short], r), Err(AppraiseError::HorizonMismatch { .. })));
}

#[test]
fn fuel_and_emission_unit_arithmetic() {
    let model = FuelModel { k1: 0.05, k2: 1.2, k3: 1e-5 };
    let one = LinkUse { flow: 1000.0, speed: 50.0, length: 1.0, hours: 1.0 };
    assert!((fuel_liters(&[one], &model).unwrap() - 99.0).abs() < 1e-9);
    let k2_only = FuelModel { k1: 0.0, k2: 1.2, k3: 0.0 };
    let slow = LinkUse { speed: 25.0, ..one };
    assert!(
        (fuel_liters(&[slow], &k2_only).unwrap() - 2.0 * fuel_liters(&[one], &k2_only).unwrap()).abs() < 1e-12
    );
    assert!(matches!(
        fuel_liters(&[LinkUse { speed: 0.0, ..one }], &model),
        Err(AppraiseError::InvalidSpeed { link: 0, .. })
    ));

    let factors = EmissionFactors::default();
    let f = factors.factor(50.0).unwrap();
    let vkm = LinkUse { flow: 1e6, speed: 50.0, length: 1.0, hours: 1.0 };
    let kg = emissions_kg(&[vkm], &factors).unwrap();
    assert!((kg.co - f.co * 1000.0).abs() < 1e-6);
    assert_eq!(emissions_kg(&[LinkUse { flow: 0.0, ..vkm }], &factors).unwrap(), Pollutants::default());
    assert!(matches!(
        emissions_kg(&[LinkUse { speed: 500.0, ..vkm }], &factors),
        Err(AppraiseError::SpeedOutOfRange { .. })
    ));
}

#[test]
fn metrics_delta_signs() {
    let base = AnnualMetrics { vehicle_hours: 100.0, accident_exposure: 1000.0, ..AnnualMetrics::default() };
    let better = AnnualMetrics { vehicle_hours: 80.0, accident_exposure: 950.0, ..AnnualMetrics::default() };
    let year = monetize(&better.delta_from(&base), &UnitValues::default());
    assert!(year.time < 0.0 && year.accident < 0.0);
    assert!(year.net() > 0.0);
}
