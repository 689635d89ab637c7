use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{Inputs, RunConfig};
use crate::appraise::{
    assemble_ledger, compare_scenarios, emissions_kg, fuel_liters, monetize, sensitivity, AnnualMetrics,
    AppraisalLedger, AppraiseError, Comparison, EmissionFactors, FuelModel, LedgerYear, LinkUse, MetricsDelta,
    SensitivityShares,
};
use crate::assign::{self, frank_wolfe, FlowState};
use crate::demand::{
    balance_attractions, demand_deviation, gravity_distribute, mode_shares, mode_utility, pce_matrix,
    vehicles_from_persons, LogisticDiversion, Mode, Purpose, SkimSet, ZoneAttributes,
};
use crate::netgraph::{apply_scenario, DirectCosts, Network, Phase};
use crate::od::OdMatrix;
use crate::Error;

/// Zone attributes of `year`: population and car ownership compound yearly.
pub fn grow_zones(zones: &[ZoneAttributes], config: &RunConfig, year: u32) -> Vec<ZoneAttributes> {
    let gp = config.growth.population.powi(year as i32);
    let gv = config.growth.car_ownership.powi(year as i32);
    zones
        .iter()
        .map(|z| ZoneAttributes {
            population: z.population * gp,
            car_ownership: z.car_ownership * gv,
            ..*z
        })
        .collect()
}

/// Input skims of `year`: transit times follow the configured growth.
pub fn grow_skims(skims: &SkimSet, config: &RunConfig, year: u32) -> SkimSet {
    let k = config.growth.transit_time.powi(year as i32);
    SkimSet {
        transit_in_vehicle: skims.transit_in_vehicle.scaled(k),
        transit_out_of_vehicle: skims.transit_out_of_vehicle.scaled(k),
        ..skims.clone()
    }
}

/// Daily person trips by mode and the PCE matrix derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyDemand {
    pub persons: BTreeMap<Mode, OdMatrix>,
    pub pce: OdMatrix,
}

/// Generation, balancing, gravity distribution, mode choice and PCE conversion.
///
/// Car time from `skims` is the distribution impedance. Bus and bicycle trips stay
/// in `persons` but put no vehicles on the road network.
pub fn daily_demand(zones: &[ZoneAttributes], skims: &SkimSet, config: &RunConfig) -> Result<DailyDemand, Error> {
    let models = &config.demand;
    let n = zones.len();
    let mut persons: BTreeMap<Mode, OdMatrix> = BTreeMap::new();
    for purpose in Purpose::ALL {
        let ends = balance_attractions(&models.trips.trip_ends(zones, purpose)?)?;
        if ends.productions.iter().all(|&p| p == 0.0) {
            continue;
        }
        let od = gravity_distribute(&ends, &skims.car_time, &models.gravity)?;
        split_by_mode(&od, purpose, skims, config, &mut persons)?;
    }

    let mut vehicle_ods = Vec::new();
    for (&mode, od) in &persons {
        if let Some(class) = mode.vehicle_class() {
            vehicle_ods.push((class, vehicles_from_persons(od, &models.conversion, mode)?));
        }
    }
    let pce = pce_matrix(n, &vehicle_ods, &models.conversion)?;
    Ok(DailyDemand { persons, pce })
}

fn split_by_mode(
    od: &OdMatrix,
    purpose: Purpose,
    skims: &SkimSet,
    config: &RunConfig,
    persons: &mut BTreeMap<Mode, OdMatrix>,
) -> Result<(), Error> {
    let model = config.demand.choice_model(purpose)?;
    let modes = model.modes();
    let n = od.zones();
    for &m in &modes {
        persons.entry(m).or_insert_with(|| OdMatrix::zeros(n));
    }
    let mut utilities = vec![0.0; modes.len()];
    for (i, j, trips) in od.iter() {
        if trips == 0.0 {
            continue;
        }
        let entry = skims.entry(i, j);
        for (u, &m) in utilities.iter_mut().zip(&modes) {
            *u = mode_utility(model, m, &entry)?;
        }
        let mut shares = mode_shares(model, &utilities);
        let mut to_bus = 0.0;
        if config.diversion.enabled {
            for (s, m) in shares.iter_mut().zip(&modes) {
                if let (false, Some(&params)) = (*m == Mode::Bus, config.demand.deviation.get(m)) {
                    let d = demand_deviation(*s, params, config.diversion.delta_cost, &LogisticDiversion);
                    *s -= d;
                    to_bus += d;
                }
            }
        }
        for (s, m) in shares.iter().zip(&modes) {
            persons.get_mut(m).expect("inserted above")[(i, j)] += trips * s;
        }
        if to_bus > 0.0 {
            persons.entry(Mode::Bus).or_insert_with(|| OdMatrix::zeros(n))[(i, j)] += trips * to_bus;
        }
    }
    Ok(())
}

/// Per-hour network totals for one assigned period. Links of zero length carry no
/// distance, fuel or emissions; their time still counts.
pub fn hourly_metrics(
    net: &Network,
    state: &FlowState,
    fuel: &FuelModel,
    emission: &EmissionFactors,
) -> Result<AnnualMetrics, AppraiseError> {
    let mut m = AnnualMetrics::default();
    let mut uses = Vec::new();
    let mut index = Vec::new();
    for (k, ((link, &x), &t)) in net.links().iter().zip(&state.flows).zip(&state.times).enumerate() {
        m.vehicle_hours += x * t / 60.0;
        m.vehicle_km += x * link.length;
        m.accident_exposure += x * link.length * link.accident_rate_multiplier;
        if link.length > 0.0 {
            uses.push(LinkUse { flow: x, speed: link.length / (t / 60.0), length: link.length, hours: 1.0 });
            index.push(k);
        }
    }
    let relabel = |e: AppraiseError| match e {
        AppraiseError::InvalidSpeed { link, speed } => AppraiseError::InvalidSpeed { link: index[link], speed },
        AppraiseError::SpeedOutOfRange { link, speed, max } => {
            AppraiseError::SpeedOutOfRange { link: index[link], speed, max }
        }
        other => other,
    };
    m.fuel_liters = fuel_liters(&uses, fuel).map_err(relabel)?;
    m.emissions_kg = emissions_kg(&uses, emission).map_err(relabel)?;
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodResult {
    pub name: String,
    pub state: FlowState,
}

/// One network in one year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearResult {
    pub year: u32,
    pub metrics: AnnualMetrics,
    pub periods: Vec<PeriodResult>,
    /// False when any period stopped at the iteration cap.
    pub converged: bool,
}

/// Assigns each period's share of `daily_pce` and expands to yearly totals.
pub fn assess_network(net: &Network, daily_pce: &OdMatrix, config: &RunConfig, year: u32) -> Result<YearResult, Error> {
    let mut metrics = AnnualMetrics::default();
    let mut periods = Vec::with_capacity(config.periods.len());
    let mut converged = true;
    for period in &config.periods {
        let state = frank_wolfe(net, &daily_pce.scaled(period.demand_share), &config.assignment)?;
        if !state.converged {
            log::warn!(
                "year {year}, period {}: assignment stopped at gap {:e} after {} iterations",
                period.name,
                state.final_gap(),
                state.iterations()
            );
            converged = false;
        }
        let hourly = hourly_metrics(net, &state, &config.fuel, &config.emission)?;
        metrics = metrics.add(&hourly.scaled(period.hours_per_year));
        periods.push(PeriodResult { name: period.name.clone(), state });
    }
    Ok(YearResult { year, metrics, periods, converged })
}

/// Demand for `year` on the input skims.
pub fn year_demand(inputs: &Inputs, config: &RunConfig, year: u32) -> Result<DailyDemand, Error> {
    daily_demand(&grow_zones(&inputs.zones, config, year), &grow_skims(&inputs.skims, config, year), config)
}

/// The full chain for one network and year.
///
/// With feedback enabled, congested car times from the first period replace the
/// input car times between passes and the PCE matrix is averaged across passes.
pub fn run_year(
    net: &Network,
    zones: &[ZoneAttributes],
    skims: &SkimSet,
    config: &RunConfig,
    year: u32,
) -> Result<YearResult, Error> {
    let zones = grow_zones(zones, config, year);
    let mut current = grow_skims(skims, config, year);
    if !config.feedback.enabled {
        let demand = daily_demand(&zones, &current, config)?;
        return assess_network(net, &demand.pce, config, year);
    }
    let mut averaged: Option<OdMatrix> = None;
    let mut result = None;
    for k in 1..=config.feedback.max_iterations {
        let demand = daily_demand(&zones, &current, config)?;
        let od = match averaged {
            None => demand.pce,
            Some(prev) => {
                let mut next = prev.clone();
                next.add_scaled(&demand.pce.map(|v| v / k as f64), 1.0);
                next.add_scaled(&prev, -1.0 / k as f64);
                next
            }
        };
        let r = assess_network(net, &od, config, year)?;
        let congested = assign::skims(net, &r.periods[0].state.flows)?;
        for (i, j, t) in congested.time.iter() {
            if i != j && t.is_finite() {
                current.car_time[(i, j)] = t;
            }
        }
        averaged = Some(od);
        result = Some(r);
    }
    Ok(result.expect("at least one feedback pass"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub direct_costs: DirectCosts,
    /// Year 0 on the construction-phase network, then years `1..=T` in operation.
    pub years: Vec<YearResult>,
    pub deltas: Vec<MetricsDelta>,
    pub monetized: Vec<LedgerYear>,
    pub ledger: AppraisalLedger,
    /// `None` when no priced component moves the NPV.
    pub sensitivity: Option<SensitivityShares>,
    #[serde(skip)]
    pub construction_network: Network,
    #[serde(skip)]
    pub operation_network: Network,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonResult {
    pub horizon: u32,
    pub discount_rate: f64,
    pub currency: String,
    pub status_quo: Vec<YearResult>,
    pub scenarios: Vec<ScenarioOutcome>,
    /// Present when at least two scenarios were appraised.
    pub comparison: Option<Comparison>,
    #[serde(skip)]
    pub status_quo_network: Network,
}

impl HorizonResult {
    pub fn all_converged(&self) -> bool {
        self.status_quo.iter().chain(self.scenarios.iter().flat_map(|s| &s.years)).all(|y| y.converged)
    }

    /// `network (year, period)` labels of every assignment that hit the cap.
    pub fn non_converged(&self) -> Vec<String> {
        let mut out = Vec::new();
        let nets = std::iter::once(("status_quo", &self.status_quo))
            .chain(self.scenarios.iter().map(|s| (s.name.as_str(), &s.years)));
        for (name, years) in nets {
            for y in years {
                for p in y.periods.iter().filter(|p| !p.state.converged) {
                    out.push(format!("{name} year {} {}", y.year, p.name));
                }
            }
        }
        out
    }

    pub fn ledgers(&self) -> Vec<AppraisalLedger> {
        self.scenarios.iter().map(|s| s.ledger.clone()).collect()
    }
}

/// Status quo and every scenario over years `0..=T`, appraised against the status quo.
///
/// Jobs are independent and run in parallel; results are gathered in a fixed order.
pub fn run_horizon(inputs: &Inputs, config: &RunConfig) -> Result<HorizonResult, Error> {
    let horizon = config.horizon();
    let base = &inputs.network;
    let mut networks: Vec<(Network, Network)> = Vec::with_capacity(inputs.scenarios.len());
    for s in &inputs.scenarios {
        let phase_net = |phase| {
            apply_scenario(base, s, phase).map_err(|source| Error::Scenario { name: s.name.clone(), source })
        };
        networks.push((phase_net(Phase::Construction)?, phase_net(Phase::Operation)?));
    }

    // (network slot, year): slot 0 is the status quo, slot k the k-th scenario
    let jobs: Vec<(usize, u32)> = (0..=inputs.scenarios.len())
        .flat_map(|slot| (0..=horizon).map(move |y| (slot, y)))
        .collect();
    let net_for = |slot: usize, year: u32| -> &Network {
        match (slot, year) {
            (0, _) => base,
            (k, 0) => &networks[k - 1].0,
            (k, _) => &networks[k - 1].1,
        }
    };

    let results: Vec<YearResult> = if config.feedback.enabled {
        jobs.par_iter()
            .map(|&(slot, y)| run_year(net_for(slot, y), &inputs.zones, &inputs.skims, config, y))
            .collect::<Result<_, _>>()?
    } else {
        // demand does not depend on the network, so each year's matrix is shared
        let demand: Vec<OdMatrix> = (0..=horizon)
            .into_par_iter()
            .map(|y| year_demand(inputs, config, y).map(|d| d.pce))
            .collect::<Result<_, _>>()?;
        jobs.par_iter()
            .map(|&(slot, y)| assess_network(net_for(slot, y), &demand[y as usize], config, y))
            .collect::<Result<_, _>>()?
    };

    let per_net = horizon as usize + 1;
    let mut chunks = results.chunks(per_net).map(<[YearResult]>::to_vec);
    let status_quo = chunks.next().expect("status quo is always run");
    let unit = &config.appraisal;
    let mut scenarios = Vec::with_capacity(inputs.scenarios.len());
    for ((s, years), (construction_network, operation_network)) in inputs.scenarios.iter().zip(chunks).zip(networks) {
        let deltas: Vec<MetricsDelta> =
            years.iter().zip(&status_quo).map(|(a, b)| a.metrics.delta_from(&b.metrics)).collect();
        let monetized: Vec<LedgerYear> = deltas.iter().map(|d| monetize(d, unit)).collect();
        let by_year: BTreeMap<u32, LedgerYear> = monetized.iter().enumerate().map(|(y, m)| (y as u32, *m)).collect();
        let ledger = assemble_ledger(&s.name, &s.direct_costs, &by_year, unit)?;
        let sensitivity = match sensitivity(&ledger, unit, config.sensitivity_perturbation) {
            Ok(shares) => Some(shares),
            Err(AppraiseError::DegenerateSensitivity) => None,
            Err(e) => return Err(e.into()),
        };
        scenarios.push(ScenarioOutcome {
            name: s.name.clone(),
            direct_costs: s.direct_costs,
            years,
            deltas,
            monetized,
            ledger,
            sensitivity,
            construction_network,
            operation_network,
        });
    }
    let comparison = if scenarios.len() >= 2 {
        Some(compare_scenarios(&scenarios.iter().map(|s| s.ledger.clone()).collect::<Vec<_>>(), unit.discount_rate)?)
    } else {
        None
    };
    Ok(HorizonResult {
        horizon,
        discount_rate: unit.discount_rate,
        currency: unit.currency.clone(),
        status_quo,
        scenarios,
        comparison,
        status_quo_network: base.clone(),
    })
}
