use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AppraiseError, LedgerYear, UnitValues};
use crate::netgraph::DirectCosts;

/// `−C0 + Σ_{i=1..T} C_i / (1 + r)^i`.
pub fn npv(c0: f64, cash_flows: &[f64], r: f64) -> f64 {
    let mut total = 0.0 - c0;
    let mut factor = 1.0;
    for &c in cash_flows {
        factor *= 1.0 + r;
        total += c / factor;
    }
    total
}

/// Cumulative discounted net value after each year `1..=T`.
pub fn cumulative_npv(c0: f64, cash_flows: &[f64], r: f64) -> Vec<f64> {
    let mut total = 0.0 - c0;
    let mut factor = 1.0;
    cash_flows
        .iter()
        .map(|&c| {
            factor *= 1.0 + r;
            total += c / factor;
            total
        })
        .collect()
}

/// First operation year whose cumulative discounted value is non-negative.
pub fn payback_year(c0: f64, cash_flows: &[f64], r: f64) -> Option<u32> {
    cumulative_npv(c0, cash_flows, r)
        .iter()
        .position(|&v| v >= 0.0)
        .map(|k| k as u32 + 1)
}

/// The up-front cost block: direct costs plus the construction-year disbenefits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialCosts {
    pub construction: f64,
    pub acquisition: f64,
    pub time: f64,
    pub fuel: f64,
    pub emission: f64,
    pub accident: f64,
}

impl InitialCosts {
    pub fn total(&self) -> f64 {
        self.construction + self.acquisition + self.time + self.fuel + self.emission + self.accident
    }
}

/// The priced components that sensitivity analysis perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceDriver {
    Time,
    Fuel,
    Emission,
    Accident,
}

impl PriceDriver {
    pub const ALL: [PriceDriver; 4] = [PriceDriver::Time, PriceDriver::Fuel, PriceDriver::Emission, PriceDriver::Accident];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppraisalLedger {
    pub name: String,
    pub currency: String,
    pub initial: InitialCosts,
    /// Operation years `1..=T`.
    pub years: Vec<LedgerYear>,
}

impl AppraisalLedger {
    pub fn c0(&self) -> f64 {
        self.initial.total()
    }

    pub fn horizon(&self) -> usize {
        self.years.len()
    }

    pub fn cash_flows(&self) -> Vec<f64> {
        self.years.iter().map(LedgerYear::net).collect()
    }

    pub fn npv(&self, r: f64) -> f64 {
        npv(self.c0(), &self.cash_flows(), r)
    }

    pub fn payback_year(&self, r: f64) -> Option<u32> {
        payback_year(self.c0(), &self.cash_flows(), r)
    }

    /// Discounted benefits over discounted costs, `None` when there are no costs.
    ///
    /// Each component is classified by sign: negative entries are benefits. The
    /// initial block counts at year 0.
    pub fn bc_ratio(&self, r: f64) -> Option<f64> {
        let mut benefits = 0.0;
        let mut costs = 0.0;
        let mut book = |v: f64, factor: f64| {
            if v > 0.0 {
                costs += v / factor;
            } else {
                benefits -= v / factor;
            }
        };
        let i = &self.initial;
        for v in [i.construction, i.acquisition, i.time, i.fuel, i.emission, i.accident] {
            book(v, 1.0);
        }
        let mut factor = 1.0;
        for y in &self.years {
            factor *= 1.0 + r;
            for v in [y.time, y.fuel, y.emission, y.accident, y.maintenance] {
                book(v, factor);
            }
        }
        (costs > 0.0).then(|| benefits / costs)
    }

    /// Component sums over the initial block and all operation years.
    pub fn component_totals(&self) -> LedgerYear {
        let i = &self.initial;
        let mut t = LedgerYear {
            time: i.time,
            fuel: i.fuel,
            emission: i.emission,
            accident: i.accident,
            maintenance: 0.0,
        };
        for y in &self.years {
            t.time += y.time;
            t.fuel += y.fuel;
            t.emission += y.emission;
            t.accident += y.accident;
            t.maintenance += y.maintenance;
        }
        t
    }

    /// The same ledger with every entry priced by `driver` multiplied by `k`.
    pub fn with_driver_scaled(&self, driver: PriceDriver, k: f64) -> Self {
        let mut out = self.clone();
        let scale_year = |y: &mut LedgerYear| match driver {
            PriceDriver::Time => y.time *= k,
            PriceDriver::Fuel => y.fuel *= k,
            PriceDriver::Emission => y.emission *= k,
            PriceDriver::Accident => y.accident *= k,
        };
        out.years.iter_mut().for_each(scale_year);
        let i = &mut out.initial;
        match driver {
            PriceDriver::Time => i.time *= k,
            PriceDriver::Fuel => i.fuel *= k,
            PriceDriver::Emission => i.emission *= k,
            PriceDriver::Accident => i.accident *= k,
        }
        out
    }
}

/// Builds a ledger from direct costs and monetized years.
///
/// `years` must hold the construction year `0` and every operation year `1..=T`.
/// Year 0 goes into the initial block; the annual maintenance cost is added to each
/// operation year.
pub fn assemble_ledger(
    name: &str,
    direct: &DirectCosts,
    years: &BTreeMap<u32, LedgerYear>,
    unit: &UnitValues,
) -> Result<AppraisalLedger, AppraiseError> {
    let get = |y: u32| years.get(&y).copied().ok_or(AppraiseError::MissingYear(y));
    let build = get(0)?;
    let initial = InitialCosts {
        construction: direct.construction,
        acquisition: direct.acquisition,
        time: build.time,
        fuel: build.fuel,
        emission: build.emission,
        accident: build.accident,
    };
    let operation = (1..=unit.horizon)
        .map(|y| {
            let mut year = get(y)?;
            year.maintenance += direct.annual_maintenance;
            Ok(year)
        })
        .collect::<Result<Vec<_>, AppraiseError>>()?;
    Ok(AppraisalLedger {
        name: name.to_string(),
        currency: unit.currency.clone(),
        initial,
        years: operation,
    })
}

/// Share of NPV swing attributable to each price driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityShares {
    pub time: f64,
    pub fuel: f64,
    pub emission: f64,
    pub accident: f64,
}

impl SensitivityShares {
    pub fn get(&self, driver: PriceDriver) -> f64 {
        match driver {
            PriceDriver::Time => self.time,
            PriceDriver::Fuel => self.fuel,
            PriceDriver::Emission => self.emission,
            PriceDriver::Accident => self.accident,
        }
    }

    /// Drivers from most to least influential.
    pub fn ranking(&self) -> Vec<PriceDriver> {
        let mut d = PriceDriver::ALL.to_vec();
        d.sort_by(|a, b| self.get(*b).total_cmp(&self.get(*a)).then(a.cmp(b)));
        d
    }
}

/// One-at-a-time sensitivity: each unit price is moved by `±perturbation` and the NPV
/// swing recorded; shares are the swings normalized to sum to one.
pub fn sensitivity(
    ledger: &AppraisalLedger,
    unit: &UnitValues,
    perturbation: f64,
) -> Result<SensitivityShares, AppraiseError> {
    if !(perturbation > 0.0) {
        return Err(AppraiseError::InvalidPerturbation(perturbation));
    }
    let r = unit.discount_rate;
    let swing = |d: PriceDriver| {
        let up = ledger.with_driver_scaled(d, 1.0 + perturbation).npv(r);
        let down = ledger.with_driver_scaled(d, 1.0 - perturbation).npv(r);
        (up - down).abs()
    };
    let s = PriceDriver::ALL.map(swing);
    let sum: f64 = s.iter().sum();
    if !(sum > 0.0) {
        return Err(AppraiseError::DegenerateSensitivity);
    }
    Ok(SensitivityShares {
        time: s[0] / sum,
        fuel: s[1] / sum,
        emission: s[2] / sum,
        accident: s[3] / sum,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedScenario {
    pub name: String,
    pub npv: f64,
    pub payback_year: Option<u32>,
    pub bc_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpvRatio {
    pub scenario: String,
    pub relative_to: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub discount_rate: f64,
    /// Best first.
    pub ranking: Vec<RankedScenario>,
    /// `npv(a) / npv(b)` for every ranked pair with `a` ahead of `b`.
    pub npv_ratios: Vec<NpvRatio>,
}

pub fn compare_scenarios(ledgers: &[AppraisalLedger], r: f64) -> Result<Comparison, AppraiseError> {
    if ledgers.len() < 2 {
        return Err(AppraiseError::TooFewScenarios(ledgers.len()));
    }
    let horizon = ledgers[0].horizon();
    if let Some(other) = ledgers.iter().find(|l| l.horizon() != horizon) {
        return Err(AppraiseError::HorizonMismatch {
            first: ledgers[0].name.clone(),
            first_years: horizon,
            other: other.name.clone(),
            other_years: other.horizon(),
        });
    }
    let mut ranking: Vec<RankedScenario> = ledgers
        .iter()
        .map(|l| RankedScenario {
            name: l.name.clone(),
            npv: l.npv(r),
            payback_year: l.payback_year(r),
            bc_ratio: l.bc_ratio(r),
        })
        .collect();
    let payback_key = |p: Option<u32>| p.unwrap_or(u32::MAX);
    ranking.sort_by(|a, b| {
        b.npv
            .partial_cmp(&a.npv)
            .unwrap_or(Ordering::Equal)
            .then(payback_key(a.payback_year).cmp(&payback_key(b.payback_year)))
            .then_with(|| a.name.cmp(&b.name))
    });
    let mut npv_ratios = Vec::new();
    for (i, a) in ranking.iter().enumerate() {
        for b in &ranking[i + 1..] {
            npv_ratios.push(NpvRatio {
                scenario: a.name.clone(),
                relative_to: b.name.clone(),
                ratio: a.npv / b.npv,
            });
        }
    }
    Ok(Comparison { discount_rate: r, ranking, npv_ratios })
}
