//! Monetization of network-performance changes and project appraisal: NPV,
//! payback year, benefit/cost ratio, price sensitivity and scenario ranking.

mod ledger;
mod money;
mod physical;
mod units;

use thiserror::Error;

pub use ledger::{
    assemble_ledger, compare_scenarios, cumulative_npv, npv, payback_year, sensitivity, AppraisalLedger,
    Comparison, InitialCosts, NpvRatio, PriceDriver, RankedScenario, SensitivityShares,
};
pub use money::{accident_cost, emission_cost, monetize, AccidentCost, AnnualMetrics, LedgerYear, MetricsDelta};
pub use physical::{emissions_kg, fuel_liters, EmissionBin, EmissionFactors, FuelModel, LinkUse, Pollutants};
pub use units::{PollutantPrices, PriceTableReading, SeverityShares, UnitValues};

#[derive(Debug, Error, PartialEq)]
pub enum AppraiseError {
    #[error("link #{link}: speed {speed} km/h must be positive")]
    InvalidSpeed { link: usize, speed: f64 },
    #[error("link #{link}: speed {speed} km/h outside emission-factor coverage 0-{max}")]
    SpeedOutOfRange { link: usize, speed: f64, max: f64 },
    #[error("{0}")]
    InvalidModel(String),
    #[error("{0}")]
    InvalidUnitValues(String),
    #[error("no ledger data for year {0}")]
    MissingYear(u32),
    #[error("perturbation {0} must be positive")]
    InvalidPerturbation(f64),
    #[error("sensitivity is degenerate: no priced component affects NPV")]
    DegenerateSensitivity,
    #[error("comparison needs at least 2 ledgers, got {0}")]
    TooFewScenarios(usize),
    #[error("horizon mismatch: `{first}` has {first_years} years, `{other}` has {other_years}")]
    HorizonMismatch {
        first: String,
        first_years: usize,
        other: String,
        other_years: usize,
    },
}
