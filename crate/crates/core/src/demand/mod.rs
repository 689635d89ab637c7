//! Travel demand: trip generation and attraction, gravity distribution, nested-logit
//! vehicle choice, diversion to public transport, and conversion to PCE matrices.

mod choice;
mod deviation;
mod distribution;
mod generation;
mod io;
mod vehicles;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use choice::{
    mode_shares, mode_utility, nest_logsum, ChoiceModel, Mode, Nest, SkimEntry, UtilitySpec, UtilityTerm, Variable,
};
pub use deviation::{default_deviation_params, demand_deviation, DeviationParams, DiversionCurve, LogisticDiversion};
pub use distribution::{gravity_distribute, GravityOptions};
pub use generation::{
    balance_attractions, trip_attraction, trip_production, Purpose, Regression, Term, TripEnds, TripModels,
    ZoneAttr, ZoneAttributes,
};
pub use io::{read_skims, read_zones, SkimSet};
pub use vehicles::{pce_matrix, vehicles_from_persons, VehicleClass, VehicleConversion};

#[derive(Debug, Error, PartialEq)]
pub enum DemandError {
    #[error("unknown trip purpose `{0}`")]
    UnknownPurpose(String),
    #[error("no regression configured for purpose {0}")]
    PurposeNotConfigured(Purpose),
    #[error("purpose {0}: productions exist but total attraction is zero")]
    NoAttractionMass(Purpose),
    #[error("trip ends not balanced: productions {productions}, attractions {attractions}")]
    Unbalanced { productions: f64, attractions: f64 },
    #[error("impedance [{origin},{dest}] = {value} must be finite and positive")]
    InvalidImpedance { origin: usize, dest: usize, value: f64 },
    #[error("gravity balancing did not converge in {iterations} iterations (row error {row_error:e}, column error {col_error:e})")]
    DistributionDiverged {
        iterations: usize,
        row_error: f64,
        col_error: f64,
    },
    #[error("mode {mode}: missing variable {variable}")]
    MissingVariable { mode: Mode, variable: Variable },
    #[error("mode {mode} is not part of the {purpose} choice model")]
    ModeNotInModel { purpose: Purpose, mode: Mode },
    #[error("invalid nest: {0}")]
    InvalidNest(String),
    #[error("bus demand is not converted to vehicles")]
    BusExcluded,
    #[error("no valid occupancy configured for mode {0}")]
    MissingOccupancy(Mode),
    #[error("unknown vehicle class `{0}`")]
    UnknownClass(String),
    #[error("dimension mismatch: expected {expected} zones, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Every demand-side coefficient, with the calibrated tables as defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemandModels {
    pub trips: TripModels,
    pub choice: BTreeMap<Purpose, ChoiceModel>,
    pub deviation: BTreeMap<Mode, DeviationParams>,
    pub conversion: VehicleConversion,
    pub gravity: GravityOptions,
}

impl Default for DemandModels {
    fn default() -> Self {
        Self {
            trips: TripModels::default(),
            choice: Purpose::ALL.iter().map(|&p| (p, ChoiceModel::default_for(p))).collect(),
            deviation: default_deviation_params(),
            conversion: VehicleConversion::default(),
            gravity: GravityOptions::default(),
        }
    }
}

impl DemandModels {
    pub fn choice_model(&self, purpose: Purpose) -> Result<&ChoiceModel, DemandError> {
        self.choice.get(&purpose).ok_or(DemandError::PurposeNotConfigured(purpose))
    }
}
