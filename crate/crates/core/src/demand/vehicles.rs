//! Person trips to vehicles, vehicles to passenger-car equivalents.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DemandError, Mode};
use crate::od::OdMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleClass {
    Car,
    Pickup,
    Taxi,
    Minibus,
    Bus,
    Motorcycle,
    Lorry,
}

impl VehicleClass {
    pub fn name(self) -> &'static str {
        match self {
            VehicleClass::Car => "car",
            VehicleClass::Pickup => "pickup",
            VehicleClass::Taxi => "taxi",
            VehicleClass::Minibus => "minibus",
            VehicleClass::Bus => "bus",
            VehicleClass::Motorcycle => "motorcycle",
            VehicleClass::Lorry => "lorry",
        }
    }

    pub fn parse(name: &str) -> Result<Self, DemandError> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "car" => VehicleClass::Car,
            "pickup" | "pickups" => VehicleClass::Pickup,
            "taxi" => VehicleClass::Taxi,
            "minibus" | "mini-bus" => VehicleClass::Minibus,
            "bus" => VehicleClass::Bus,
            "motorcycle" => VehicleClass::Motorcycle,
            "lorry" | "truck" => VehicleClass::Lorry,
            _ => return Err(DemandError::UnknownClass(name.to_string())),
        })
    }
}

impl fmt::Display for VehicleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Mode {
    /// The road vehicle class a chosen mode loads onto the network, if any.
    pub fn vehicle_class(self) -> Option<VehicleClass> {
        match self {
            Mode::Car => Some(VehicleClass::Car),
            Mode::Motorcycle => Some(VehicleClass::Motorcycle),
            Mode::Taxi => Some(VehicleClass::Taxi),
            Mode::Minibus => Some(VehicleClass::Minibus),
            Mode::Bus | Mode::Bicycle => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleConversion {
    /// Average persons per vehicle.
    pub occupancy: BTreeMap<Mode, f64>,
    pub pce: BTreeMap<VehicleClass, f64>,
}

impl Default for VehicleConversion {
    fn default() -> Self {
        Self {
            occupancy: BTreeMap::from([
                (Mode::Car, 1.5),
                (Mode::Taxi, 2.5),
                (Mode::Motorcycle, 1.1),
                (Mode::Minibus, 12.0),
            ]),
            pce: BTreeMap::from([
                (VehicleClass::Car, 1.0),
                (VehicleClass::Pickup, 1.0),
                (VehicleClass::Taxi, 2.0),
                (VehicleClass::Minibus, 2.5),
                (VehicleClass::Bus, 2.5),
                (VehicleClass::Motorcycle, 0.5),
                (VehicleClass::Lorry, 2.5),
            ]),
        }
    }
}

/// Vehicle trips from person trips by dividing by the mode's occupancy.
/// Buses run fixed routes and are never derived from person demand.
pub fn vehicles_from_persons(
    persons: &OdMatrix,
    conv: &VehicleConversion,
    mode: Mode,
) -> Result<OdMatrix, DemandError> {
    if mode == Mode::Bus {
        return Err(DemandError::BusExcluded);
    }
    let occupancy = *conv.occupancy.get(&mode).ok_or(DemandError::MissingOccupancy(mode))?;
    if !(occupancy > 0.0) {
        return Err(DemandError::MissingOccupancy(mode));
    }
    Ok(persons.map(|v| v / occupancy))
}

/// `Σ_class pce(class) * vehicles(class)`.
pub fn pce_matrix(
    zones: usize,
    vehicle_ods: &[(VehicleClass, OdMatrix)],
    conv: &VehicleConversion,
) -> Result<OdMatrix, DemandError> {
    let mut total = OdMatrix::zeros(zones);
    for (class, od) in vehicle_ods {
        let factor = *conv
            .pce
            .get(class)
            .ok_or_else(|| DemandError::UnknownClass(class.name().to_string()))?;
        if od.zones() != zones {
            return Err(DemandError::DimensionMismatch {
                expected: zones,
                got: od.zones(),
            });
        }
        total.add_scaled(od, factor);
    }
    Ok(total)
}
