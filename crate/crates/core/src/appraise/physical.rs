//! Fuel and exhaust quantities from link flows and speeds.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::AppraiseError;

/// Traffic on one link over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkUse {
    /// Vehicles per hour.
    pub flow: f64,
    /// km/h.
    pub speed: f64,
    /// km.
    pub length: f64,
    /// Hours the flow persists.
    pub hours: f64,
}

/// Fuel per vehicle-km as `k1 + k2 / v + k3 v²`.
///
/// The defaults are illustrative only; real studies must supply calibrated constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuelModel {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Default for FuelModel {
    fn default() -> Self {
        Self { k1: 0.04, k2: 1.5, k3: 5.0e-6 }
    }
}

impl FuelModel {
    pub fn per_vehicle_km(&self, speed: f64) -> f64 {
        self.k1 + self.k2 / speed + self.k3 * speed * speed
    }

    pub fn check(&self) -> Result<(), AppraiseError> {
        let positive = (5..=120).all(|v| self.per_vehicle_km(v as f64) > 0.0);
        if positive {
            Ok(())
        } else {
            Err(AppraiseError::InvalidModel(
                "fuel per vehicle-km must be positive between 5 and 120 km/h".into(),
            ))
        }
    }
}

pub fn fuel_liters(links: &[LinkUse], model: &FuelModel) -> Result<f64, AppraiseError> {
    let mut total = 0.0;
    for (i, u) in links.iter().enumerate() {
        if !(u.speed > 0.0) {
            return Err(AppraiseError::InvalidSpeed { link: i, speed: u.speed });
        }
        total += u.flow * u.hours * u.length * model.per_vehicle_km(u.speed);
    }
    Ok(total)
}

/// Masses (or per-km factors) of the reported exhaust species.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Pollutants {
    pub co: f64,
    pub hc: f64,
    pub nox: f64,
    pub so2: f64,
}

impl Pollutants {
    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self { co: f(self.co), hc: f(self.hc), nox: f(self.nox), so2: f(self.so2) }
    }

    fn zip(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            co: f(self.co, other.co),
            hc: f(self.hc, other.hc),
            nox: f(self.nox, other.nox),
            so2: f(self.so2, other.so2),
        }
    }

    /// Percentage change of `self` relative to `base`, per species.
    pub fn percent_change_from(self, base: Self) -> Self {
        self.zip(base, |a, b| (a - b) / b * 100.0)
    }

    fn values(&self) -> [f64; 4] {
        [self.co, self.hc, self.nox, self.so2]
    }
}

impl Add for Pollutants {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Pollutants {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for Pollutants {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.map(|v| v * k)
    }
}

/// Grams per vehicle-km for speeds up to and including `upper_speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionBin {
    pub upper_speed: f64,
    #[serde(flatten)]
    pub grams_per_km: Pollutants,
}

/// Speed-binned emission factors. Bin `k` covers `(upper[k-1], upper[k]]`, the first
/// one starts at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionFactors {
    pub bins: Vec<EmissionBin>,
}

impl Default for EmissionFactors {
    /// Illustrative petrol-car curve (high at crawl speeds, a minimum around 60 km/h).
    fn default() -> Self {
        let rows: [(f64, [f64; 4]); 8] = [
            (10.0, [30.0, 4.0, 1.2, 0.050]),
            (20.0, [18.0, 2.2, 1.0, 0.040]),
            (30.0, [12.0, 1.4, 0.9, 0.035]),
            (50.0, [8.0, 0.9, 0.8, 0.030]),
            (70.0, [6.0, 0.6, 0.8, 0.030]),
            (90.0, [5.5, 0.5, 0.9, 0.032]),
            (120.0, [7.0, 0.5, 1.2, 0.038]),
            (150.0, [9.0, 0.6, 1.6, 0.045]),
        ];
        Self {
            bins: rows
                .iter()
                .map(|&(upper_speed, [co, hc, nox, so2])| EmissionBin {
                    upper_speed,
                    grams_per_km: Pollutants { co, hc, nox, so2 },
                })
                .collect(),
        }
    }
}

impl EmissionFactors {
    pub fn check(&self) -> Result<(), AppraiseError> {
        let mut prev = 0.0;
        for b in &self.bins {
            if !(b.upper_speed > prev) {
                return Err(AppraiseError::InvalidModel("emission bins must have increasing upper speeds".into()));
            }
            if b.grams_per_km.values().iter().any(|&g| !(g >= 0.0)) {
                return Err(AppraiseError::InvalidModel("emission factors must be >= 0".into()));
            }
            prev = b.upper_speed;
        }
        if prev < 120.0 {
            return Err(AppraiseError::InvalidModel("emission bins must cover 0-120 km/h".into()));
        }
        Ok(())
    }

    pub fn max_speed(&self) -> f64 {
        self.bins.last().map_or(0.0, |b| b.upper_speed)
    }

    pub fn factor(&self, speed: f64) -> Option<Pollutants> {
        if !(speed >= 0.0) {
            return None;
        }
        self.bins.iter().find(|b| speed <= b.upper_speed).map(|b| b.grams_per_km)
    }
}

pub fn emissions_kg(links: &[LinkUse], factors: &EmissionFactors) -> Result<Pollutants, AppraiseError> {
    let mut total = Pollutants::default();
    for (i, u) in links.iter().enumerate() {
        let f = factors.factor(u.speed).ok_or(AppraiseError::SpeedOutOfRange {
            link: i,
            speed: u.speed,
            max: factors.max_speed(),
        })?;
        total = total + f * (u.flow * u.hours * u.length / 1000.0);
    }
    Ok(total)
}
