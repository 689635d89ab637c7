use serde::{Deserialize, Serialize};

use super::AppraiseError;

/// Prices per tonne of each priced pollutant. HC masses are charged at the NMVOC price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PollutantPrices {
    pub nox: f64,
    pub so2: f64,
    pub co: f64,
    pub nmvoc: f64,
}

/// How the printed pollutant price table is read.
///
/// The table prints SO2 as `1.825` and NMVOC as `0.5` next to `600` and `188`. The
/// scaled reading takes the dot as a thousands separator (1825, 500); the raw reading
/// keeps the printed decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceTableReading {
    #[default]
    Scaled,
    Raw,
}

impl PollutantPrices {
    pub fn from_table(reading: PriceTableReading) -> Self {
        match reading {
            PriceTableReading::Scaled => Self { nox: 600.0, so2: 1825.0, co: 188.0, nmvoc: 500.0 },
            PriceTableReading::Raw => Self { nox: 600.0, so2: 1.825, co: 188.0, nmvoc: 0.5 },
        }
    }
}

impl Default for PollutantPrices {
    fn default() -> Self {
        Self::from_table(PriceTableReading::Scaled)
    }
}

/// Value shares of accident costs by severity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityShares {
    pub fatal: f64,
    pub injury: f64,
    pub pdo: f64,
}

impl Default for SeverityShares {
    fn default() -> Self {
        Self { fatal: 0.04, injury: 0.24, pdo: 0.72 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnitValues {
    /// Currency per vehicle-hour.
    pub value_of_time: f64,
    /// Currency per litre; all fuel is priced as petrol.
    pub fuel_price: f64,
    pub pollutant_price: PollutantPrices,
    /// Total yearly accident cost in the study area.
    pub annual_accident_cost_base: f64,
    pub severity_shares: SeverityShares,
    pub discount_rate: f64,
    /// Operation years appraised after the construction year.
    pub horizon: u32,
    /// Label printed next to every monetary report. Amounts are never converted.
    pub currency: String,
}

impl Default for UnitValues {
    fn default() -> Self {
        Self {
            value_of_time: 2.004,
            fuel_price: 0.7,
            pollutant_price: PollutantPrices::default(),
            annual_accident_cost_base: 110.0e6,
            severity_shares: SeverityShares::default(),
            discount_rate: 0.08,
            horizon: 15,
            currency: "USD".to_string(),
        }
    }
}

impl UnitValues {
    pub fn check(&self) -> Result<(), AppraiseError> {
        let p = &self.pollutant_price;
        let prices = [
            ("value_of_time", self.value_of_time),
            ("fuel_price", self.fuel_price),
            ("pollutant_price.nox", p.nox),
            ("pollutant_price.so2", p.so2),
            ("pollutant_price.co", p.co),
            ("pollutant_price.nmvoc", p.nmvoc),
            ("annual_accident_cost_base", self.annual_accident_cost_base),
        ];
        for (name, v) in prices {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(AppraiseError::InvalidUnitValues(format!("{name} = {v} must be >= 0")));
            }
        }
        let s = &self.severity_shares;
        if [s.fatal, s.injury, s.pdo].iter().any(|&x| x < 0.0)
            || (s.fatal + s.injury + s.pdo - 1.0).abs() > 1e-9
        {
            return Err(AppraiseError::InvalidUnitValues(
                "severity shares must be non-negative and sum to 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.discount_rate) {
            return Err(AppraiseError::InvalidUnitValues(format!(
                "discount_rate = {} must lie in [0, 1)",
                self.discount_rate
            )));
        }
        if self.horizon < 1 {
            return Err(AppraiseError::InvalidUnitValues("horizon must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        UnitValues::default().check().unwrap();
        assert_eq!(PollutantPrices::default().so2, 1825.0);
        assert_eq!(PollutantPrices::from_table(PriceTableReading::Raw).nmvoc, 0.5);
    }

    #[test]
    fn rejects_bad_values() {
        let d = UnitValues::default;
        assert!(UnitValues { fuel_price: -0.1, ..d() }.check().is_err());
        let mut shares = d();
        shares.severity_shares.pdo = 0.7;
        assert!(shares.check().is_err());
        assert!(UnitValues { discount_rate: 1.0, ..d() }.check().is_err());
        assert!(UnitValues { horizon: 0, ..d() }.check().is_err());
    }
}
