use serde::{Deserialize, Serialize};

use super::{Pollutants, UnitValues};

/// Yearly physical performance of one network state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnualMetrics {
    pub vehicle_hours: f64,
    pub vehicle_km: f64,
    pub fuel_liters: f64,
    pub emissions_kg: Pollutants,
    /// Vehicle-km weighted by each link's accident-rate multiplier.
    pub accident_exposure: f64,
}

impl AnnualMetrics {
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            vehicle_hours: self.vehicle_hours * k,
            vehicle_km: self.vehicle_km * k,
            fuel_liters: self.fuel_liters * k,
            emissions_kg: self.emissions_kg * k,
            accident_exposure: self.accident_exposure * k,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            vehicle_hours: self.vehicle_hours + other.vehicle_hours,
            vehicle_km: self.vehicle_km + other.vehicle_km,
            fuel_liters: self.fuel_liters + other.fuel_liters,
            emissions_kg: self.emissions_kg + other.emissions_kg,
            accident_exposure: self.accident_exposure + other.accident_exposure,
        }
    }

    /// `self − baseline`, with the accident driver expressed as a relative change.
    pub fn delta_from(&self, baseline: &Self) -> MetricsDelta {
        let vkt_ratio_change = if baseline.accident_exposure > 0.0 {
            (self.accident_exposure - baseline.accident_exposure) / baseline.accident_exposure
        } else {
            0.0
        };
        MetricsDelta {
            vehicle_hours: self.vehicle_hours - baseline.vehicle_hours,
            vehicle_km: self.vehicle_km - baseline.vehicle_km,
            fuel_liters: self.fuel_liters - baseline.fuel_liters,
            emissions_kg: self.emissions_kg - baseline.emissions_kg,
            vkt_ratio_change,
        }
    }
}

/// Scenario minus baseline. Positive entries are increases, hence costs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsDelta {
    pub vehicle_hours: f64,
    pub vehicle_km: f64,
    pub fuel_liters: f64,
    pub emissions_kg: Pollutants,
    pub vkt_ratio_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccidentCost {
    pub total: f64,
    pub fatal: f64,
    pub injury: f64,
    pub pdo: f64,
}

/// Accident cost change, linear in the change of travelled distance.
/// `vkt_ratio_change` must exceed −1.
pub fn accident_cost(vkt_ratio_change: f64, unit: &UnitValues, hotspot_multiplier: f64) -> AccidentCost {
    let total = unit.annual_accident_cost_base * vkt_ratio_change * hotspot_multiplier;
    let s = &unit.severity_shares;
    AccidentCost {
        total,
        fatal: total * s.fatal,
        injury: total * s.injury,
        pdo: total * s.pdo,
    }
}

/// Monetized components of one year. Costs are positive, benefits negative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LedgerYear {
    pub time: f64,
    pub fuel: f64,
    pub emission: f64,
    pub accident: f64,
    pub maintenance: f64,
}

impl LedgerYear {
    pub fn total_cost(&self) -> f64 {
        self.time + self.fuel + self.emission + self.accident + self.maintenance
    }

    /// Net benefit, the cash flow entering the NPV.
    pub fn net(&self) -> f64 {
        0.0 - self.total_cost()
    }
}

/// Currency value of the emission change. HC is charged at the NMVOC price.
pub fn emission_cost(delta_kg: &Pollutants, unit: &UnitValues) -> f64 {
    let p = &unit.pollutant_price;
    (delta_kg.co * p.co + delta_kg.hc * p.nmvoc + delta_kg.nox * p.nox + delta_kg.so2 * p.so2) / 1000.0
}

pub fn monetize(delta: &MetricsDelta, unit: &UnitValues) -> LedgerYear {
    LedgerYear {
        time: delta.vehicle_hours * unit.value_of_time,
        fuel: delta.fuel_liters * unit.fuel_price,
        emission: emission_cost(&delta.emissions_kg, unit),
        accident: accident_cost(delta.vkt_ratio_change, unit, 1.0).total,
        maintenance: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accident_linear_relationship() {
        let u = UnitValues::default();
        let up = accident_cost(0.0432, &u, 1.0);
        assert!((up.total - 4.752e6).abs() < 1e-3);
        assert!((up.fatal + up.injury + up.pdo - up.total).abs() < 1e-6);
        assert!((up.fatal - 0.04 * 4.752e6).abs() < 1e-6);
        assert_eq!(accident_cost(0.0, &u, 1.0).total, 0.0);
        assert!((accident_cost(-0.1, &u, 1.0).total + 11.0e6).abs() < 1e-6);
        assert!((accident_cost(0.1, &u, 2.0).total - 22.0e6).abs() < 1e-6);
    }

    #[test]
    fn monetize_sign_convention() {
        let u = UnitValues::default();
        let year = monetize(
            &MetricsDelta { vehicle_hours: -100.0, fuel_liters: 50.0, ..MetricsDelta::default() },
            &u,
        );
        assert!((year.time + 200.4).abs() < 1e-12);
        assert!((year.fuel - 35.0).abs() < 1e-12);
        assert_eq!(monetize(&MetricsDelta::default(), &u), LedgerYear::default());
    }

    #[test]
    fn hc_is_priced_as_nmvoc() {
        let u = UnitValues::default();
        let kg = Pollutants { hc: 1000.0, ..Pollutants::default() };
        assert_eq!(emission_cost(&kg, &u), 500.0);
    }

    #[test]
    fn delta_ratio() {
        let base = AnnualMetrics { accident_exposure: 200.0, vehicle_hours: 10.0, ..AnnualMetrics::default() };
        let s = AnnualMetrics { accident_exposure: 210.0, vehicle_hours: 7.0, ..AnnualMetrics::default() };
        let d = s.delta_from(&base);
        assert!((d.vkt_ratio_change - 0.05).abs() < 1e-15);
        assert_eq!(d.vehicle_hours, -3.0);
        assert_eq!(base.delta_from(&base), MetricsDelta::default());
    }
}
