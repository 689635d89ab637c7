//! Diversion of road-mode demand towards public transport.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationParams {
    pub a: f64,
    pub b: f64,
}

/// Calibrated diversion parameters, shared by every trip purpose.
pub fn default_deviation_params() -> BTreeMap<Mode, DeviationParams> {
    BTreeMap::from([
        (Mode::Car, DeviationParams { a: 1.559, b: 19.198 }),
        (Mode::Taxi, DeviationParams { a: 4.794, b: 2.668 }),
        (Mode::Minibus, DeviationParams { a: 1.652, b: 19.198 }),
        (Mode::Bicycle, DeviationParams { a: 1.652, b: 19.198 }),
    ])
}

/// Maps a generalized-cost change to the fraction of a mode's users who divert.
pub trait DiversionCurve {
    fn diverted_fraction(&self, params: DeviationParams, delta_cost: f64) -> f64;
}

/// `d = 1 / (1 + exp(a + b * delta_cost))`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LogisticDiversion;

impl DiversionCurve for LogisticDiversion {
    fn diverted_fraction(&self, params: DeviationParams, delta_cost: f64) -> f64 {
        // an infinite slope at zero cost change contributes nothing
        let slope = if delta_cost == 0.0 { 0.0 } else { params.b * delta_cost };
        let z = params.a + slope;
        if z > 0.0 {
            let e = (-z).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + z.exp())
        }
    }
}

/// Share of a mode's trips that diverts to public transport.
pub fn demand_deviation(
    share: f64,
    params: DeviationParams,
    delta_cost: f64,
    curve: &dyn DiversionCurve,
) -> f64 {
    (share * curve.diverted_fraction(params, delta_cost)).clamp(0.0, 1.0)
}
