//! Doubly-constrained gravity distribution balanced by iterative proportional fitting.

use serde::{Deserialize, Serialize};

use super::{DemandError, TripEnds};
use crate::od::OdMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GravityOptions {
    /// Deterrence `f(c) = exp(-mu * c)`, per minute of impedance.
    pub mu: f64,
    /// Largest accepted absolute margin error, trips.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for GravityOptions {
    fn default() -> Self {
        Self {
            mu: 0.1,
            tolerance: 1e-6,
            max_iterations: 10_000,
        }
    }
}

/// Distributes balanced trip ends over zone pairs.
///
/// `T_ij = a_i b_j f(c_ij)` with balancing factors found by alternating row and column
/// scaling until both margin errors fall below `opts.tolerance`.
pub fn gravity_distribute(
    ends: &TripEnds,
    impedance: &OdMatrix,
    opts: &GravityOptions,
) -> Result<OdMatrix, DemandError> {
    let n = ends.productions.len();
    if ends.attractions.len() != n || impedance.zones() != n {
        return Err(DemandError::DimensionMismatch {
            expected: n,
            got: if ends.attractions.len() != n {
                ends.attractions.len()
            } else {
                impedance.zones()
            },
        });
    }
    let total_p: f64 = ends.productions.iter().sum();
    let total_a: f64 = ends.attractions.iter().sum();
    if (total_p - total_a).abs() > 1e-9 * total_p.max(total_a).max(1.0) {
        return Err(DemandError::Unbalanced {
            productions: total_p,
            attractions: total_a,
        });
    }
    if let Some((i, j, c)) = impedance.iter().find(|&(_, _, c)| !(c.is_finite() && c > 0.0)) {
        return Err(DemandError::InvalidImpedance {
            origin: i,
            dest: j,
            value: c,
        });
    }

    let deterrence = impedance.map(|c| (-opts.mu * c).exp());
    let prods = &ends.productions;
    let attrs = &ends.attractions;
    let mut row_factor = vec![1.0; n];
    let mut col_factor = vec![1.0; n];
    let mut row_error = f64::INFINITY;
    let mut col_error = f64::INFINITY;

    for _ in 0..opts.max_iterations.max(1) {
        for i in 0..n {
            let denom: f64 = (0..n).map(|j| col_factor[j] * deterrence.get(i, j)).sum();
            row_factor[i] = if prods[i] == 0.0 || denom == 0.0 { 0.0 } else { prods[i] / denom };
        }
        for j in 0..n {
            let denom: f64 = (0..n).map(|i| row_factor[i] * deterrence.get(i, j)).sum();
            col_factor[j] = if attrs[j] == 0.0 || denom == 0.0 { 0.0 } else { attrs[j] / denom };
        }
        let trips = OdMatrix::from_fn(n, |i, j| row_factor[i] * col_factor[j] * deterrence.get(i, j));
        row_error = max_abs_diff(&trips.row_sums(), prods);
        col_error = max_abs_diff(&trips.col_sums(), attrs);
        if row_error < opts.tolerance && col_error < opts.tolerance {
            return Ok(trips);
        }
    }
    Err(DemandError::DistributionDiverged {
        iterations: opts.max_iterations,
        row_error,
        col_error,
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
