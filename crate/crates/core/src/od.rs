//! Dense origin-destination matrices indexed by zone position.

use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

/// A square zone-by-zone table. Rows are origins, columns destinations,
/// both in the order of [`crate::netgraph::Network::zone_ids`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdMatrix {
    zones: usize,
    cells: Vec<f64>,
}

impl OdMatrix {
    pub fn zeros(zones: usize) -> Self {
        Self {
            zones,
            cells: vec![0.0; zones * zones],
        }
    }

    pub fn filled(zones: usize, value: f64) -> Self {
        Self {
            zones,
            cells: vec![value; zones * zones],
        }
    }

    /// Builds a matrix from row-major cells. Panics if `cells.len() != zones²`.
    pub fn from_rows(zones: usize, cells: Vec<f64>) -> Self {
        assert_eq!(cells.len(), zones * zones, "OD matrix must be square");
        Self { zones, cells }
    }

    pub fn from_fn(zones: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut cells = Vec::with_capacity(zones * zones);
        for i in 0..zones {
            for j in 0..zones {
                cells.push(f(i, j));
            }
        }
        Self { zones, cells }
    }

    pub fn zones(&self) -> usize {
        self.zones
    }

    pub fn get(&self, origin: usize, dest: usize) -> f64 {
        self.cells[origin * self.zones + dest]
    }

    pub fn set(&mut self, origin: usize, dest: usize, value: f64) {
        self.cells[origin * self.zones + dest] = value;
    }

    pub fn row(&self, origin: usize) -> &[f64] {
        &self.cells[origin * self.zones..(origin + 1) * self.zones]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.zones).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.zones];
        for i in 0..self.zones {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        sums
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            zones: self.zones,
            cells: self.cells.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// Elementwise `self += factor * other`.
    pub fn add_scaled(&mut self, other: &OdMatrix, factor: f64) {
        assert_eq!(self.zones, other.zones, "OD matrix dimension mismatch");
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += factor * b;
        }
    }

    /// Iterates `(origin, dest, value)` over every cell in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.zones;
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, &v)| (k / n, k % n, v))
    }
}

impl Index<(usize, usize)> for OdMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.cells[i * self.zones + j]
    }
}

impl IndexMut<(usize, usize)> for OdMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.cells[i * self.zones + j]
    }
}
