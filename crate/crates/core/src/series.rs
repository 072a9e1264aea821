//! Recorded time series: `N` rows (sites) by `τ` columns (time steps).

use crate::error::{Error, Result};

/// Row-major series values.
///
/// Spin recordings stay in their compact `i8` form; real-valued series
/// (Gaussian null models, imported data) use `f64`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesData {
    Spins(Vec<i8>),
    Real(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesMatrix {
    rows: usize,
    tau: usize,
    data: SeriesData,
    site_indices: Vec<usize>,
    /// Side of the lattice the rows were recorded on, if any.
    lattice_side: Option<usize>,
}

impl TimeSeriesMatrix {
    /// Spin series; rows are the lattice sites listed in `site_indices`.
    pub fn from_spins(
        rows: usize,
        tau: usize,
        spins: Vec<i8>,
        site_indices: Vec<usize>,
        lattice_side: Option<usize>,
    ) -> Result<Self> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("spin series must contain only -1 and +1"));
        }
        Self::new(rows, tau, SeriesData::Spins(spins), site_indices, lattice_side)
    }

    /// Real-valued series with rows labelled `0..rows`.
    pub fn from_real(rows: usize, tau: usize, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("series values must be finite"));
        }
        Self::new(rows, tau, SeriesData::Real(values), (0..rows).collect(), None)
    }

    fn new(
        rows: usize,
        tau: usize,
        data: SeriesData,
        site_indices: Vec<usize>,
        lattice_side: Option<usize>,
    ) -> Result<Self> {
        let len = match &data {
            SeriesData::Spins(v) => v.len(),
            SeriesData::Real(v) => v.len(),
        };
        if rows.checked_mul(tau) != Some(len) {
            return Err(Error::domain(format!(
                "series data has {len} entries, expected {rows} x {tau}"
            )));
        }
        if site_indices.len() != rows {
            return Err(Error::domain("one site index per row is required"));
        }
        let mut sorted = site_indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("site indices must be distinct"));
        }
        if let Some(side) = lattice_side {
            if sorted.last().is_some_and(|&s| s >= side * side) {
                return Err(Error::domain("site index outside the lattice"));
            }
        }
        Ok(Self {
            rows,
            tau,
            data,
            site_indices,
            lattice_side,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn data(&self) -> &SeriesData {
        &self.data
    }

    pub fn site_indices(&self) -> &[usize] {
        &self.site_indices
    }

    pub fn lattice_side(&self) -> Option<usize> {
        self.lattice_side
    }

    /// Row `m` as `f64` values.
    pub fn row_f64(&self, m: usize) -> Vec<f64> {
        let range = m * self.tau..(m + 1) * self.tau;
        match &self.data {
            SeriesData::Spins(v) => v[range].iter().map(|&s| f64::from(s)).collect(),
            SeriesData::Real(v) => v[range].to_vec(),
        }
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::domain(format!("row {bad} out of range")));
        }
        let tau = self.tau;
        let data = match &self.data {
            SeriesData::Spins(v) => SeriesData::Spins(
                rows.iter()
                    .flat_map(|&r| v[r * tau..(r + 1) * tau].iter().copied())
                    .collect(),
            ),
            SeriesData::Real(v) => SeriesData::Real(
                rows.iter()
                    .flat_map(|&r| v[r * tau..(r + 1) * tau].iter().copied())
                    .collect(),
            ),
        };
        let sites = rows.iter().map(|&r| self.site_indices[r]).collect();
        Self::new(rows.len(), tau, data, sites, self.lattice_side)
    }

    /// Keeps the first `len` time steps.
    pub fn truncate_time(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.tau {
            return Err(Error::domain(format!(
                "cannot truncate a series of length {} to {len}",
                self.tau
            )));
        }
        let tau = self.tau;
        let data = match &self.data {
            SeriesData::Spins(v) => SeriesData::Spins(
                v.chunks_exact(tau).flat_map(|r| r[..len].iter().copied()).collect(),
            ),
            SeriesData::Real(v) => SeriesData::Real(
                v.chunks_exact(tau).flat_map(|r| r[..len].iter().copied()).collect(),
            ),
        };
        Self::new(self.rows, len, data, self.site_indices.clone(), self.lattice_side)
    }

    /// Mean over all entries (the magnetization for spin data).
    pub fn mean(&self) -> f64 {
        let n = (self.rows * self.tau) as f64;
        match &self.data {
            SeriesData::Spins(v) => v.iter().map(|&s| i64::from(s)).sum::<i64>() as f64 / n,
            SeriesData::Real(v) => v.iter().sum::<f64>() / n,
        }
    }
}
