//! Eigenvalue spectra and the observables computed from them.

mod eigen;
mod fluctuations;
mod unfold;

pub use eigen::{
    correlation_spectrum, eigenpairs_symmetric, eigenvalues_symmetric, gram_spectrum,
    series_spectrum, SYMMETRY_TOLERANCE,
};
pub use fluctuations::{
    number_variance, pooled_spacings, spacing_distribution, spacing_distribution_pooled,
    SpacingDistribution,
};
pub use unfold::{unfold, Unfolding, DEFAULT_POLYNOMIAL_ORDER, EDGE_TRIM_FRACTION};

use crate::corrmat::{power_map, CorrelationMatrix, PowerMapParams};
use crate::error::{Error, Result};
use crate::quad::CompensatedSum;

/// Relative threshold (times `D`) below which an eigenvalue counts as zero.
pub const ZERO_EIGENVALUE_TOLERANCE: f64 = 1e-8;

/// Eigenvalues sorted in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    source_tau: Option<usize>,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, source_tau: Option<usize>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values, source_tau }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Dimension `D` of the source matrix.
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source_tau(&self) -> Option<usize> {
        self.source_tau
    }

    pub fn sum(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        self.values.iter().for_each(|&v| acc.add(v));
        acc.value()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    pub fn max(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Number of eigenvalues above `10⁻⁸·D`.
    pub fn measured_rank(&self) -> usize {
        let threshold = ZERO_EIGENVALUE_TOLERANCE * self.dim() as f64;
        self.values.iter().filter(|&&v| v > threshold).count()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.values.iter().map(|v| v * factor).collect(), self.source_tau)
    }

    pub fn count_negative(&self) -> usize {
        self.values.iter().filter(|&&v| v < 0.0).count()
    }
}

/// Rank/eigenvalue pairs for a Zipf plot.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipfSeries {
    /// `(n, λ_n)` with `n` 1-based and `λ_n > 0`.
    pub points: Vec<(usize, f64)>,
    /// Non-positive eigenvalues with their ranks; unusable on log axes.
    pub overflow: Vec<(usize, f64)>,
}

pub fn zipf_series(s: &Spectrum) -> ZipfSeries {
    let (points, overflow) = s
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| (i + 1, v))
        .partition(|&(_, v)| v > 0.0);
    ZipfSeries { points, overflow }
}

/// Bulk and emerging parts of a power-mapped spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpectrum {
    pub bulk: Spectrum,
    pub emerging: Spectrum,
    /// `min|bulk| - max|emerging|`; positive when the two sets are separated.
    pub gap: f64,
}

impl SplitSpectrum {
    pub fn is_reliable(&self) -> bool {
        self.gap > 0.0
    }
}

/// Splits off the `D - rank` smallest-magnitude eigenvalues as the emerging
/// spectrum; `rank` is the measured rank of the matrix before the power map.
pub fn split_emerging(s: &Spectrum, rank: usize) -> Result<SplitSpectrum> {
    let d = s.dim();
    if rank == 0 || rank >= d {
        return Err(Error::domain(format!(
            "split needs 1 <= rank < D, got rank {rank} with D = {d}"
        )));
    }
    let mut by_magnitude = s.values().to_vec();
    by_magnitude.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let bulk = by_magnitude.split_off(d - rank);
    let gap = bulk[0].abs() - by_magnitude[d - rank - 1].abs();
    Ok(SplitSpectrum {
        bulk: Spectrum::new(bulk, s.source_tau()),
        emerging: Spectrum::new(by_magnitude, s.source_tau()),
        gap,
    })
}

/// Power-maps `c` and splits the result at the measured rank of `c`.
pub fn power_mapped_split(c: &CorrelationMatrix, params: PowerMapParams) -> Result<SplitSpectrum> {
    let rank = correlation_spectrum(c)?.measured_rank();
    let mapped = correlation_spectrum(&power_map(c, params)?)?;
    split_emerging(&mapped, rank)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Binning {
    /// `ceil(√n)` equal bins over the sample range.
    SqrtRule,
    Count(usize),
    /// Explicit increasing edges; samples outside are ignored.
    Edges(Vec<f64>),
}

/// Normalized histogram: `Σ density·width = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub sample_count: usize,
}

impl DensityEstimate {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn integral(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.widths())
            .map(|(d, w)| d * w)
            .sum()
    }

    /// Bin-wise mean of estimates that share the same edges.
    pub fn average(estimates: &[DensityEstimate]) -> Result<DensityEstimate> {
        let first = estimates
            .first()
            .ok_or_else(|| Error::domain("nothing to average"))?;
        if estimates.iter().any(|e| e.edges != first.edges) {
            return Err(Error::domain("averaged histograms must share bin edges"));
        }
        let k = estimates.len() as f64;
        let densities = (0..first.densities.len())
            .map(|b| {
                let mut acc = CompensatedSum::default();
                estimates.iter().for_each(|e| acc.add(e.densities[b]));
                acc.value() / k
            })
            .collect();
        Ok(DensityEstimate {
            edges: first.edges.clone(),
            densities,
            sample_count: estimates.iter().map(|e| e.sample_count).sum(),
        })
    }
}

/// Equal-width edges spanning the samples. A zero-width range becomes one
/// unit-width bin centred on the common value.
pub fn equal_width_edges(samples: &[f64], bins: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::domain("no samples"));
    }
    if bins == 0 {
        return Err(Error::domain("need at least one bin"));
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::domain("samples must be finite"));
    }
    if lo == hi {
        return Ok(vec![lo - 0.5, lo + 0.5]);
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|b| lo + width * b as f64).collect();
    edges.push(hi);
    Ok(edges)
}

pub fn density_histogram(samples: &[f64], binning: &Binning) -> Result<DensityEstimate> {
    if samples.is_empty() {
        return Err(Error::domain("cannot histogram an empty sample"));
    }
    if samples.len() < 2 {
        return Err(Error::InsufficientData("a density needs at least 2 samples".into()));
    }
    let edges = match binning {
        Binning::SqrtRule => {
            equal_width_edges(samples, (samples.len() as f64).sqrt().ceil() as usize)?
        }
        Binning::Count(k) => equal_width_edges(samples, *k)?,
        Binning::Edges(e) => {
            if e.len() < 2 || e.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::domain("bin edges must be strictly increasing"));
            }
            e.clone()
        }
    };
    histogram_on_edges(samples, edges)
}

fn histogram_on_edges(samples: &[f64], edges: Vec<f64>) -> Result<DensityEstimate> {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    let mut counts = vec![0usize; bins];
    for &x in samples {
        if !(lo..=hi).contains(&x) {
            continue;
        }
        // first edge strictly greater than x, minus one
        let b = edges.partition_point(|&e| e <= x).saturating_sub(1).min(bins - 1);
        counts[b] += 1;
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::domain("no samples fall inside the bin edges"));
    }
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (total as f64 * (w[1] - w[0])))
        .collect();
    Ok(DensityEstimate {
        edges,
        densities,
        sample_count: total,
    })
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and
/// the continuous CDF `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut best) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}
