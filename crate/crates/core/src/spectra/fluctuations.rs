use log::warn;

use super::{density_histogram, Binning, DensityEstimate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SpacingDistribution {
    pub spacings: Vec<f64>,
    pub mean: f64,
    pub density: DensityEstimate,
}

impl SpacingDistribution {
    /// Whether the mean spacing is within `[0.9, 1.1]`.
    pub fn is_unit_mean(&self) -> bool {
        (0.9..=1.1).contains(&self.mean)
    }
}

fn spacings(unfolded: &[f64]) -> Vec<f64> {
    let mut sorted = unfolded.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Nearest-neighbour spacings of every sequence, pooled.
pub fn pooled_spacings(sequences: &[Vec<f64>]) -> Vec<f64> {
    sequences.iter().flat_map(|s| spacings(s)).collect()
}

pub fn spacing_distribution(unfolded: &[f64], binning: &Binning) -> Result<SpacingDistribution> {
    spacing_distribution_pooled(std::slice::from_ref(&unfolded.to_vec()), binning)
}

/// `P(S)` from the consecutive differences of each sorted unfolded sequence.
pub fn spacing_distribution_pooled(
    sequences: &[Vec<f64>],
    binning: &Binning,
) -> Result<SpacingDistribution> {
    if sequences.iter().all(|s| s.len() < 2) {
        return Err(Error::InsufficientData(
            "spacing distribution needs at least 2 points".into(),
        ));
    }
    let spacings = pooled_spacings(sequences);
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    if !(0.9..=1.1).contains(&mean) {
        warn!("mean spacing {mean:.4} is not close to 1; was the sequence unfolded?");
    }
    let density = if spacings.len() >= 2 {
        density_histogram(&spacings, binning)?
    } else {
        DensityEstimate {
            edges: vec![mean - 0.5, mean + 0.5],
            densities: vec![1.0],
            sample_count: 1,
        }
    };
    Ok(SpacingDistribution {
        spacings,
        mean,
        density,
    })
}

/// `Σ²(r)`: variance of the number of points in windows of length `r`,
/// sliding with stride `r/4`, bias corrected, averaged over the sequences.
///
/// Every `r` must satisfy `0 < r ≤ range/10` for every sequence.
pub fn number_variance(sequences: &[Vec<f64>], r_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if sequences.is_empty() {
        return Err(Error::domain("number variance needs at least one sequence"));
    }
    let sorted: Vec<Vec<f64>> = sequences
        .iter()
        .map(|s| {
            let mut v = s.clone();
            v.sort_by(f64::total_cmp);
            v
        })
        .collect();
    if sorted.iter().any(|s| s.len() < 2) {
        return Err(Error::InsufficientData("each sequence needs at least 2 points".into()));
    }
    r_values
        .iter()
        .map(|&r| {
            let mut total = 0.0;
            for seq in &sorted {
                let (first, last) = (seq[0], seq[seq.len() - 1]);
                let range = last - first;
                if !(r > 0.0 && r <= range / 10.0) {
                    return Err(Error::domain(format!(
                        "window r = {r} must lie in (0, {}] for a sequence of range {range}",
                        range / 10.0
                    )));
                }
                total += window_count_variance(seq, r);
            }
            Ok((r, total / sorted.len() as f64))
        })
        .collect()
}

fn window_count_variance(sorted: &[f64], r: f64) -> f64 {
    let (first, last) = (sorted[0], sorted[sorted.len() - 1]);
    let stride = r / 4.0;
    let windows = ((last - first - r) / stride).floor() as usize + 1;
    let counts: Vec<f64> = (0..windows)
        .map(|k| {
            let start = first + stride * k as f64;
            let lo = sorted.partition_point(|&x| x < start);
            let hi = sorted.partition_point(|&x| x < start + r);
            (hi - lo) as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / windows as f64;
    counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (windows as f64 - 1.0)
}
