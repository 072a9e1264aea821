//! Random-matrix null models for real symmetric correlation matrices.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::corrmat::{build_correlation, CorrelationMatrix, PowerMapParams};
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::rng::{derive_indexed, rng_from_seed};
use crate::series::TimeSeriesMatrix;
use crate::spectra::{
    density_histogram, eigenvalues_symmetric, equal_width_edges, power_mapped_split, Binning,
    DensityEstimate, Spectrum, SplitSpectrum,
};

/// Absolute tolerance of the Marchenko–Pastur CDF quadrature.
pub const MP_QUADRATURE_TOLERANCE: f64 = 1e-10;

/// Marchenko–Pastur parameters: `kappa = D/τ` and the variance scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpParams {
    pub kappa: f64,
    pub scale: f64,
}

impl MpParams {
    /// Correlation-matrix law (unit variance).
    pub fn new(kappa: f64) -> Self {
        Self { kappa, scale: 1.0 }
    }

    pub fn from_shape(dim: usize, tau: usize) -> Self {
        Self::new(dim as f64 / tau as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::domain(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::domain(format!("scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    /// Support `(λ₋, λ₊) = scale·(1 ∓ √kappa)²` of the continuous part.
    pub fn edges(&self) -> (f64, f64) {
        let r = self.kappa.sqrt();
        (self.scale * (1.0 - r).powi(2), self.scale * (1.0 + r).powi(2))
    }

    /// Weight `1 - 1/kappa` of the atom at zero (kappa > 1 only).
    pub fn point_mass(&self) -> f64 {
        (1.0 - 1.0 / self.kappa).max(0.0)
    }
}

/// Continuous part of the Marchenko–Pastur density.
pub fn mp_density(lambda: f64, p: &MpParams) -> f64 {
    let (lo, hi) = p.edges();
    if lambda <= 0.0 || lambda <= lo || lambda >= hi {
        return 0.0;
    }
    ((hi - lambda) * (lambda - lo)).sqrt() / (2.0 * PI * p.kappa * p.scale * lambda)
}

/// Marchenko–Pastur CDF including the atom at zero.
///
/// The integral is taken in the angle `φ` with `λ = λ₋ + (λ₊-λ₋)(1-cos φ)/2`,
/// which removes the square-root behaviour at both edges.
pub fn mp_cdf(lambda: f64, p: &MpParams) -> f64 {
    if lambda < 0.0 {
        return 0.0;
    }
    let atom = p.point_mass();
    let (lo, hi) = p.edges();
    if lambda <= lo {
        return atom;
    }
    if lambda >= hi {
        return 1.0;
    }
    let half_width = 0.5 * (hi - lo);
    let phi_max = (1.0 - (lambda - lo) / half_width).clamp(-1.0, 1.0).acos();
    let norm = 2.0 * PI * p.kappa * p.scale;
    let integrand = |phi: f64| {
        let s = phi.sin();
        let x = lo + half_width * (1.0 - phi.cos());
        if x <= 0.0 {
            // κ = 1, φ = 0: the limit of w² sin²φ / (w(1 - cos φ)) is 2w
            return 2.0 * half_width / norm;
        }
        half_width * half_width * s * s / (norm * x)
    };
    atom + adaptive_simpson(integrand, 0.0, phi_max, MP_QUADRATURE_TOLERANCE)
}

/// Expected number of eigenvalues `≤ λ` among `n`: `n · F_MP(λ)`.
pub fn mp_counting(lambda: f64, p: &MpParams, n: usize) -> f64 {
    n as f64 * mp_cdf(lambda, p)
}

/// Smallest `λ` with `F_MP(λ) ≥ u`, by bisection.
pub fn mp_quantile(u: f64, p: &MpParams) -> f64 {
    let (lo, hi) = p.edges();
    if u <= p.point_mass() {
        return 0.0;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if mp_cdf(m, p) < u {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-13 * hi {
            break;
        }
    }
    0.5 * (a + b)
}

/// Zipf-plot reference for `n` levels: `λ_k` solving `n(1 - F(λ)) = k - ½`.
pub fn mp_zipf_reference(p: &MpParams, n: usize) -> Vec<(usize, f64)> {
    (1..=n)
        .map(|k| (k, mp_quantile(1.0 - (k as f64 - 0.5) / n as f64, p)))
        .collect()
}

/// Pearson correlation matrix of `dim` independent standard-normal series of
/// length `tau`, through the same estimator as the spin pipeline.
pub fn sample_wishart_correlation(dim: usize, tau: usize, seed: u64) -> Result<CorrelationMatrix> {
    if dim < 1 || tau < 1 {
        return Err(Error::domain("dimension and length must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let values: Vec<f64> = (0..dim * tau).map(|_| StandardNormal.sample(&mut rng)).collect();
    build_correlation(&TimeSeriesMatrix::from_real(dim, tau, values)?)
}

/// Eigenvalues of a GOE matrix `(A + Aᵀ)/2`, `A` with i.i.d. standard normals.
pub fn sample_goe(dim: usize, seed: u64) -> Result<Spectrum> {
    let mut rng = rng_from_seed(seed);
    let a: Vec<f64> = (0..dim * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let h: Vec<f64> = (0..dim * dim)
        .map(|k| {
            let (i, j) = (k / dim, k % dim);
            0.5 * (a[i * dim + j] + a[j * dim + i])
        })
        .collect();
    eigenvalues_symmetric(dim, &h)
}

/// Orthogonal-class surmise `P(S) = (π/2) S exp(-πS²/4)`.
pub fn wigner_surmise(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("spacing must be non-negative, got {s}")));
    }
    Ok(0.5 * PI * s * (-0.25 * PI * s * s).exp())
}

/// CDF of the surmise, `1 - exp(-πS²/4)`.
pub fn wigner_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        1.0 - (-0.25 * PI * s * s).exp()
    }
}

/// Emerging spectra of power-mapped Wishart correlation matrices.
#[derive(Debug, Clone)]
pub struct EmergingEnsemble {
    /// One split per replica, in replica order.
    pub splits: Vec<SplitSpectrum>,
    /// Replica-averaged density of the emerging eigenvalues on common bins.
    pub density: DensityEstimate,
}

impl EmergingEnsemble {
    pub fn pooled_emerging(&self) -> Vec<f64> {
        self.splits
            .iter()
            .flat_map(|s| s.emerging.values().iter().copied())
            .collect()
    }

    pub fn negative_count(&self) -> usize {
        self.splits.iter().map(|s| s.emerging.count_negative()).sum()
    }

    pub fn emerging_mean(&self) -> f64 {
        let pooled = self.pooled_emerging();
        pooled.iter().sum::<f64>() / pooled.len() as f64
    }
}

/// Replica `r` uses seed `derive_indexed(seed, "replica", r)`.
pub fn rmt_emerging_baseline(
    dim: usize,
    tau: usize,
    q: f64,
    replicas: usize,
    seed: u64,
    binning: &Binning,
) -> Result<EmergingEnsemble> {
    if tau >= dim {
        return Err(Error::domain(format!(
            "an emerging spectrum needs tau < D (got tau = {tau}, D = {dim})"
        )));
    }
    if replicas == 0 {
        return Err(Error::domain("at least one replica is required"));
    }
    let params = PowerMapParams::new(q)?;
    let splits = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let c = sample_wishart_correlation(dim, tau, derive_indexed(seed, "replica", r))?;
            power_mapped_split(&c, params)
        })
        .collect::<Result<Vec<_>>>()?;
    let pooled: Vec<f64> = splits
        .iter()
        .flat_map(|s| s.emerging.values().iter().copied())
        .collect();
    let edges = match binning {
        Binning::Edges(e) => e.clone(),
        Binning::Count(k) => equal_width_edges(&pooled, *k)?,
        Binning::SqrtRule => {
            let per_replica = pooled.len() / replicas;
            equal_width_edges(&pooled, (per_replica as f64).sqrt().ceil() as usize)?
        }
    };
    let histograms = splits
        .iter()
        .map(|s| density_histogram(s.emerging.values(), &Binning::Edges(edges.clone())))
        .collect::<Result<Vec<_>>>()?;
    let density = DensityEstimate::average(&histograms)?;
    Ok(EmergingEnsemble { splits, density })
}
