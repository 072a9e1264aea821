use faer::linalg::solvers::SolveLstsq;
use faer::Mat;

use crate::error::{Error, Result};
use crate::rmt::{mp_cdf, MpParams};

pub const DEFAULT_POLYNOMIAL_ORDER: usize = 7;

/// Fraction of the levels dropped at each spectral edge after unfolding.
pub const EDGE_TRIM_FRACTION: f64 = 0.1;

/// Smooth counting function used to unfold a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unfolding {
    /// `N̄(λ) = D · F_MP(λ)` with `D` the number of levels.
    MpAnalytic(MpParams),
    /// Least-squares polynomial fit of the empirical staircase.
    Polynomial { order: usize },
}

impl Default for Unfolding {
    fn default() -> Self {
        Unfolding::Polynomial {
            order: DEFAULT_POLYNOMIAL_ORDER,
        }
    }
}

/// Maps each level to the smooth counting function and keeps the central
/// 80%, returned in increasing order.
pub fn unfold(levels: &[f64], method: &Unfolding) -> Result<Vec<f64>> {
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mapped: Vec<f64> = match method {
        Unfolding::MpAnalytic(params) => {
            params.validate()?;
            if n == 0 {
                return Err(Error::domain("cannot unfold an empty spectrum"));
            }
            sorted.iter().map(|&x| n as f64 * mp_cdf(x, params)).collect()
        }
        Unfolding::Polynomial { order } => {
            if n < 10 {
                return Err(Error::InsufficientData(format!(
                    "polynomial unfolding needs at least 10 levels, got {n}"
                )));
            }
            let poly = StaircaseFit::fit(&sorted, *order)?;
            sorted.iter().map(|&x| poly.eval(x)).collect()
        }
    };
    let trim = (EDGE_TRIM_FRACTION * n as f64).floor() as usize;
    Ok(mapped[trim..n - trim].to_vec())
}

/// Legendre expansion of the staircase `N(λ_i) = i` on the level range
/// mapped to `[-1, 1]`.
struct StaircaseFit {
    lo: f64,
    hi: f64,
    coefficients: Vec<f64>,
}

fn legendre(t: f64, order: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(order + 1);
    p.push(1.0);
    if order >= 1 {
        p.push(t);
    }
    for k in 1..order {
        let kf = k as f64;
        p.push(((2.0 * kf + 1.0) * t * p[k] - kf * p[k - 1]) / (kf + 1.0));
    }
    p
}

impl StaircaseFit {
    fn fit(sorted: &[f64], order: usize) -> Result<Self> {
        let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
        if !(hi > lo) {
            return Err(Error::Fit("all levels coincide; staircase is degenerate".into()));
        }
        if order + 1 > sorted.len() {
            return Err(Error::Fit(format!(
                "order {order} needs more than {} levels",
                sorted.len()
            )));
        }
        let k = order + 1;
        let basis: Vec<Vec<f64>> = sorted.iter().map(|&x| legendre(scale(x, lo, hi), order)).collect();
        let design = Mat::<f64>::from_fn(sorted.len(), k, |i, j| basis[i][j]);
        let target = Mat::<f64>::from_fn(sorted.len(), 1, |i, _| (i + 1) as f64);
        let qr = design.qr();
        let r = qr.thin_R();
        let max_pivot = (0..k).map(|j| r[(j, j)].abs()).fold(0.0f64, f64::max);
        if (0..k).any(|j| !(r[(j, j)].abs() > 1e-12 * max_pivot)) {
            return Err(Error::Fit("singular least-squares system in staircase fit".into()));
        }
        let solution = qr.solve_lstsq(&target);
        Ok(Self {
            lo,
            hi,
            coefficients: (0..k).map(|j| solution[(j, 0)]).collect(),
        })
    }

    fn eval(&self, x: f64) -> f64 {
        legendre(scale(x, self.lo, self.hi), self.coefficients.len() - 1)
            .iter()
            .zip(&self.coefficients)
            .map(|(p, c)| p * c)
            .sum()
    }
}

fn scale(x: f64, lo: f64, hi: f64) -> f64 {
    (2.0 * x - (lo + hi)) / (hi - lo)
}
