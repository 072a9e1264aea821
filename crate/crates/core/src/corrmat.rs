//! Pearson correlation matrices, random site subsampling and the entrywise
//! power map `C_mn → sgn(C_mn)|C_mn|^q`.

use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::series::{SeriesData, TimeSeriesMatrix};

/// Symmetric `D × D` matrix stored as its packed upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    dim: usize,
    upper: Vec<f64>,
    /// Length of the series the matrix was estimated from, if known.
    tau: Option<usize>,
    degenerate_sites: Vec<usize>,
    /// Exponent of the power map applied so far (1 for a raw estimate).
    power: f64,
}

impl CorrelationMatrix {
    fn row_start(&self, m: usize) -> usize {
        // Σ_{i<m} (dim - i)
        m * self.dim - m * (m + 1) / 2 + m
    }

    /// Builds from a full row-major matrix, which must be exactly symmetric.
    pub fn from_dense(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::domain("dense matrix has the wrong number of entries"));
        }
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        let mut max_asymmetry = 0.0f64;
        for m in 0..dim {
            for n in m..dim {
                max_asymmetry = max_asymmetry.max((entries[m * dim + n] - entries[n * dim + m]).abs());
                upper.push(entries[m * dim + n]);
            }
        }
        if max_asymmetry > 0.0 {
            return Err(Error::NotSymmetric { max_asymmetry });
        }
        Ok(Self::from_upper(dim, upper, None))
    }

    /// Builds from a packed upper triangle (row-major, diagonal included).
    pub fn from_packed_upper(dim: usize, upper: Vec<f64>, tau: Option<usize>) -> Result<Self> {
        if upper.len() != dim * (dim + 1) / 2 {
            return Err(Error::domain(format!(
                "packed triangle of a {dim}x{dim} matrix needs {} entries, got {}",
                dim * (dim + 1) / 2,
                upper.len()
            )));
        }
        Ok(Self::from_upper(dim, upper, tau))
    }

    fn from_upper(dim: usize, upper: Vec<f64>, tau: Option<usize>) -> Self {
        Self {
            dim,
            upper,
            tau,
            degenerate_sites: Vec::new(),
            power: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> Option<usize> {
        self.tau
    }

    /// `min(D, τ)`, or `D` when the series length is unknown.
    pub fn rank_bound(&self) -> usize {
        self.tau.map_or(self.dim, |t| t.min(self.dim))
    }

    /// Rows whose series had zero variance.
    pub fn degenerate_sites(&self) -> &[usize] {
        &self.degenerate_sites
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn packed_upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        let (m, n) = if m <= n { (m, n) } else { (n, m) };
        self.upper[self.row_start(m) + n - m]
    }

    /// Full row-major matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        let mut k = 0;
        for m in 0..d {
            for n in m..d {
                out[m * d + n] = self.upper[k];
                out[n * d + m] = self.upper[k];
                k += 1;
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|m| self.get(m, m)).sum()
    }

    /// The principal submatrix on the given rows, in the given order.
    pub fn principal(&self, rows: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.dim) {
            return Err(Error::domain("principal submatrix row out of range"));
        }
        let k = rows.len();
        let mut upper = Vec::with_capacity(k * (k + 1) / 2);
        for (a, &m) in rows.iter().enumerate() {
            for &n in &rows[a..] {
                upper.push(self.get(m, n));
            }
        }
        let degenerate_sites = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| self.degenerate_sites.contains(r))
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            dim: k,
            upper,
            tau: self.tau,
            degenerate_sites,
            power: self.power,
        })
    }
}

/// Per-row summary for the ±1 fast path: bit-packed series (bit set for -1)
/// and the integer row sum.
struct PackedSpins {
    words: Vec<Vec<u64>>,
    sums: Vec<i64>,
}

fn pack_spins(spins: &[i8], rows: usize, tau: usize) -> PackedSpins {
    let nwords = tau.div_ceil(64);
    let mut words = Vec::with_capacity(rows);
    let mut sums = Vec::with_capacity(rows);
    for row in spins.chunks_exact(tau).take(rows) {
        let mut w = vec![0u64; nwords];
        let mut negatives = 0i64;
        for (t, &s) in row.iter().enumerate() {
            if s < 0 {
                w[t / 64] |= 1 << (t % 64);
                negatives += 1;
            }
        }
        words.push(w);
        sums.push(tau as i64 - 2 * negatives);
    }
    PackedSpins { words, sums }
}

/// Pearson correlation of the rows of `ts` (population convention).
///
/// Zero-variance rows get a unit diagonal and zero off-diagonals and are
/// listed in [`CorrelationMatrix::degenerate_sites`]. The value of each entry
/// depends only on its two rows, so any principal submatrix is reproduced
/// exactly by correlating the corresponding subset of rows.
pub fn build_correlation(ts: &TimeSeriesMatrix) -> Result<CorrelationMatrix> {
    let (d, tau) = (ts.rows(), ts.tau());
    if tau < 2 {
        return Err(Error::InsufficientData(format!(
            "correlations need at least 2 time steps, got {tau}"
        )));
    }
    let (rows, degenerate): (Vec<Vec<f64>>, Vec<bool>) = match ts.data() {
        SeriesData::Spins(spins) => spin_correlation_rows(spins, d, tau),
        SeriesData::Real(_) => real_correlation_rows(ts),
    };
    let upper = rows.into_iter().flatten().collect();
    let degenerate_sites = degenerate
        .iter()
        .enumerate()
        .filter_map(|(m, &deg)| deg.then_some(m))
        .collect();
    Ok(CorrelationMatrix {
        dim: d,
        upper,
        tau: Some(tau),
        degenerate_sites,
        power: 1.0,
    })
}

fn spin_correlation_rows(spins: &[i8], d: usize, tau: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
    let packed = pack_spins(spins, d, tau);
    let t = tau as i128;
    // τ² Var = τ² - (Σσ)²
    let scaled_var: Vec<i128> = packed
        .sums
        .iter()
        .map(|&s| t * t - i128::from(s) * i128::from(s))
        .collect();
    let degenerate: Vec<bool> = scaled_var.iter().map(|&v| v == 0).collect();
    let rows = (0..d)
        .into_par_iter()
        .map(|m| {
            let wm = &packed.words[m];
            (m..d)
                .map(|n| {
                    if m == n {
                        return 1.0;
                    }
                    if degenerate[m] || degenerate[n] {
                        return 0.0;
                    }
                    let differing: u32 = wm
                        .iter()
                        .zip(&packed.words[n])
                        .map(|(a, b)| (a ^ b).count_ones())
                        .sum();
                    let products = t - 2 * i128::from(differing);
                    let num = t * products - i128::from(packed.sums[m]) * i128::from(packed.sums[n]);
                    num as f64 / (scaled_var[m] as f64 * scaled_var[n] as f64).sqrt()
                })
                .collect()
        })
        .collect();
    (rows, degenerate)
}

/// Rows scaled to zero mean and unit Euclidean norm (so `C = Z Zᵀ`), plus a
/// flag per row for zero variance. Degenerate rows are left as zeros.
pub(crate) fn standardized_rows(ts: &TimeSeriesMatrix) -> (Vec<f64>, Vec<bool>) {
    let (d, tau) = (ts.rows(), ts.tau());
    let mut degenerate = vec![false; d];
    let mut standardized = vec![0.0; d * tau];
    for m in 0..d {
        let row = ts.row_f64(m);
        if row.iter().all(|&x| x == row[0]) {
            degenerate[m] = true;
            continue;
        }
        let mean = row.iter().sum::<f64>() / tau as f64;
        let var = row.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / tau as f64;
        let scale = 1.0 / (var * tau as f64).sqrt();
        for (z, &x) in standardized[m * tau..(m + 1) * tau].iter_mut().zip(&row) {
            *z = (x - mean) * scale;
        }
    }
    (standardized, degenerate)
}

fn real_correlation_rows(ts: &TimeSeriesMatrix) -> (Vec<Vec<f64>>, Vec<bool>) {
    let (d, tau) = (ts.rows(), ts.tau());
    let (standardized, degenerate) = standardized_rows(ts);
    let rows = (0..d)
        .into_par_iter()
        .map(|m| {
            let zm = &standardized[m * tau..(m + 1) * tau];
            (m..d)
                .map(|n| {
                    if m == n {
                        1.0
                    } else if degenerate[m] || degenerate[n] {
                        0.0
                    } else {
                        dot(zm, &standardized[n * tau..(n + 1) * tau])
                    }
                })
                .collect()
        })
        .collect();
    (rows, degenerate)
}

/// Dot product with a fixed four-lane summation order.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        for lane in 0..4 {
            acc[lane] += a[4 * i + lane] * b[4 * i + lane];
        }
    }
    let tail: f64 = a[4 * chunks..]
        .iter()
        .zip(&b[4 * chunks..])
        .map(|(x, y)| x * y)
        .sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubsampleSize {
    /// Fraction of the rows, rounded to the nearest count.
    Fraction(f64),
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampleSpec {
    pub size: SubsampleSize,
    pub seed: u64,
}

impl SubsampleSpec {
    pub fn resolve(&self, rows: usize) -> Result<usize> {
        let k = match self.size {
            SubsampleSize::Count(k) => k,
            SubsampleSize::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::domain(format!("subsample fraction {f} not in (0, 1]")));
                }
                ((f * rows as f64).round() as usize).max(1)
            }
        };
        if k == 0 || k > rows {
            return Err(Error::domain(format!(
                "cannot choose {k} of {rows} series"
            )));
        }
        Ok(k)
    }
}

/// Keeps `k` rows chosen uniformly without replacement; kept rows retain
/// their original relative order.
pub fn subsample_sites(ts: &TimeSeriesMatrix, spec: &SubsampleSpec) -> Result<TimeSeriesMatrix> {
    let k = spec.resolve(ts.rows())?;
    let mut rng = rng_from_seed(spec.seed);
    let mut chosen = index::sample(&mut rng, ts.rows(), k).into_vec();
    chosen.sort_unstable();
    ts.select_rows(&chosen)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerMapParams {
    pub q: f64,
}

impl PowerMapParams {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::domain(format!("power-map exponent must be positive, got {q}")));
        }
        Ok(Self { q })
    }
}

/// `sgn(x)|x|^q`, with `0 ↦ 0`.
#[inline]
pub fn signed_power(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(q)
    }
}

/// Entrywise `sgn(C_mn)|C_mn|^q`.
///
/// The diagonal stays 1 and zeros stay 0; the result need not be positive
/// semidefinite.
pub fn power_map(c: &CorrelationMatrix, params: PowerMapParams) -> Result<CorrelationMatrix> {
    let q = PowerMapParams::new(params.q)?.q;
    let upper = if q == 1.0 {
        c.upper.clone()
    } else {
        c.upper.iter().map(|&x| signed_power(x, q)).collect()
    };
    Ok(CorrelationMatrix {
        upper,
        power: c.power * q,
        ..c.clone()
    })
}
