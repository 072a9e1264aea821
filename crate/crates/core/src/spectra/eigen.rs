use faer::{Mat, Side};

use super::Spectrum;
use crate::corrmat::{build_correlation, standardized_rows, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::series::TimeSeriesMatrix;

/// Largest entrywise asymmetry accepted by [`eigenvalues_symmetric`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

fn check_square_symmetric(dim: usize, entries: &[f64]) -> Result<()> {
    if entries.len() != dim * dim {
        return Err(Error::domain(format!(
            "expected {} entries for a {dim}x{dim} matrix, got {}",
            dim * dim,
            entries.len()
        )));
    }
    let mut max_asymmetry = 0.0f64;
    for m in 0..dim {
        for n in m + 1..dim {
            max_asymmetry = max_asymmetry.max((entries[m * dim + n] - entries[n * dim + m]).abs());
        }
    }
    if max_asymmetry > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { max_asymmetry });
    }
    Ok(())
}

fn dense_eigenvalues(dim: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Vec<f64>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    let m = Mat::<f64>::from_fn(dim, dim, entry);
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver did not converge: {e:?}")))
}

/// All eigenvalues of a dense row-major symmetric matrix.
pub fn eigenvalues_symmetric(dim: usize, entries: &[f64]) -> Result<Spectrum> {
    check_square_symmetric(dim, entries)?;
    let values = dense_eigenvalues(dim, |i, j| entries[i * dim + j])?;
    Ok(Spectrum::new(values, None))
}

/// Eigenvalues (decreasing) with their unit eigenvectors.
pub fn eigenpairs_symmetric(dim: usize, entries: &[f64]) -> Result<(Spectrum, Vec<Vec<f64>>)> {
    check_square_symmetric(dim, entries)?;
    let m = Mat::<f64>::from_fn(dim, dim, |i, j| entries[i * dim + j]);
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver did not converge: {e:?}")))?;
    let (s, u) = (evd.S(), evd.U());
    // faer returns non-decreasing order
    let values: Vec<f64> = (0..dim).rev().map(|k| s[k]).collect();
    let vectors = (0..dim)
        .rev()
        .map(|k| (0..dim).map(|i| u[(i, k)]).collect())
        .collect();
    Ok((Spectrum::new(values, None), vectors))
}

/// Dense spectrum of a correlation matrix (symmetric by construction).
pub fn correlation_spectrum(c: &CorrelationMatrix) -> Result<Spectrum> {
    let values = dense_eigenvalues(c.dim(), |i, j| c.get(i, j))?;
    Ok(Spectrum::new(values, c.tau()))
}

/// Spectrum of the correlation matrix of `ts` through the `τ × τ` temporal
/// Gram matrix `ZᵀZ` of the standardized series.
///
/// `ZZᵀ` and `ZᵀZ` share their nonzero eigenvalues; zero-variance rows are
/// decoupled unit-diagonal rows and each contributes an eigenvalue 1.
pub fn gram_spectrum(ts: &TimeSeriesMatrix) -> Result<Spectrum> {
    let (d, tau) = (ts.rows(), ts.tau());
    if tau < 2 {
        return Err(Error::InsufficientData(format!(
            "correlations need at least 2 time steps, got {tau}"
        )));
    }
    let (z, degenerate) = standardized_rows(ts);
    let live: Vec<usize> = (0..d).filter(|&m| !degenerate[m]).collect();
    let zmat = Mat::<f64>::from_fn(live.len(), tau, |i, t| z[live[i] * tau + t]);
    let gram = zmat.transpose() * &zmat;
    let mut temporal = gram
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver did not converge: {e:?}")))?;
    temporal.sort_by(|a, b| b.total_cmp(a));
    temporal.truncate(live.len().min(tau));
    let mut values = temporal;
    values.resize(live.len(), 0.0);
    values.extend(std::iter::repeat_n(1.0, d - live.len()));
    Ok(Spectrum::new(values, Some(tau)))
}

/// Spectrum of the correlation matrix of `ts`, through the Gram identity when
/// `τ < D/2` and by dense decomposition otherwise.
pub fn series_spectrum(ts: &TimeSeriesMatrix) -> Result<Spectrum> {
    if 2 * ts.tau() < ts.rows() {
        gram_spectrum(ts)
    } else {
        correlation_spectrum(&build_correlation(ts)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_rank_one() {
        let mut eye = vec![0.0; 25];
        (0..5).for_each(|i| eye[i * 5 + i] = 1.0);
        let s = eigenvalues_symmetric(5, &eye).unwrap();
        assert!(s.values().iter().all(|&v| (v - 1.0).abs() < 1e-14));

        let s = eigenvalues_symmetric(2, &[1.0; 4]).unwrap();
        assert!((s.values()[0] - 2.0).abs() < 1e-14);
        assert!(s.values()[1].abs() < 1e-14);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let err = eigenvalues_symmetric(2, &[1.0, 0.2, 0.3, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
        assert!(eigenvalues_symmetric(2, &[1.0, 0.2, 0.2]).is_err());
    }

    #[test]
    fn eigenpair_residuals_are_small() {
        let dim = 40;
        let entries: Vec<f64> = (0..dim * dim)
            .map(|k| {
                let (i, j) = (k / dim, k % dim);
                1.0 / (1.0 + (i as f64 - j as f64).abs()) + if i == j { 0.5 } else { 0.0 }
            })
            .collect();
        let norm = entries.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (s, vecs) = eigenpairs_symmetric(dim, &entries).unwrap();
        for (k, v) in vecs.iter().enumerate().step_by(7) {
            let lambda = s.values()[k];
            let residual: f64 = (0..dim)
                .map(|i| {
                    let mv: f64 = (0..dim).map(|j| entries[i * dim + j] * v[j]).sum();
                    (mv - lambda * v[i]).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(residual <= 1e-8 * norm, "pair {k}: residual {residual}");
        }
    }

    #[test]
    fn gram_path_handles_frozen_rows() {
        let rows = 6;
        let tau = 4;
        let mut spins = vec![1i8; rows * tau];
        // rows 0..4 fluctuate, rows 4 and 5 are frozen
        for (k, s) in spins.iter_mut().take(4 * tau).enumerate() {
            *s = if (k * 7 + k / tau) % 3 == 0 { -1 } else { 1 };
        }
        let ts = TimeSeriesMatrix::from_spins(rows, tau, spins, (0..rows).collect(), None).unwrap();
        let dense = correlation_spectrum(&build_correlation(&ts).unwrap()).unwrap();
        let gram = gram_spectrum(&ts).unwrap();
        for (a, b) in dense.values().iter().zip(gram.values()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
