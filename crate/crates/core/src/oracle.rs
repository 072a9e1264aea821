//! Exact spectra of circulant correlation matrices with power-law decay on
//! the periodic lattice `ℤ^d_L`.
//!
//! A matrix with entries `f(n̄ - m̄)` is diagonalized by the discrete Fourier
//! transform, so its eigenvalues are `λ(k̄) = Σ_n̄ f(n̄) e^{i k̄·n̄}`. With
//! `f(r) ~ c r^-θ` the ranked eigenvalues follow `λ_j ~ j^-ζ`,
//! `ζ = (d - θ)/d`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fitting::{fit_power_law, FitWindow, PowerLawFit};
use crate::spectra::{zipf_series, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirculantSpec {
    /// Lattice dimension, 1 or 2.
    pub dim: usize,
    pub side: usize,
    pub theta: f64,
    pub prefactor: f64,
    /// Value at zero separation (the matrix diagonal).
    pub f0: f64,
}

impl CirculantSpec {
    /// Unit prefactor and unit diagonal.
    pub fn new(dim: usize, side: usize, theta: f64) -> Self {
        Self {
            dim,
            side,
            theta,
            prefactor: 1.0,
            f0: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) {
            return Err(Error::domain(format!("dimension must be 1 or 2, got {}", self.dim)));
        }
        if self.side < 4 {
            return Err(Error::domain(format!("side must be at least 4, got {}", self.side)));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::domain(format!("theta must be positive, got {}", self.theta)));
        }
        if !(self.prefactor.is_finite() && self.f0.is_finite()) {
            return Err(Error::domain("prefactor and f0 must be finite"));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    /// Minimal-image Euclidean length of the separation with flat index `n`.
    fn torus_distance(&self, n: usize) -> f64 {
        let l = self.side;
        let wrap = |k: usize| {
            let k = k % l;
            k.min(l - k) as f64
        };
        match self.dim {
            1 => wrap(n),
            _ => wrap(n / l).hypot(wrap(n % l)),
        }
    }

    /// `f` at the separation with flat index `n`.
    pub fn value(&self, n: usize) -> f64 {
        let r = self.torus_distance(n);
        if r == 0.0 {
            self.f0
        } else {
            self.prefactor * r.powf(-self.theta)
        }
    }

    /// The explicit `L^d × L^d` matrix, row-major.
    pub fn materialize(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = self.sites();
        let l = self.side;
        let diff = |a: usize, b: usize| -> usize {
            match self.dim {
                1 => (a + l - b) % l,
                _ => {
                    let (ai, aj, bi, bj) = (a / l, a % l, b / l, b % l);
                    ((ai + l - bi) % l) * l + (aj + l - bj) % l
                }
            }
        };
        Ok((0..n * n).map(|k| self.value(diff(k / n, k % n))).collect())
    }
}

/// Eigenvalues by `d`-dimensional DFT of `f`, sorted decreasing.
pub fn circulant_eigenvalues(spec: &CirculantSpec) -> Result<Spectrum> {
    spec.validate()?;
    let n = spec.sites();
    let mut re: Vec<f64> = (0..n).map(|k| spec.value(k)).collect();
    let mut im = vec![0.0; n];
    let l = spec.side;
    match spec.dim {
        1 => dft_in_place(&mut re, &mut im),
        _ => {
            for row in 0..l {
                dft_in_place(&mut re[row * l..(row + 1) * l], &mut im[row * l..(row + 1) * l]);
            }
            let (mut cr, mut ci) = (vec![0.0; l], vec![0.0; l]);
            for col in 0..l {
                for row in 0..l {
                    cr[row] = re[row * l + col];
                    ci[row] = im[row * l + col];
                }
                dft_in_place(&mut cr, &mut ci);
                for row in 0..l {
                    re[row * l + col] = cr[row];
                    im[row * l + col] = ci[row];
                }
            }
        }
    }
    let l1: f64 = (0..n).map(|k| spec.value(k).abs()).sum();
    let worst = im.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > 1e-10 * l1.max(1.0) {
        return Err(Error::Numerical(format!(
            "circulant spectrum has imaginary part {worst:e}"
        )));
    }
    Ok(Spectrum::new(re, None))
}

/// Forward DFT `X_k = Σ x_n e^{-2πikn/N}`: iterative radix-2 for powers of
/// two, direct summation otherwise.
pub fn dft_in_place(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    assert_eq!(n, im.len());
    if n <= 1 {
        return;
    }
    if !n.is_power_of_two() {
        let (xr, xi) = (re.to_vec(), im.to_vec());
        for k in 0..n {
            let (mut sr, mut si) = (0.0, 0.0);
            for j in 0..n {
                let angle = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
                let (s, c) = angle.sin_cos();
                sr += xr[j] * c - xi[j] * s;
                si += xr[j] * s + xi[j] * c;
            }
            re[k] = sr;
            im[k] = si;
        }
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for k in 0..half {
            let (s, c) = (-2.0 * PI * k as f64 / len as f64).sin_cos();
            for start in (0..n).step_by(len) {
                let (a, b) = (start + k, start + k + half);
                let tr = re[b] * c - im[b] * s;
                let ti = re[b] * s + im[b] * c;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
            }
        }
        len <<= 1;
    }
}

/// `ζ = (d - θ)/d` for `0 < θ < d`.
pub fn theoretical_zeta(dim: usize, theta: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let d = dim as f64;
    if !(theta > 0.0 && theta < d) {
        return Err(Error::domain(format!(
            "theta must lie in (0, {d}), got {theta}"
        )));
    }
    Ok((d - theta) / d)
}

/// Log-log fit of the circulant Zipf series, by default over
/// `[L^d/400, L^d/40]`.
pub fn fit_circulant(spec: &CirculantSpec, window: Option<FitWindow>) -> Result<PowerLawFit> {
    let spectrum = circulant_eigenvalues(spec)?;
    let window = window.unwrap_or_else(|| FitWindow::scaled(spec.sites()));
    fit_power_law(&zipf_series(&spectrum).points, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold((0.0, 0.0), |(r, i), (j, &v)| {
                    let a = -2.0 * PI * (k * j) as f64 / n as f64;
                    (r + v * a.cos(), i + v * a.sin())
                })
            })
            .unzip()
    }

    #[test]
    fn radix2_matches_direct_sum() {
        let x: Vec<f64> = (0..64).map(|k| ((k * 37 % 11) as f64 - 5.0) * 0.3).collect();
        let (er, ei) = naive_dft(&x);
        let (mut re, mut im) = (x.clone(), vec![0.0; 64]);
        dft_in_place(&mut re, &mut im);
        for k in 0..64 {
            assert!((re[k] - er[k]).abs() < 1e-10 && (im[k] - ei[k]).abs() < 1e-10);
        }
        let x: Vec<f64> = (0..12).map(|k| k as f64).collect();
        let (er, _) = naive_dft(&x);
        let (mut re, mut im) = (x.clone(), vec![0.0; 12]);
        dft_in_place(&mut re, &mut im);
        assert!((re[5] - er[5]).abs() < 1e-10);
    }

    #[test]
    fn delta_kernel_gives_identity_spectrum() {
        let spec = CirculantSpec {
            prefactor: 0.0,
            ..CirculantSpec::new(2, 8, 0.25)
        };
        let s = circulant_eigenvalues(&spec).unwrap();
        assert_eq!(s.len(), 64);
        assert!(s.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn trace_and_zero_mode() {
        for spec in [CirculantSpec::new(1, 256, 0.25), CirculantSpec::new(2, 32, 0.25)] {
            let s = circulant_eigenvalues(&spec).unwrap();
            let n = spec.sites() as f64;
            assert!((s.sum() - n * spec.f0).abs() < 1e-8 * n);
            let total: f64 = (0..spec.sites()).map(|k| spec.value(k)).sum();
            assert!((s.values()[0] - total).abs() < 1e-9 * total);
        }
    }

    #[test]
    fn minimal_image_distance() {
        let spec = CirculantSpec::new(2, 8, 1.0);
        assert_eq!(spec.torus_distance(0), 0.0);
        assert_eq!(spec.torus_distance(7), 1.0);
        assert_eq!(spec.torus_distance(7 * 8 + 7), 2f64.sqrt());
        assert_eq!(spec.torus_distance(4 * 8 + 4), 32f64.sqrt());
    }

    #[test]
    fn zeta_formula() {
        assert_eq!(theoretical_zeta(2, 0.25).unwrap(), 0.875);
        assert_eq!(theoretical_zeta(1, 0.5).unwrap(), 0.5);
        assert!((theoretical_zeta(2, 1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(theoretical_zeta(2, 2.0).is_err());
        assert!(theoretical_zeta(1, 0.0).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(CirculantSpec::new(3, 8, 0.25).validate().is_err());
        assert!(CirculantSpec::new(1, 3, 0.25).validate().is_err());
        assert!(CirculantSpec::new(1, 8, 0.0).validate().is_err());
    }
}
