//! Power-law fits of Zipf series and the exponent-vs-lattice-size study.

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ising::{simulate, SimConfig};
use crate::rng::derive_indexed;
use crate::spectra::{series_spectrum, zipf_series, Spectrum};

/// Smallest number of usable points a fit accepts.
pub const MIN_FIT_POINTS: usize = 5;

/// Inclusive 1-based rank window `[n_min, n_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitWindow {
    pub n_min: usize,
    pub n_max: usize,
}

impl FitWindow {
    pub fn new(n_min: usize, n_max: usize) -> Result<Self> {
        if n_min < 1 || n_max < n_min {
            return Err(Error::domain(format!("invalid fit window [{n_min}, {n_max}]")));
        }
        Ok(Self { n_min, n_max })
    }

    /// `[N/400, N/40]`, rounded, at least 1.
    pub fn scaled(n: usize) -> Self {
        let at = |div: f64| ((n as f64 / div).round() as usize).max(1);
        Self {
            n_min: at(400.0),
            n_max: at(40.0),
        }
    }
}

impl std::fmt::Display for FitWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.n_min, self.n_max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    /// Minus the log-log slope.
    pub zeta: f64,
    pub log_prefactor: f64,
    pub window: FitWindow,
    /// Root-mean-square residual of `ln λ`.
    pub rmse: f64,
    pub point_count: usize,
    /// Points inside the window dropped because `λ ≤ 0`.
    pub excluded_nonpositive: usize,
}

impl PowerLawFit {
    pub fn predict(&self, n: f64) -> f64 {
        (self.log_prefactor - self.zeta * n.ln()).exp()
    }
}

/// Ordinary least squares of `ln λ_n` on `ln n` over the window.
pub fn fit_power_law(zipf: &[(usize, f64)], window: FitWindow) -> Result<PowerLawFit> {
    let mut excluded = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(n, v) in zipf {
        if n < window.n_min || n > window.n_max {
            continue;
        }
        if v > 0.0 && v.is_finite() {
            xs.push((n as f64).ln());
            ys.push(v.ln());
        } else {
            excluded += 1;
        }
    }
    if excluded > 0 {
        warn!("{excluded} non-positive eigenvalues excluded from the fit window {window}");
    }
    let k = xs.len();
    if k < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "window {window} holds {k} usable points, need {MIN_FIT_POINTS}"
        )));
    }
    let mx = xs.iter().sum::<f64>() / k as f64;
    let my = ys.iter().sum::<f64>() / k as f64;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::Fit("fit points share a single rank".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        zeta: -slope,
        log_prefactor: intercept,
        window,
        rmse: (sse / k as f64).sqrt(),
        point_count: k,
        excluded_nonpositive: excluded,
    })
}

/// Simulate, correlate, diagonalize and fit one configuration.
pub fn pipeline_fit(config: &SimConfig, window: FitWindow) -> Result<(Spectrum, PowerLawFit)> {
    let ts = simulate(config)?;
    let spectrum = series_spectrum(&ts)?;
    let fit = fit_power_law(&zipf_series(&spectrum).points, window)?;
    Ok((spectrum, fit))
}

/// Settings shared by every run of a study; `side` and `seed` vary.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyTemplate {
    pub beta2j: f64,
    /// `τ = tau_per_site · N`.
    pub tau_per_site: f64,
    pub equilibration_steps: u64,
    pub seed: u64,
    /// Fixed window for every size; `None` scales as `[N/400, N/40]`.
    pub window: Option<FitWindow>,
}

impl StudyTemplate {
    pub fn config(&self, side: usize, run: usize) -> SimConfig {
        let n = side * side;
        let tau = (self.tau_per_site * n as f64).round().max(1.0) as usize;
        SimConfig::new(side, self.beta2j, tau, self.run_seed(side, run))
            .with_equilibration(self.equilibration_steps)
    }

    pub fn run_seed(&self, side: usize, run: usize) -> u64 {
        derive_indexed(self.seed, &format!("study/L{side}"), run as u64)
    }

    pub fn window_for(&self, side: usize) -> FitWindow {
        self.window.unwrap_or_else(|| FitWindow::scaled(side * side))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRun {
    pub side: usize,
    pub seed: u64,
    pub spectrum: Spectrum,
    pub fit: PowerLawFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub side: usize,
    pub zeta: f64,
    /// Standard error of the mean over runs; zero for a single run.
    pub stderr: f64,
    pub rmse: f64,
    pub window: FitWindow,
    pub runs: Vec<StudyRun>,
}

/// Runs every `(L, seed)` pair in parallel and aggregates per size in input
/// order.
pub fn exponent_vs_size(
    sizes: &[usize],
    runs_per_size: usize,
    template: &StudyTemplate,
) -> Result<Vec<SizeSummary>> {
    if sizes.is_empty() {
        return Err(Error::domain("study needs at least one lattice size"));
    }
    if runs_per_size < 1 {
        return Err(Error::domain("study needs at least one run per size"));
    }
    let jobs: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&l| (0..runs_per_size).map(move |r| (l, r)))
        .collect();
    let runs: Vec<StudyRun> = jobs
        .par_iter()
        .map(|&(side, r)| {
            let config = template.config(side, r);
            let annotate = |e| Error::Run {
                side,
                seed: config.seed,
                source: Box::new(e),
            };
            let (spectrum, fit) =
                pipeline_fit(&config, template.window_for(side)).map_err(annotate)?;
            Ok(StudyRun {
                side,
                seed: config.seed,
                spectrum,
                fit,
            })
        })
        .collect::<Result<_>>()?;
    Ok(runs
        .chunks(runs_per_size)
        .map(|chunk| {
            let side = chunk[0].side;
            let k = chunk.len() as f64;
            let zeta = chunk.iter().map(|r| r.fit.zeta).sum::<f64>() / k;
            let rmse = chunk.iter().map(|r| r.fit.rmse).sum::<f64>() / k;
            let stderr = if chunk.len() > 1 {
                let var = chunk
                    .iter()
                    .map(|r| (r.fit.zeta - zeta).powi(2))
                    .sum::<f64>()
                    / (k - 1.0);
                (var / k).sqrt()
            } else {
                0.0
            };
            SizeSummary {
                side,
                zeta,
                stderr,
                rmse,
                window: template.window_for(side),
                runs: chunk.to_vec(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exact(a: f64, zeta: f64, n: usize) -> Vec<(usize, f64)> {
        (1..=n).map(|k| (k, a * (k as f64).powf(-zeta))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let fit = fit_power_law(&exact(1.0, 0.875, 200), FitWindow::new(3, 100).unwrap()).unwrap();
        assert!((fit.zeta - 0.875).abs() < 1e-12);
        assert!(fit.rmse < 1e-12);
        assert_eq!(fit.point_count, 98);

        let fit = fit_power_law(&exact(3.0, 0.5, 50), FitWindow::new(1, 50).unwrap()).unwrap();
        assert!((fit.zeta - 0.5).abs() < 1e-12);
        assert!((fit.log_prefactor - 3f64.ln()).abs() < 1e-12);
        assert!((fit.predict(4.0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn scaled_windows() {
        assert_eq!(FitWindow::scaled(1024), FitWindow { n_min: 3, n_max: 26 });
        assert_eq!(FitWindow::scaled(36864), FitWindow { n_min: 92, n_max: 922 });
        assert_eq!(FitWindow::scaled(64), FitWindow { n_min: 1, n_max: 2 });
        assert!(FitWindow::new(0, 4).is_err());
        assert!(FitWindow::new(5, 4).is_err());
    }

    #[test]
    fn nonpositive_points_are_counted() {
        let mut pts = exact(1.0, 0.7, 20);
        pts[4].1 = -0.1;
        pts[6].1 = 0.0;
        let fit = fit_power_law(&pts, FitWindow::new(1, 20).unwrap()).unwrap();
        assert_eq!(fit.excluded_nonpositive, 2);
        assert_eq!(fit.point_count, 18);
        assert!((fit.zeta - 0.7).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let pts = exact(1.0, 0.7, 20);
        assert!(matches!(
            fit_power_law(&pts, FitWindow::new(17, 30).unwrap()),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn study_rejects_empty_inputs() {
        let t = StudyTemplate {
            beta2j: 0.001,
            tau_per_site: 1.0,
            equilibration_steps: 1,
            seed: 1,
            window: None,
        };
        assert!(exponent_vs_size(&[], 1, &t).is_err());
        assert!(exponent_vs_size(&[4], 0, &t).is_err());
    }

    #[test]
    fn study_errors_name_the_run() {
        let t = StudyTemplate {
            beta2j: 0.001,
            tau_per_site: 2.0,
            equilibration_steps: 1,
            seed: 1,
            window: Some(FitWindow::new(1, 3).unwrap()),
        };
        let err = exponent_vs_size(&[4], 1, &t).unwrap_err();
        match err {
            Error::Run { side, seed, .. } => {
                assert_eq!(side, 4);
                assert_eq!(seed, t.run_seed(4, 0));
            }
            other => panic!("unexpected {other}"),
        }
    }

    proptest! {
        #[test]
        fn zeta_ignores_global_scale(a in 1e-6f64..1e6, zeta in 0.1f64..2.0, scale in 1e-3f64..1e3) {
            let w = FitWindow::new(2, 60).unwrap();
            let base = fit_power_law(&exact(a, zeta, 80), w).unwrap();
            let scaled: Vec<_> = exact(a, zeta, 80).into_iter().map(|(n, v)| (n, v * scale)).collect();
            let fit = fit_power_law(&scaled, w).unwrap();
            prop_assert!((fit.zeta - base.zeta).abs() < 1e-9);
            prop_assert!((fit.log_prefactor - base.log_prefactor - scale.ln()).abs() < 1e-9);
        }

        #[test]
        fn zeta_ignores_point_thinning(zeta in 0.1f64..2.0, stride in 1usize..6) {
            let pts: Vec<_> = exact(2.0, zeta, 120).into_iter().step_by(stride).collect();
            let fit = fit_power_law(&pts, FitWindow::new(1, 120).unwrap()).unwrap();
            prop_assert!((fit.zeta - zeta).abs() < 1e-10);
        }
    }
}
