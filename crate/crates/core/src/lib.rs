//! Spectral diagnostics of criticality in empirical correlation matrices.
//!
//! The pipeline simulates the 2-D Ising model under Metropolis dynamics,
//! records per-site spin time series and builds Pearson correlation matrices.
//! At the critical point their ranked eigenvalues follow a power law; at high
//! temperature they follow Marchenko–Pastur. Singular matrices lifted by the
//! entrywise power map expose an emerging spectrum near zero.
//!
//! Module map:
//!
//! * [`ising`] – lattice, Metropolis kernel, time-series recording.
//! * [`series`] – the recorded `N × τ` series matrix.
//! * [`corrmat`] – correlation estimator, random site subsampling, power map.
//! * [`spectra`] – eigenvalues and every spectral observable.
//! * [`rmt`] – Marchenko–Pastur law, Wishart/GOE sampling, null baselines.
//! * [`oracle`] – exact circulant spectra via FFT.
//! * [`fitting`] – log-log Zipf fits and the exponent-vs-size study.
//! * [`io`] – binary dumps, CSV artifacts and metadata sidecars.

pub mod corrmat;
pub mod error;
pub mod fitting;
pub mod io;
pub mod ising;
pub mod oracle;
pub mod quad;
pub mod rmt;
pub mod rng;
pub mod series;
pub mod spectra;

pub use error::{Error, Result};
