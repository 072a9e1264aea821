use std::path::PathBuf;

use clap::{Args, ValueEnum};
use critspectra::corrmat::{
    build_correlation, subsample_sites, PowerMapParams, SubsampleSize, SubsampleSpec,
};
use critspectra::fitting::{fit_power_law, FitWindow};
use critspectra::io::{decode_series, encode_matrix, CsvTable};
use critspectra::rmt::{mp_density, MpParams};
use critspectra::rng::derive_seed;
use critspectra::spectra::{
    correlation_spectrum, number_variance, power_mapped_split, series_spectrum,
    spacing_distribution, unfold, zipf_series, Unfolding, DEFAULT_POLYNOMIAL_ORDER,
};
use log::warn;
use serde::Serialize;

use super::{binning, density_table, parse_window, window_fits, zipf_table};
use crate::config::digest;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Zipf,
    Density,
    Spacing,
    Sigma2,
    Emerging,
    Fit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnfoldMethod {
    Mp,
    Poly,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Binary series dump written by `simulate`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Keep a random subset of sites: a fraction in (0, 1) or a count.
    #[arg(long)]
    subsample: Option<String>,
    /// Seed for every random choice; defaults to the seed in the dump.
    #[arg(long)]
    seed: Option<u64>,
    /// Entrywise power-map exponent; enables the emerging spectrum.
    #[arg(long)]
    power_map: Option<f64>,
    /// Keep the first τ' time steps: an integer or `N/k`.
    #[arg(long)]
    tau_window: Option<String>,
    /// Add the Marchenko–Pastur density at matched shape to density.csv.
    #[arg(long)]
    mp_overlay: bool,
    #[arg(long, value_enum, value_delimiter = ',')]
    observables: Option<Vec<Observable>>,
    #[arg(long, value_enum, default_value_t = UnfoldMethod::Poly)]
    unfold: UnfoldMethod,
    #[arg(long, default_value_t = DEFAULT_POLYNOMIAL_ORDER)]
    poly_order: usize,
    /// Fit window `nMin,nMax`; defaults to `[N/400, N/40]`.
    #[arg(long, value_parser = parse_window)]
    window: Option<FitWindow>,
    #[arg(long)]
    bins: Option<usize>,
    /// Also write the correlation matrix as `correlation.cscm`.
    #[arg(long)]
    save_matrix: bool,
}

#[derive(Serialize)]
struct Resolved {
    input_sha256: String,
    seed: u64,
    subsample: Option<String>,
    power_map: Option<f64>,
    tau_window: Option<usize>,
    mp_overlay: bool,
    observables: Vec<Observable>,
    unfold: UnfoldMethod,
    poly_order: usize,
    window: [usize; 2],
    bins: Option<usize>,
    save_matrix: bool,
}

fn parse_subsample(s: &str) -> CliResult<SubsampleSize> {
    if s.contains('.') {
        let f: f64 = s
            .parse()
            .map_err(|_| CliError::Config(format!("bad --subsample {s:?}")))?;
        Ok(SubsampleSize::Fraction(f))
    } else {
        let k: usize = s
            .parse()
            .map_err(|_| CliError::Config(format!("bad --subsample {s:?}")))?;
        Ok(SubsampleSize::Count(k))
    }
}

/// `N/k` relative to the row count, or an absolute length.
fn parse_tau_window(s: &str, rows: usize) -> CliResult<usize> {
    let bad = || CliError::Config(format!("bad --tau-window {s:?}; use an integer or N/k"));
    match s.strip_prefix("N/") {
        Some(k) => {
            let k: usize = k.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            Ok(rows / k)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

pub fn run(args: &SpectrumArgs) -> CliResult<()> {
    let bytes = std::fs::read(&args.input)
        .map_err(|e| CliError::Precondition(format!("{}: {e}", args.input.display())))?;
    let (mut ts, header) = decode_series(&bytes)?;
    let seed = args.seed.unwrap_or(header.seed);

    if let Some(s) = &args.subsample {
        let spec = SubsampleSpec {
            size: parse_subsample(s)?,
            seed: derive_seed(seed, "subsample"),
        };
        ts = subsample_sites(&ts, &spec)?;
    }
    let tau_window = args
        .tau_window
        .as_deref()
        .map(|s| parse_tau_window(s, ts.rows()))
        .transpose()?;
    if let Some(len) = tau_window {
        ts = ts.truncate_time(len)?;
    }
    let (d, tau) = (ts.rows(), ts.tau());

    let mut observables = args.observables.clone().unwrap_or_else(|| {
        let mut v = vec![
            Observable::Zipf,
            Observable::Density,
            Observable::Spacing,
            Observable::Sigma2,
            Observable::Fit,
        ];
        if args.power_map.is_some() {
            v.push(Observable::Emerging);
        }
        v
    });
    observables.dedup();
    let wants = |o: Observable| observables.contains(&o);
    if wants(Observable::Emerging) {
        let Some(q) = args.power_map else {
            return Err(CliError::Precondition(
                "the emerging spectrum needs --power-map q".into(),
            ));
        };
        if tau >= d {
            return Err(CliError::Precondition(format!(
                "the emerging spectrum exists only for singular matrices: need tau < D, \
                 got tau = {tau}, D = {d}; shorten the series with --tau-window (q = {q})"
            )));
        }
    }
    let window = args.window.unwrap_or_else(|| FitWindow::scaled(d));
    let resolved = Resolved {
        input_sha256: digest(&bytes),
        seed,
        subsample: args.subsample.clone(),
        power_map: args.power_map,
        tau_window,
        mp_overlay: args.mp_overlay,
        observables: observables.clone(),
        unfold: args.unfold,
        poly_order: args.poly_order,
        window: [window.n_min, window.n_max],
        bins: args.bins,
        save_matrix: args.save_matrix,
    };
    let mut manifest = RunManifest::start("spectrum", &args.out, seed, &resolved)?;
    manifest.note("rows", d);
    manifest.note("tau", tau);
    manifest.note("sites", join(ts.site_indices()));

    let needs_matrix = args.save_matrix || wants(Observable::Emerging);
    let matrix = needs_matrix.then(|| build_correlation(&ts)).transpose()?;
    let spectrum = match &matrix {
        Some(c) => correlation_spectrum(c)?,
        None => series_spectrum(&ts)?,
    };
    let mp = MpParams::from_shape(d, tau);
    let bins = binning(args.bins)?;

    if let Some(c) = &matrix {
        if args.save_matrix {
            manifest.write_bytes("correlation.cscm", &encode_matrix(c)?)?;
        }
    }
    let zipf = zipf_series(&spectrum);
    if wants(Observable::Zipf) {
        let mut t = CsvTable::new(&["index", "eigenvalue"]);
        for (i, v) in spectrum.values().iter().enumerate() {
            t.push([(i + 1).to_string(), v.to_string()]);
        }
        manifest.write_csv("spectrum.csv", t)?;
        manifest.write_csv("zipf.csv", zipf_table(&zipf))?;
    }
    if wants(Observable::Density) {
        let density = critspectra::spectra::density_histogram(spectrum.values(), &bins)?;
        let mut t = density_table(&density);
        if args.mp_overlay {
            t.columns.push("mp_density".into());
            for (row, c) in t.rows.iter_mut().zip(density.centers()) {
                row.push(mp_density(c, &mp).to_string());
            }
            t = t.meta("model", "MP").meta("kappa", mp.kappa);
        }
        manifest.write_csv("density.csv", t)?;
    }
    if wants(Observable::Spacing) || wants(Observable::Sigma2) {
        let method = match args.unfold {
            UnfoldMethod::Mp => Unfolding::MpAnalytic(mp),
            UnfoldMethod::Poly => Unfolding::Polynomial {
                order: args.poly_order,
            },
        };
        let unfolded = unfold(spectrum.values(), &method)?;
        if wants(Observable::Spacing) {
            let p = spacing_distribution(&unfolded, &bins)?;
            let mut t = density_table(&p.density);
            t.columns = vec!["S".into(), "P".into()];
            manifest.write_csv("spacing.csv", t.meta("mean_spacing", p.mean))?;
        }
        if wants(Observable::Sigma2) {
            let range = unfolded.last().unwrap_or(&0.0) - unfolded.first().unwrap_or(&0.0);
            let rs: Vec<f64> = (1..=20)
                .map(|k| 0.5 * f64::from(k))
                .filter(|&r| r <= range / 10.0)
                .collect();
            if rs.is_empty() {
                warn!("unfolded range {range:.2} too short for a number variance; sigma2.csv skipped");
            } else {
                let mut t = CsvTable::new(&["r", "sigma2"]);
                for (r, s2) in number_variance(&[unfolded.clone()], &rs)? {
                    t.push([r, s2]);
                }
                manifest.write_csv("sigma2.csv", t)?;
            }
        }
    }
    if wants(Observable::Fit) {
        if window_fits(window, zipf.points.len()) {
            let fit = fit_power_law(&zipf.points, window)?;
            let mut t = CsvTable::new(&[
                "zeta",
                "log_prefactor",
                "n_min",
                "n_max",
                "rmse",
                "point_count",
                "excluded_nonpositive",
            ]);
            t.push([
                fit.zeta.to_string(),
                fit.log_prefactor.to_string(),
                window.n_min.to_string(),
                window.n_max.to_string(),
                fit.rmse.to_string(),
                fit.point_count.to_string(),
                fit.excluded_nonpositive.to_string(),
            ]);
            manifest.write_csv("fit.csv", t)?;
            println!("zeta={:.6} rmse={:.6} window={window}", fit.zeta, fit.rmse);
        } else {
            warn!("window {window} is too small for a reliable fit at D = {d}; fit.csv skipped");
        }
    }
    if let (true, Some(c), Some(q)) = (wants(Observable::Emerging), &matrix, args.power_map) {
        let split = power_mapped_split(c, PowerMapParams::new(q)?)?;
        if !split.is_reliable() {
            warn!("bulk and emerging eigenvalues overlap (gap {:e})", split.gap);
        }
        let mut t = CsvTable::new(&["index", "eigenvalue"])
            .meta("q", q)
            .meta("gap", split.gap);
        for (i, v) in split.emerging.values().iter().enumerate() {
            t.push([(i + 1).to_string(), v.to_string()]);
        }
        manifest.write_csv("emerging.csv", t)?;
        manifest.note("emerging_negative", split.emerging.count_negative());
    }
    manifest.finish()
}

fn join(sites: &[usize]) -> String {
    sites.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}
