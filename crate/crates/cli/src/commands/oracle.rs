use std::path::PathBuf;

use clap::Args;
use critspectra::fitting::{fit_power_law, FitWindow};
use critspectra::io::CsvTable;
use critspectra::oracle::{circulant_eigenvalues, theoretical_zeta, CirculantSpec};
use critspectra::spectra::zipf_series;
use log::warn;
use serde::Serialize;

use super::{parse_window, window_fits, zipf_table};
use crate::error::CliResult;
use crate::manifest::RunManifest;

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    /// Lattice dimension, 1 or 2.
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    side: usize,
    #[arg(long)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    prefactor: f64,
    #[arg(long, default_value_t = 1.0)]
    f0: f64,
    /// Fit window `nMin,nMax`; defaults to `[L^d/400, L^d/40]`.
    #[arg(long, value_parser = parse_window)]
    #[serde(skip)]
    window: Option<FitWindow>,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Serialize)]
struct Resolved<'a> {
    #[serde(flatten)]
    args: &'a OracleArgs,
    window: [usize; 2],
}

pub fn run(args: &OracleArgs) -> CliResult<()> {
    let spec = CirculantSpec {
        dim: args.dim,
        side: args.side,
        theta: args.theta,
        prefactor: args.prefactor,
        f0: args.f0,
    };
    spec.validate()?;
    let window = args.window.unwrap_or_else(|| FitWindow::scaled(spec.sites()));
    let resolved = Resolved {
        args,
        window: [window.n_min, window.n_max],
    };
    let mut manifest = RunManifest::start("oracle", &args.out, 0, &resolved)?;
    let spectrum = circulant_eigenvalues(&spec)?;
    let zipf = zipf_series(&spectrum);
    manifest.write_csv("zipf.csv", zipf_table(&zipf).meta("model", "CIRCULANT"))?;

    let theory = theoretical_zeta(args.dim, args.theta).ok();
    if window_fits(window, zipf.points.len()) {
        let fit = fit_power_law(&zipf.points, window)?;
        let mut t = CsvTable::new(&["zeta", "zeta_theory", "n_min", "n_max", "rmse", "point_count"]);
        t.push([
            fit.zeta.to_string(),
            theory.map_or("nan".into(), |z| z.to_string()),
            window.n_min.to_string(),
            window.n_max.to_string(),
            fit.rmse.to_string(),
            fit.point_count.to_string(),
        ]);
        manifest.write_csv("fit.csv", t)?;
        manifest.note("zeta", fit.zeta);
        match theory {
            Some(z) => println!("zeta={:.6} theory={z:.6} window={window}", fit.zeta),
            None => println!("zeta={:.6} window={window}", fit.zeta),
        }
    } else {
        warn!(
            "window {window} is too small for a reliable fit of {} eigenvalues; fit.csv skipped",
            spec.sites()
        );
    }
    manifest.finish()
}
