pub mod oracle;
pub mod rmt;
pub mod simulate;
pub mod spectrum;
pub mod study;

use critspectra::fitting::FitWindow;
use critspectra::io::CsvTable;
use critspectra::spectra::{Binning, DensityEstimate, ZipfSeries};

use crate::error::{CliError, CliResult};

/// Parses `a,b` as an inclusive rank window.
pub fn parse_window(s: &str) -> Result<FitWindow, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected nMin,nMax, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    FitWindow::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

pub fn binning(bins: Option<usize>) -> CliResult<Binning> {
    match bins {
        None => Ok(Binning::SqrtRule),
        Some(0) => Err(CliError::Config("--bins must be positive".into())),
        Some(k) => Ok(Binning::Count(k)),
    }
}

pub fn zipf_table(z: &ZipfSeries) -> CsvTable {
    let mut t = CsvTable::new(&["n", "lambda"]);
    for &(n, v) in &z.points {
        t.push([n.to_string(), v.to_string()]);
    }
    t
}

pub fn density_table(d: &DensityEstimate) -> CsvTable {
    let mut t = CsvTable::new(&["bin_center", "density"]);
    for (c, p) in d.centers().into_iter().zip(&d.densities) {
        t.push([c, *p]);
    }
    t
}

/// Whether the window can hold enough ranks for a fit at all.
pub fn window_fits(window: FitWindow, len: usize) -> bool {
    window.n_max.min(len) + 1 >= window.n_min + critspectra::fitting::MIN_FIT_POINTS
}
