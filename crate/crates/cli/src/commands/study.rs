use std::path::Path;

use critspectra::fitting::exponent_vs_size;
use critspectra::io::CsvTable;
use critspectra::spectra::zipf_series;

use super::zipf_table;
use crate::config::load_study;
use crate::error::CliResult;
use crate::manifest::RunManifest;

pub fn run(config_path: &Path, out: &Path) -> CliResult<()> {
    let resolved = load_study(config_path)?;
    let template = resolved.template()?;
    let mut manifest = RunManifest::start("study", out, resolved.seed, &resolved)?;
    let summaries = exponent_vs_size(&resolved.sizes, resolved.runs_per_size, &template)?;

    let mut table = CsvTable::new(&["L", "zeta", "stderr", "window", "rmse"]);
    for s in &summaries {
        table.push([
            s.side.to_string(),
            s.zeta.to_string(),
            s.stderr.to_string(),
            format!("{}:{}", s.window.n_min, s.window.n_max),
            s.rmse.to_string(),
        ]);
        println!("L={} zeta={:.4} stderr={:.4} rmse={:.4}", s.side, s.zeta, s.stderr, s.rmse);
        for (r, run) in s.runs.iter().enumerate() {
            let t = zipf_table(&zipf_series(&run.spectrum)).meta("run_seed", run.seed);
            manifest.write_csv(&format!("zipf_L{}_run{r}.csv", s.side), t)?;
        }
    }
    manifest.write_csv("study.csv", table)?;
    manifest.finish()
}
