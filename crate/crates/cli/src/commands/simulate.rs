use std::path::Path;
use std::time::Instant;

use critspectra::io::{encode_series, render_sidecar, series_csv};
use critspectra::ising::simulate;

use crate::config::load_simulation;
use crate::error::CliResult;
use crate::manifest::RunManifest;

pub const SERIES_NAME: &str = "series.csts";

pub fn run(config_path: &Path, out: &Path, export_csv: bool) -> CliResult<()> {
    let resolved = load_simulation(config_path)?;
    let config = resolved.sim_config();
    config.validate()?;
    let mut manifest = RunManifest::start("simulate", out, resolved.seed, &resolved)?;

    let started = Instant::now();
    let ts = simulate(&config)?;
    let seconds = started.elapsed().as_secs_f64();
    let steps = config.equilibration_steps + config.tau as u64;
    let rate = steps as f64 / seconds.max(1e-9);
    eprintln!(
        "simulated {steps} steps of {} flips on L={} in {seconds:.2}s ({rate:.1} steps/s)",
        config.flips_per_step, config.side
    );

    manifest.write_bytes(SERIES_NAME, &encode_series(&ts, resolved.seed)?)?;
    let sidecar = vec![
        ("config_digest".to_string(), manifest.digest.clone()),
        ("seed".to_string(), resolved.seed.to_string()),
        ("side".to_string(), config.side.to_string()),
        ("beta2j".to_string(), config.beta2j.to_string()),
        ("tau".to_string(), config.tau.to_string()),
    ];
    manifest.write_bytes("series.meta", render_sidecar(&sidecar).as_bytes())?;
    if export_csv {
        manifest.write_csv("series.csv", series_csv(&ts))?;
    }
    manifest.note("steps_per_second", format!("{rate:.3}"));
    manifest.finish()
}
