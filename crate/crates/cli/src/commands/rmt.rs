use std::path::PathBuf;

use clap::Args;
use critspectra::io::CsvTable;
use critspectra::rmt::{mp_density, rmt_emerging_baseline, MpParams};
use serde::Serialize;

use super::{binning, density_table};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Debug, Args, Serialize)]
pub struct RmtArgs {
    /// Matrix dimension `D`.
    #[arg(long)]
    dim: usize,
    /// Series length; must be below `D`.
    #[arg(long)]
    tau: usize,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 20)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

pub fn run(args: &RmtArgs) -> CliResult<()> {
    if args.tau >= args.dim {
        return Err(CliError::Precondition(format!(
            "power-mapped Wishart matrices have an emerging spectrum only when tau < D \
             (got tau = {}, D = {})",
            args.tau, args.dim
        )));
    }
    let mut manifest = RunManifest::start("rmt-baseline", &args.out, args.seed, args)?;
    let ensemble = rmt_emerging_baseline(
        args.dim,
        args.tau,
        args.q,
        args.replicas,
        args.seed,
        &binning(args.bins)?,
    )?;

    let t = density_table(&ensemble.density)
        .meta("model", "WISHART")
        .meta("q", args.q)
        .meta("replicas", args.replicas);
    manifest.write_csv("emerging_density.csv", t)?;

    let mut t = CsvTable::new(&["replica", "index", "eigenvalue"]).meta("model", "WISHART");
    for (r, split) in ensemble.splits.iter().enumerate() {
        for (i, v) in split.emerging.values().iter().enumerate() {
            t.push([r.to_string(), (i + 1).to_string(), v.to_string()]);
        }
    }
    manifest.write_csv("emerging.csv", t)?;

    let mp = MpParams::from_shape(args.dim, args.tau);
    let (lo, hi) = mp.edges();
    let mut t = CsvTable::new(&["lambda", "density"])
        .meta("model", "MP")
        .meta("kappa", mp.kappa)
        .meta("point_mass", mp.point_mass());
    for k in 0..=200 {
        let x = lo + (hi - lo) * f64::from(k) / 200.0;
        t.push([x, mp_density(x, &mp)]);
    }
    manifest.write_csv("mp_density.csv", t)?;

    let negative = ensemble.negative_count();
    manifest.note("emerging_negative", negative);
    manifest.note("emerging_mean", ensemble.emerging_mean());
    println!(
        "replicas={} emerging_mean={:e} negative={negative}",
        args.replicas,
        ensemble.emerging_mean()
    );
    manifest.finish()
}
