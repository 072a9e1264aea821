use std::path::{Path, PathBuf};
use std::time::Instant;

use critspectra::io::{write_atomic, CsvTable};

use crate::config::{canonical, digest};
use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.txt";
pub const RESOLVED_CONFIG_NAME: &str = "config.resolved.toml";

/// Output directory bookkeeping for one subcommand invocation.
pub struct RunManifest {
    pub subcommand: &'static str,
    pub seed: u64,
    pub digest: String,
    out_dir: PathBuf,
    artifacts: Vec<String>,
    extra: Vec<(String, String)>,
    started: Instant,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Precondition(format!("{}: {e}", path.display()))
}

impl RunManifest {
    /// Creates the output directory and records the resolved options.
    pub fn start<T: serde::Serialize>(
        subcommand: &'static str,
        out_dir: &Path,
        seed: u64,
        resolved: &T,
    ) -> CliResult<Self> {
        std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
        let text = canonical(resolved);
        let mut manifest = Self {
            subcommand,
            seed,
            digest: digest(&text),
            out_dir: out_dir.to_path_buf(),
            artifacts: Vec::new(),
            extra: Vec::new(),
            started: Instant::now(),
        };
        manifest.write_bytes(RESOLVED_CONFIG_NAME, text.as_bytes())?;
        Ok(manifest)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.path(name);
        write_atomic(&path, bytes).map_err(|e| io_err(&path, e))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    /// Writes a CSV artifact stamped with the digest and seed.
    pub fn write_csv(&mut self, name: &str, table: CsvTable) -> CliResult<()> {
        let mut stamped = CsvTable::new(&[])
            .meta("config_digest", &self.digest)
            .meta("seed", self.seed);
        stamped.meta.extend(table.meta);
        stamped.columns = table.columns;
        stamped.rows = table.rows;
        self.write_bytes(name, stamped.render().as_bytes())
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.extra.push((key.to_string(), value.to_string()));
    }

    pub fn finish(self) -> CliResult<()> {
        let mut lines = vec![
            format!("toolkit_version={}", env!("CARGO_PKG_VERSION")),
            format!("subcommand={}", self.subcommand),
            format!("seed={}", self.seed),
            format!("config_digest={}", self.digest),
            format!("wall_clock_seconds={:.3}", self.started.elapsed().as_secs_f64()),
        ];
        lines.extend(self.extra.iter().map(|(k, v)| format!("{k}={v}")));
        lines.extend(self.artifacts.iter().map(|a| format!("artifact={a}")));
        let text = lines.join("\n") + "\n";
        let path = self.path(MANIFEST_NAME);
        write_atomic(&path, text.as_bytes()).map_err(|e| io_err(&path, e))
    }
}
