//! Binary dumps, CSV artifacts and `key=value` sidecar files.
//!
//! Binary layouts (little-endian):
//!
//! * series: `"CSTS"`, version `u32`, `L u32`, `N u32`, `τ u64`, seed `u64`,
//!   then `N·τ` spins as `i8`, row `s` holding the history of site `s`.
//! * matrix: `"CSCM"`, `D u32`, `τ u64` (0 when unknown), then the upper
//!   triangle as `f64`, row-major with the diagonal.
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::corrmat::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::series::{SeriesData, TimeSeriesMatrix};

pub const SERIES_MAGIC: &[u8; 4] = b"CSTS";
pub const SERIES_VERSION: u32 = 1;
pub const MATRIX_MAGIC: &[u8; 4] = b"CSCM";
const SERIES_HEADER_LEN: usize = 32;
const MATRIX_HEADER_LEN: usize = 16;

/// Replaces `path` with `bytes` so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesHeader {
    pub version: u32,
    pub side: u32,
    pub rows: u32,
    pub tau: u64,
    pub seed: u64,
}

/// Encodes a spin series; real-valued series have no binary form.
///
/// Rows are stored in order without their site labels, so a reader sees
/// sites `0..N`.
pub fn encode_series(ts: &TimeSeriesMatrix, seed: u64) -> Result<Vec<u8>> {
    let SeriesData::Spins(spins) = ts.data() else {
        return Err(Error::Format("only spin series have a binary dump".into()));
    };
    let side = ts.lattice_side().unwrap_or(0);
    let side = u32::try_from(side).map_err(|_| Error::Format("lattice side exceeds u32".into()))?;
    let rows = u32::try_from(ts.rows()).map_err(|_| Error::Format("row count exceeds u32".into()))?;
    let mut out = Vec::with_capacity(SERIES_HEADER_LEN + spins.len());
    out.extend_from_slice(SERIES_MAGIC);
    out.extend_from_slice(&SERIES_VERSION.to_le_bytes());
    out.extend_from_slice(&side.to_le_bytes());
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&(ts.tau() as u64).to_le_bytes());
    out.extend_from_slice(&seed.to_le_bytes());
    out.extend(spins.iter().map(|&s| s as u8));
    Ok(out)
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode_series(bytes: &[u8]) -> Result<(TimeSeriesMatrix, SeriesHeader)> {
    if bytes.len() < SERIES_HEADER_LEN || &bytes[..4] != SERIES_MAGIC {
        return Err(Error::Format("not a CSTS series dump".into()));
    }
    let header = SeriesHeader {
        version: u32_at(bytes, 4),
        side: u32_at(bytes, 8),
        rows: u32_at(bytes, 12),
        tau: u64_at(bytes, 16),
        seed: u64_at(bytes, 24),
    };
    if header.version != SERIES_VERSION {
        return Err(Error::Format(format!("unsupported series version {}", header.version)));
    }
    let rows = header.rows as usize;
    let tau = usize::try_from(header.tau).map_err(|_| Error::Format("tau exceeds usize".into()))?;
    let body = &bytes[SERIES_HEADER_LEN..];
    if (rows as u128) * (tau as u128) != body.len() as u128 {
        return Err(Error::Format(format!(
            "series body has {} bytes, header promises {rows}x{tau}",
            body.len()
        )));
    }
    let spins = body.iter().map(|&b| b as i8).collect();
    let side = (header.side > 0).then_some(header.side as usize);
    let ts = TimeSeriesMatrix::from_spins(rows, tau, spins, (0..rows).collect(), side)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok((ts, header))
}

pub fn write_series(path: &Path, ts: &TimeSeriesMatrix, seed: u64) -> Result<()> {
    write_atomic(path, &encode_series(ts, seed)?)
}

pub fn read_series(path: &Path) -> Result<(TimeSeriesMatrix, SeriesHeader)> {
    decode_series(&fs::read(path)?)
}

pub fn encode_matrix(c: &CorrelationMatrix) -> Result<Vec<u8>> {
    let dim = u32::try_from(c.dim()).map_err(|_| Error::Format("dimension exceeds u32".into()))?;
    let upper = c.packed_upper();
    let mut out = Vec::with_capacity(MATRIX_HEADER_LEN + 8 * upper.len());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&dim.to_le_bytes());
    out.extend_from_slice(&(c.tau().unwrap_or(0) as u64).to_le_bytes());
    for v in upper {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_matrix(bytes: &[u8]) -> Result<CorrelationMatrix> {
    if bytes.len() < MATRIX_HEADER_LEN || &bytes[..4] != MATRIX_MAGIC {
        return Err(Error::Format("not a CSCM matrix file".into()));
    }
    let dim = u32_at(bytes, 4) as usize;
    let tau = u64_at(bytes, 8) as usize;
    let body = &bytes[MATRIX_HEADER_LEN..];
    let expected = dim * (dim + 1) / 2;
    if body.len() != 8 * expected {
        return Err(Error::Format(format!(
            "matrix body has {} bytes, a {dim}x{dim} triangle needs {}",
            body.len(),
            8 * expected
        )));
    }
    let upper = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    CorrelationMatrix::from_packed_upper(dim, upper, (tau > 0).then_some(tau))
}

pub fn write_matrix(path: &Path, c: &CorrelationMatrix) -> Result<()> {
    write_atomic(path, &encode_matrix(c)?)
}

pub fn read_matrix(path: &Path) -> Result<CorrelationMatrix> {
    decode_matrix(&fs::read(path)?)
}

/// A CSV table preceded by `# key=value` comment lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push<I, T>(&mut self, row: I)
    where
        I: IntoIterator<Item = T>,
        T: ToString,
    {
        let row: Vec<String> = row.into_iter().map(|v| v.to_string()).collect();
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self::default();
        for line in text.lines() {
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.trim().split_once('=') {
                    table.meta.push((k.to_string(), v.to_string()));
                }
            } else if line.trim().is_empty() {
                continue;
            } else if table.columns.is_empty() {
                table.columns = line.split(',').map(str::to_string).collect();
            } else {
                let row: Vec<String> = line.split(',').map(str::to_string).collect();
                if row.len() != table.columns.len() {
                    return Err(Error::Format(format!("ragged CSV row: {line}")));
                }
                table.rows.push(row);
            }
        }
        Ok(table)
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Values of a column parsed as `f64`.
    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Format(format!("no column {name}")))?;
        self.rows
            .iter()
            .map(|r| {
                r[idx]
                    .parse()
                    .map_err(|_| Error::Format(format!("bad number {:?} in {name}", r[idx])))
            })
            .collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

/// One site per row: `site,t0,t1,…`.
pub fn series_csv(ts: &TimeSeriesMatrix) -> CsvTable {
    let mut columns = vec!["site".to_string()];
    columns.extend((0..ts.tau()).map(|t| format!("t{t}")));
    let mut table = CsvTable {
        columns,
        ..CsvTable::default()
    };
    for m in 0..ts.rows() {
        let mut row = vec![ts.site_indices()[m].to_string()];
        row.extend(ts.row_f64(m).iter().map(|v| v.to_string()));
        table.rows.push(row);
    }
    table
}

/// Full dense matrix, one matrix row per CSV row.
pub fn matrix_csv(c: &CorrelationMatrix) -> CsvTable {
    let d = c.dim();
    let mut table = CsvTable {
        columns: (0..d).map(|n| format!("c{n}")).collect(),
        ..CsvTable::default()
    };
    for m in 0..d {
        table.rows.push((0..d).map(|n| c.get(m, n).to_string()).collect());
    }
    table
}

pub fn render_sidecar(entries: &[(String, String)]) -> String {
    entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

pub fn parse_sidecar(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Format(format!("sidecar line without '=': {l}")))
        })
        .collect()
}

pub fn write_sidecar(path: &Path, entries: &[(String, String)]) -> Result<()> {
    write_atomic(path, render_sidecar(entries).as_bytes())
}

pub fn read_sidecar(path: &Path) -> Result<Vec<(String, String)>> {
    parse_sidecar(&fs::read_to_string(path)?)
}
