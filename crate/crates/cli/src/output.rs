use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::{CliError, ExperimentConfig};

/// SHA-256 of the canonical TOML form of the config.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A CSV table with the provenance header in front.
pub(crate) struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
pub(crate) fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields);
    }

    pub fn write(&self, cfg: &ExperimentConfig, dir: &Path, name: &str) -> Result<PathBuf, CliError> {
        let mut body = csv::Writer::from_writer(Vec::new());
        body.write_record(&self.header).map_err(csv_io)?;
        for r in &self.rows {
            body.write_record(r).map_err(csv_io)?;
        }
        let body = body.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        let mut text = provenance(cfg);
        text.push_str(std::str::from_utf8(&body).expect("csv is utf-8"));
        write_file(dir, name, &text)
    }
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e.to_string()))
}

/// `# knot-energy <version> config_hash=<sha256>` followed by the config
/// itself as comment lines.
pub(crate) fn provenance(cfg: &ExperimentConfig) -> String {
    let mut s = format!("# knot-energy {} config_hash={}\n", env!("CARGO_PKG_VERSION"), config_hash(cfg));
    for line in cfg.to_toml().lines() {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    s
}

pub(crate) fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

/// A CSV produced by the core crate, prefixed with the provenance header.
pub(crate) fn write_with_provenance<F>(cfg: &ExperimentConfig, dir: &Path, name: &str, f: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut Vec<u8>) -> knot_energy::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    let mut text = provenance(cfg);
    text.push_str(std::str::from_utf8(&buf).expect("csv is utf-8"));
    write_file(dir, name, &text)
}
